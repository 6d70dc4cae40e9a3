use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use ocrs_core::harness::{estimate_balancedness, resolve_instance, Instance};
use ocrs_core::oracle::{max_uncontentious_alpha, max_uncontentious_alpha_exact};
use ocrs_core::preselect::preselect;
use ocrs_core::{
    build_lp_scheme, build_secretary_reduction, ColumnMode, EstimationMode, LpBuildConfig, Matroid,
    OcrsError, Permutation, PreselectConfig, PreselectVariant, Prior, Scheme, SecretaryAlg, SimRng,
};
use rand::SeedableRng;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "ocrs",
    version,
    about = "Universal online contention resolution schemes for matroids"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo trials for `evaluate`.
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, global = true, default_value_t = 0.25)]
    eps: f64,
    /// Uncontentiousness level; defaults to the instance's declared level.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// How preselection statistics and LP columns are computed.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Mc)]
    mode: Mode,
    /// Output directory; artifacts go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Independent,
    Prefix,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeKind {
    /// Greedy over a fixed order.
    Greedy,
    /// Greedy restricted to an independent subsample at rate alpha/2.
    #[value(alias = "alg1")]
    IndependentSubsample,
    /// Greedy restricted to the elements preceding a random sentinel.
    #[value(alias = "alg3")]
    SentinelPrefix,
    Lp,
    SecretaryGreedy,
    SecretaryClassic,
    File,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderKind {
    /// Run preselection (subsampling schemes only).
    Preselect,
    /// Element indices in increasing order.
    Canonical,
    /// Decreasing activation probability.
    Activation,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Secretary {
    Greedy,
    Classic,
}

#[derive(clap::Args)]
struct SchemeArgs {
    /// Instance name (`kuniform:n,k`, `twoelem`, `hats:alpha[,m]`, `all_or_singleton:n,alpha,delta,j`) or JSON path.
    #[arg(long)]
    instance: String,
    #[arg(long, value_enum, default_value_t = SchemeKind::SentinelPrefix)]
    scheme: SchemeKind,
    /// Scheme JSON for `--scheme file`.
    #[arg(long)]
    scheme_file: Option<PathBuf>,
    /// Order for greedy and the subsampling schemes; the latter default to preselection, greedy to canonical.
    #[arg(long, value_enum)]
    order: Option<OrderKind>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an instance as JSON.
    GenInstance {
        #[arg(long)]
        instance: String,
    },
    /// Preselect an order and emit it with per-step statistics.
    Preselect {
        #[arg(long)]
        instance: String,
        #[arg(long, value_enum, default_value_t = Variant::Independent)]
        variant: Variant,
    },
    /// Build a scheme and run it on one draw of the active set.
    Run(SchemeArgs),
    /// Estimate per-element balancedness with confidence intervals.
    Evaluate {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0.99)]
        ci_level: f64,
    },
    /// Compute the maximum uncontentiousness level with a witness scheme.
    OracleAlpha {
        #[arg(long)]
        instance: String,
        /// Solve in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Build an LP-optimal mixture scheme.
    LpBuild {
        #[arg(long)]
        instance: String,
        /// Build a weight mixture for this secretary algorithm instead of an order mixture.
        #[arg(long, value_enum)]
        secretary: Option<Secretary>,
    },
}

fn config_error(msg: &str) -> anyhow::Error {
    OcrsError::InvalidParameter(msg.into()).into()
}

struct Loaded {
    instance: Instance,
    matroid: Matroid,
    prior: Prior,
}

fn load(name: &str) -> anyhow::Result<Loaded> {
    let instance = resolve_instance(name)?;
    let matroid = instance.matroid()?;
    let prior = instance.prior()?;
    Ok(Loaded {
        instance,
        matroid,
        prior,
    })
}

struct Ctx {
    seed: u64,
    trials: u64,
    eps: f64,
    alpha: Option<f64>,
    mode: Mode,
    out: Option<PathBuf>,
}

impl Ctx {
    fn alpha(&self, inst: &Instance) -> f64 {
        self.alpha.unwrap_or(inst.declared_alpha)
    }

    fn preselect_config(&self, inst: &Instance) -> PreselectConfig {
        let mode = match self.mode {
            Mode::Exact => EstimationMode::Exact,
            Mode::Mc => EstimationMode::MonteCarlo,
        };
        PreselectConfig::new(self.alpha(inst), self.eps, mode)
    }

    fn lp_config(&self, inst: &Instance) -> LpBuildConfig {
        let mode = match self.mode {
            Mode::Exact => ColumnMode::Exact,
            Mode::Mc => ColumnMode::MonteCarlo,
        };
        LpBuildConfig::new(self.eps, Some(self.alpha(inst)), mode)
    }

    fn emit(&self, file: &str, contents: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(file);
                fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                print!("{contents}");
                if !contents.ends_with('\n') {
                    println!();
                }
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, file: &str, value: &T) -> anyhow::Result<()> {
        self.emit(file, &serde_json::to_string_pretty(value)?)
    }
}

#[derive(Serialize)]
struct PreselectFailure {
    failed_at_position: usize,
    partial_order_tail: Vec<usize>,
}

fn report_stall(ctx: &Ctx, err: &anyhow::Error) -> anyhow::Result<()> {
    if let Some(OcrsError::NoQualifyingElement { step, partial }) = err.downcast_ref::<OcrsError>()
    {
        eprintln!("warning: preselection stalled; the scheme would select nothing on every draw");
        ctx.emit_json(
            "preselect_failure.json",
            &PreselectFailure {
                failed_at_position: *step,
                partial_order_tail: partial.clone(),
            },
        )?;
    }
    Ok(())
}

fn fixed_order(kind: OrderKind, loaded: &Loaded, rng: &mut SimRng) -> anyhow::Result<Permutation> {
    let n = loaded.matroid.n();
    Ok(match kind {
        OrderKind::Canonical => Permutation::identity(n),
        OrderKind::Random => Permutation::random(n, rng),
        OrderKind::Activation => {
            let x = loaded.prior.activation().ok_or_else(|| {
                config_error("activation order needs a prior with known activation probabilities")
            })?;
            Permutation::by_weight(&x)
        }
        OrderKind::Preselect => {
            return Err(config_error(
                "preselect order applies to the subsampling schemes only",
            ))
        }
    })
}

fn build_scheme(
    ctx: &Ctx,
    args: &SchemeArgs,
    loaded: &Loaded,
    rng: &mut SimRng,
) -> anyhow::Result<Scheme> {
    let inst = &loaded.instance;
    let (m, p) = (&loaded.matroid, &loaded.prior);
    if args.scheme != SchemeKind::File && args.scheme_file.is_some() {
        return Err(config_error("--scheme-file requires --scheme file"));
    }
    let scheme = match args.scheme {
        SchemeKind::Greedy => Scheme::GreedyOrdered {
            order: fixed_order(args.order.unwrap_or(OrderKind::Canonical), loaded, rng)?,
        },
        SchemeKind::IndependentSubsample | SchemeKind::SentinelPrefix => {
            let variant = if args.scheme == SchemeKind::IndependentSubsample {
                PreselectVariant::Independent
            } else {
                PreselectVariant::Prefix
            };
            let order = match args.order.unwrap_or(OrderKind::Preselect) {
                OrderKind::Preselect => {
                    preselect(m, p, &ctx.preselect_config(inst), variant, rng)?.order
                }
                other => fixed_order(other, loaded, rng)?,
            };
            match variant {
                PreselectVariant::Independent => Scheme::IndependentSubsample {
                    order,
                    rho: ctx.alpha(inst) / 2.0,
                },
                PreselectVariant::Prefix => Scheme::SentinelPrefix { order },
            }
        }
        SchemeKind::Lp => build_lp_scheme(m, p, &ctx.lp_config(inst), rng)?.0,
        SchemeKind::SecretaryGreedy => {
            build_secretary_reduction(
                m,
                p,
                SecretaryAlg::GreedyByWeight,
                1.0,
                &ctx.lp_config(inst),
                rng,
            )?
            .0
        }
        SchemeKind::SecretaryClassic => {
            let c = std::f64::consts::E.recip();
            build_secretary_reduction(
                m,
                p,
                SecretaryAlg::Classic1Uniform,
                c,
                &ctx.lp_config(inst),
                rng,
            )?
            .0
        }
        SchemeKind::File => {
            let path = args
                .scheme_file
                .as_deref()
                .ok_or_else(|| config_error("--scheme file needs --scheme-file"))?;
            read_scheme(path)?
        }
    };
    scheme.validate(m.n())?;
    Ok(scheme)
}

fn read_scheme(path: &Path) -> anyhow::Result<Scheme> {
    let text = fs::read_to_string(path)
        .map_err(|e| OcrsError::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text).map_err(|e| {
        OcrsError::InvalidParameter(format!("bad scheme file {}: {e}", path.display()))
    })?)
}

#[derive(Serialize)]
struct RunRecord<'a> {
    scheme: &'a Scheme,
    active: Vec<usize>,
    selected: Vec<usize>,
}

#[derive(Serialize)]
struct SchemeArtifact<'a, R: Serialize> {
    scheme: &'a Scheme,
    report: R,
}

fn execute(ctx: &Ctx, command: Command) -> anyhow::Result<()> {
    let mut rng = SimRng::seed_from_u64(ctx.seed);
    match command {
        Command::GenInstance { instance } => {
            let inst = resolve_instance(&instance)?;
            inst.matroid()?;
            inst.prior()?;
            ctx.emit_json("instance.json", &inst)
        }
        Command::Preselect { instance, variant } => {
            let loaded = load(&instance)?;
            let variant = match variant {
                Variant::Independent => PreselectVariant::Independent,
                Variant::Prefix => PreselectVariant::Prefix,
            };
            let cfg = ctx.preselect_config(&loaded.instance);
            let sel = preselect(&loaded.matroid, &loaded.prior, &cfg, variant, &mut rng)?;
            ctx.emit_json("preselection.json", &sel)
        }
        Command::Run(args) => {
            let loaded = load(&args.instance)?;
            let scheme = build_scheme(ctx, &args, &loaded, &mut rng)?;
            let active = loaded.prior.sample(&mut rng);
            let selected = scheme.run(&loaded.matroid, &active, &mut rng);
            ctx.emit_json(
                "run.json",
                &RunRecord {
                    scheme: &scheme,
                    active: active.to_vec(),
                    selected: selected.to_vec(),
                },
            )
        }
        Command::Evaluate {
            scheme: args,
            ci_level,
        } => {
            let loaded = load(&args.instance)?;
            let scheme = build_scheme(ctx, &args, &loaded, &mut rng)?;
            let report = estimate_balancedness(
                &loaded.matroid,
                &scheme,
                &loaded.prior,
                ctx.trials,
                ci_level,
                ctx.seed,
            )?;
            if let Some(min) = report.min_estimate {
                eprintln!("min balancedness {min} ({} trials)", report.trials);
            }
            ctx.emit("report.csv", &report.to_csv())?;
            if ctx.out.is_some() {
                ctx.emit_json("report.json", &report)?;
                ctx.emit_json("scheme.json", &scheme)?;
            }
            Ok(())
        }
        Command::OracleAlpha { instance, exact } => {
            let loaded = load(&instance)?;
            let dump = if exact {
                let cert = max_uncontentious_alpha_exact(&loaded.matroid, &loaded.prior)?;
                println!("alpha_star={}", cert.dump().alpha_star);
                println!("alpha_star_exact={}", cert.dump().alpha_star_exact);
                cert.dump()
            } else {
                let cert = max_uncontentious_alpha::<f64>(&loaded.matroid, &loaded.prior)?;
                println!("alpha_star={}", cert.alpha_star);
                cert.dump()
            };
            if ctx.out.is_some() {
                ctx.emit_json("certificate.json", &dump)?;
            }
            Ok(())
        }
        Command::LpBuild {
            instance,
            secretary,
        } => {
            let loaded = load(&instance)?;
            let cfg = ctx.lp_config(&loaded.instance);
            let (scheme, report) = match secretary {
                None => build_lp_scheme(&loaded.matroid, &loaded.prior, &cfg, &mut rng)?,
                Some(Secretary::Greedy) => build_secretary_reduction(
                    &loaded.matroid,
                    &loaded.prior,
                    SecretaryAlg::GreedyByWeight,
                    1.0,
                    &cfg,
                    &mut rng,
                )?,
                Some(Secretary::Classic) => build_secretary_reduction(
                    &loaded.matroid,
                    &loaded.prior,
                    SecretaryAlg::Classic1Uniform,
                    std::f64::consts::E.recip(),
                    &cfg,
                    &mut rng,
                )?,
            };
            eprintln!(
                "beta={} gamma={} columns={} converged={}",
                report.solution.beta,
                report.solution.gamma,
                report.columns.len(),
                report.converged
            );
            if ctx.out.is_some() {
                ctx.emit_json("scheme.json", &scheme)?;
                ctx.emit_json("build_report.json", &report)
            } else {
                ctx.emit_json(
                    "scheme.json",
                    &SchemeArtifact {
                        scheme: &scheme,
                        report: &report,
                    },
                )
            }
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<OcrsError>() {
        Some(OcrsError::NoQualifyingElement { .. }) => 1,
        Some(
            OcrsError::InvalidParameter(_)
            | OcrsError::InvalidPrior(_)
            | OcrsError::InvalidMatroid(_)
            | OcrsError::DimensionMismatch { .. }
            | OcrsError::ElementOutOfRange { .. }
            | OcrsError::NegativeWeight { .. }
            | OcrsError::ZeroActivation { .. }
            | OcrsError::TooLarge { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed,
        trials: cli.trials,
        eps: cli.eps,
        alpha: cli.alpha,
        mode: cli.mode,
        out: cli.out,
    };
    match execute(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Err(e) = report_stall(&ctx, &err) {
                eprintln!("error: {e:#}");
            }
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
