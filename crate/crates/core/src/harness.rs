//! Instances, tight-instance generators and Monte-Carlo balancedness reports.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::matroid::{Matroid, MatroidSpec};
use crate::prior::{Prior, PriorSpec};
use crate::scheme::Scheme;
use crate::sim::{count_selections, shard_rng, SelectionCounts, SHARDS};
use crate::SimRng;

/// A matroid, a prior over its active sets, and the uncontentiousness level the prior is claimed to have.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub matroid: MatroidSpec,
    pub prior: PriorSpec,
    pub declared_alpha: f64,
    pub provenance: String,
}

impl Instance {
    pub fn matroid(&self) -> Result<Matroid> {
        Matroid::from_spec(&self.matroid)
    }

    pub fn prior(&self) -> Result<Prior> {
        let prior = Prior::from_spec(&self.prior)?;
        let m = self.matroid()?;
        if prior.n() != m.n() {
            return Err(OcrsError::DimensionMismatch {
                expected: m.n(),
                got: prior.n(),
            });
        }
        Ok(prior)
    }
}

fn check_alpha_reciprocal(alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(OcrsError::InvalidParameter(format!(
            "alpha {alpha} outside (0, 1/2]"
        )));
    }
    let inv = (1.0 / alpha).round();
    if (inv * alpha - 1.0).abs() > 1e-9 {
        return Err(OcrsError::InvalidParameter(format!(
            "1/alpha is not an integer for alpha {alpha}"
        )));
    }
    Ok(inv as usize)
}

/// Largest `m` with `(1 - α/2)(1 - α²/4)^m >= α/2`.
pub fn hats_count(alpha: f64) -> Result<usize> {
    check_alpha_reciprocal(alpha)?;
    let keep = 1.0 - alpha * alpha / 4.0;
    let mut value = 1.0 - alpha / 2.0;
    let mut m = 0;
    while value * keep >= alpha / 2.0 {
        value *= keep;
        m += 1;
    }
    Ok(m)
}

/// Index of the edge `(u, u')` in [`gen_parallel_hats_with`] instances.
pub fn hats_bridge_edge(m: usize) -> usize {
    2 * m
}

/// Graphic matroid of `1/α` parallel edges `w–w'` next to `m` hats `(v_i,u),(v_i,u')`
/// sharing the bridge `(u,u')`, with every edge always active.
///
/// Edge order: `(v_i,u)` for `i < m`, then `(v_i,u')`, then `(u,u')`, then the
/// parallel edges; the identity order processes hats, bridge, parallel edges.
pub fn gen_parallel_hats_with(alpha: f64, m: usize) -> Result<Instance> {
    let parallel = check_alpha_reciprocal(alpha)?;
    let (w, w2, u, u2) = (0, 1, 2, 3);
    let hat = |i: usize| 4 + i;
    let mut edges = Vec::with_capacity(2 * m + 1 + parallel);
    edges.extend((0..m).map(|i| [hat(i), u]));
    edges.extend((0..m).map(|i| [hat(i), u2]));
    edges.push([u, u2]);
    edges.extend((0..parallel).map(|_| [w, w2]));
    let n = edges.len();
    Ok(Instance {
        matroid: MatroidSpec::Graphic {
            vertices: 4 + m,
            edges,
        },
        prior: PriorSpec::AllActive { n },
        declared_alpha: alpha,
        provenance: format!("parallel-hats alpha={alpha} m={m}"),
    })
}

pub fn gen_parallel_hats(alpha: f64) -> Result<Instance> {
    gen_parallel_hats_with(alpha, hats_count(alpha)?)
}

/// `k`-uniform matroid with every element always active; declared level `k/n`.
pub fn gen_kuniform_allactive(n: usize, k: usize) -> Result<Instance> {
    if k == 0 || k >= n {
        return Err(OcrsError::InvalidParameter(format!(
            "need 1 <= k <= n-1, got n={n} k={k}"
        )));
    }
    Ok(Instance {
        matroid: MatroidSpec::Uniform { n, k },
        prior: PriorSpec::AllActive { n },
        declared_alpha: k as f64 / n as f64,
        provenance: format!("kuniform n={n} k={k}"),
    })
}

/// Rank-one matroid on two elements, both active together with probability 1/2.
pub fn gen_two_element() -> Instance {
    Instance {
        matroid: MatroidSpec::Explicit {
            n: 2,
            independent_sets: vec![vec![], vec![0], vec![1]],
        },
        prior: PriorSpec::Explicit {
            n: 2,
            support: vec![vec![0, 1], vec![]],
            probs: vec![
                crate::prior::Probability::Ratio("1/2".into()),
                crate::prior::Probability::Ratio("1/2".into()),
            ],
        },
        declared_alpha: 0.5,
        provenance: "two-element".into(),
    }
}

/// Rank-one matroid under the hard prior family with distinguished element `j`.
pub fn gen_all_or_singleton(n: usize, alpha: f64, delta: f64, j: usize) -> Result<Instance> {
    let prior = PriorSpec::AllOrSingleton { n, alpha, delta, j };
    Prior::from_spec(&prior)?;
    Ok(Instance {
        matroid: MatroidSpec::Uniform { n, k: 1 },
        prior,
        declared_alpha: alpha,
        provenance: format!("all-or-singleton n={n} alpha={alpha} delta={delta} j={j}"),
    })
}

fn parse_list<T: std::str::FromStr>(s: &str, want: usize, name: &str) -> Result<Vec<T>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != want {
        return Err(OcrsError::InvalidParameter(format!(
            "{name} expects {want} comma-separated values, got {s:?}"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| OcrsError::InvalidParameter(format!("cannot parse {p:?} in {name}")))
        })
        .collect()
}

/// Resolves `kuniform:n,k`, `twoelem`, `hats:alpha[,m]`, `all_or_singleton:n,alpha,delta,j`,
/// or a path to an instance JSON file.
pub fn resolve_instance(name: &str) -> Result<Instance> {
    if name == "twoelem" {
        return Ok(gen_two_element());
    }
    if let Some(args) = name.strip_prefix("kuniform:") {
        let v: Vec<usize> = parse_list(args, 2, "kuniform")?;
        return gen_kuniform_allactive(v[0], v[1]);
    }
    if let Some(args) = name.strip_prefix("hats:") {
        return match args.split_once(',') {
            Some((a, m)) => {
                let alpha: f64 = parse_list(a, 1, "hats")?[0];
                let m: usize = parse_list(m, 1, "hats")?[0];
                gen_parallel_hats_with(alpha, m)
            }
            None => gen_parallel_hats(parse_list(args, 1, "hats")?[0]),
        };
    }
    if let Some(args) = name.strip_prefix("all_or_singleton:") {
        let v: Vec<f64> = parse_list(args, 4, "all_or_singleton")?;
        return gen_all_or_singleton(v[0] as usize, v[1], v[2], v[3] as usize);
    }
    let path = Path::new(name);
    let text = std::fs::read_to_string(path)
        .map_err(|e| OcrsError::InvalidParameter(format!("unknown instance {name:?} ({e})")))?;
    serde_json::from_str(&text)
        .map_err(|e| OcrsError::InvalidParameter(format!("bad instance file {name:?}: {e}")))
}

/// Two-sided Hoeffding half-width `sqrt(ln(2/(1-level)) / (2·count))`.
pub fn hoeffding_half_width(count: u64, level: f64) -> f64 {
    ((2.0 / (1.0 - level)).ln() / (2.0 * count as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementRow {
    pub element: usize,
    pub active_count: u64,
    pub selected_count: u64,
    /// `None` when the element was never active.
    pub estimate: Option<f64>,
    pub half_width: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalancednessReport {
    pub scheme: String,
    pub seed: u64,
    pub trials: u64,
    pub ci_level: f64,
    pub rows: Vec<ElementRow>,
    pub min_estimate: Option<f64>,
    pub min_element: Option<usize>,
}

impl BalancednessReport {
    fn from_counts(scheme: &str, seed: u64, ci_level: f64, counts: SelectionCounts) -> Self {
        let rows: Vec<ElementRow> = (0..counts.active.len())
            .map(|element| {
                let active = counts.active[element];
                let selected = counts.selected[element];
                let estimate = (active > 0).then(|| selected as f64 / active as f64);
                let half_width = (active > 0).then(|| hoeffding_half_width(active, ci_level));
                ElementRow {
                    element,
                    active_count: active,
                    selected_count: selected,
                    estimate,
                    half_width,
                    ci_lo: estimate.zip(half_width).map(|(e, h)| (e - h).max(0.0)),
                    ci_hi: estimate.zip(half_width).map(|(e, h)| (e + h).min(1.0)),
                }
            })
            .collect();
        let min = rows
            .iter()
            .filter_map(|r| r.estimate.map(|e| (e, r.element)))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            scheme: scheme.to_string(),
            seed,
            trials: counts.trials,
            ci_level,
            rows,
            min_estimate: min.map(|m| m.0),
            min_element: min.map(|m| m.1),
        }
    }

    /// Columns `element,active_count,selected_count,estimate,ci_lo,ci_hi`; `NA` marks no data.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("element,active_count,selected_count,estimate,ci_lo,ci_hi\n");
        let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.element,
                r.active_count,
                r.selected_count,
                cell(r.estimate),
                cell(r.ci_lo),
                cell(r.ci_hi)
            );
        }
        out
    }
}

fn check_run(trials: u64, ci_level: f64) -> Result<()> {
    if trials == 0 {
        return Err(OcrsError::InvalidParameter(
            "trials must be positive".into(),
        ));
    }
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(OcrsError::InvalidParameter(format!(
            "ci level {ci_level} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Runs a built scheme on `trials` fresh draws of `A ~ prior` and reports
/// per-element `Pr[i selected | i active]` with Hoeffding intervals.
pub fn estimate_balancedness(
    matroid: &Matroid,
    scheme: &Scheme,
    prior: &Prior,
    trials: u64,
    ci_level: f64,
    seed: u64,
) -> Result<BalancednessReport> {
    check_run(trials, ci_level)?;
    scheme.validate(matroid.n())?;
    if prior.n() != matroid.n() {
        return Err(OcrsError::DimensionMismatch {
            expected: matroid.n(),
            got: prior.n(),
        });
    }
    let counts = count_selections(prior, trials, seed, |a, rng| scheme.run(matroid, a, rng));
    Ok(BalancednessReport::from_counts(
        scheme.label(),
        seed,
        ci_level,
        counts,
    ))
}

/// Like [`estimate_balancedness`] but builds a fresh scheme for every trial.
pub fn estimate_balancedness_rebuilding<B>(
    matroid: &Matroid,
    prior: &Prior,
    trials: u64,
    ci_level: f64,
    seed: u64,
    label: &str,
    build: B,
) -> Result<BalancednessReport>
where
    B: Fn(&mut SimRng) -> Result<Scheme> + Sync,
{
    check_run(trials, ci_level)?;
    let n = matroid.n();
    let per = trials / SHARDS;
    let extra = trials % SHARDS;
    let shards: Vec<Result<SelectionCounts>> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = shard_rng(seed, shard);
            let count = per + u64::from(shard < extra);
            let mut c = SelectionCounts {
                trials: count,
                active: vec![0; n],
                selected: vec![0; n],
            };
            for _ in 0..count {
                let scheme = build(&mut rng)?;
                let a = prior.sample(&mut rng);
                let out = scheme.run(matroid, &a, &mut rng);
                for i in a.iter() {
                    c.active[i] += 1;
                }
                for i in out.intersection(&a).iter() {
                    c.selected[i] += 1;
                }
            }
            Ok(c)
        })
        .collect();
    let mut total = SelectionCounts {
        trials: 0,
        active: vec![0; n],
        selected: vec![0; n],
    };
    for s in shards {
        let s = s?;
        total.trials += s.trials;
        for i in 0..n {
            total.active[i] += s.active[i];
            total.selected[i] += s.selected[i];
        }
    }
    Ok(BalancednessReport::from_counts(
        label, seed, ci_level, total,
    ))
}
