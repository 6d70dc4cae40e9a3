//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use num_rational::BigRational;
use ocrs_core::harness::{
    estimate_balancedness, gen_all_or_singleton, gen_kuniform_allactive, gen_parallel_hats,
    gen_parallel_hats_with, gen_two_element, hats_bridge_edge, BalancednessReport, Instance,
};
use ocrs_core::oracle::{
    bruteforce_weighted_rank, exact_balancedness, expected_rank_and_weight,
    max_uncontentious_alpha_exact,
};
use ocrs_core::preselect::preselect;
use ocrs_core::scheme::{build_independent_subsample, build_sentinel_prefix};
use ocrs_core::subsample::sentinel_prefix;
use ocrs_core::{
    build_lp_scheme, build_secretary_reduction, ColumnMode, EstimationMode, LpBuildConfig, Matroid,
    Permutation, PreselectConfig, PreselectVariant, Prior, Scalar, Scheme, SecretaryAlg, SimRng,
    SubsetMask,
};
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

const CI_LEVEL: f64 = 0.99;
const FLOOR_EPS: f64 = 0.25;
const LP_EPS: f64 = 0.1;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::from_integer(a.into()) / BigRational::from_integer(b.into())
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn random_mask<R: Rng>(n: usize, r: &mut R) -> SubsetMask {
    SubsetMask::from_elements(n, (0..n).filter(|_| r.gen_bool(0.5))).unwrap()
}

fn random_graphic<R: Rng>(n: usize, r: &mut R) -> Matroid {
    let vertices = n / 2 + 2;
    let edges = (0..n)
        .map(|_| {
            let a = r.gen_range(0..vertices);
            let b = (a + r.gen_range(1..vertices)) % vertices;
            [a, b]
        })
        .collect();
    Matroid::graphic(vertices, edges).unwrap()
}

fn random_matroid<R: Rng>(n: usize, r: &mut R) -> Matroid {
    if r.gen_bool(0.4) {
        Matroid::uniform(n, r.gen_range(1..=n))
    } else {
        random_graphic(n, r)
    }
}

/// Explicit prior on a few atoms that together cover every element.
fn random_covering_prior<R: Rng>(n: usize, r: &mut R) -> Prior {
    loop {
        let atoms: Vec<(SubsetMask, i64)> = (0..r.gen_range(2..=5))
            .map(|_| (random_mask(n, r), r.gen_range(1..=9)))
            .collect();
        let cover = atoms
            .iter()
            .fold(SubsetMask::empty(n), |acc, a| acc.union(&a.0));
        if cover.cardinality() == n {
            let total: i64 = atoms.iter().map(|a| a.1).sum();
            return Prior::explicit_exact(n, atoms.into_iter().map(|(a, w)| (a, q(w, total))))
                .unwrap();
        }
    }
}

struct Case {
    name: String,
    matroid: Matroid,
    prior: Prior,
}

impl Case {
    fn from_instance(inst: Instance) -> Self {
        Self {
            name: inst.provenance.clone(),
            matroid: inst.matroid().unwrap(),
            prior: inst.prior().unwrap(),
        }
    }

    fn alpha_star(&self) -> BigRational {
        max_uncontentious_alpha_exact(&self.matroid, &self.prior)
            .unwrap()
            .alpha_star
    }
}

/// Named instances plus seeded random explicit ones, all with `n <= 7`.
fn battery(random: usize) -> Vec<Case> {
    let mut cases: Vec<Case> = [
        gen_kuniform_allactive(4, 2).unwrap(),
        gen_two_element(),
        gen_all_or_singleton(3, 0.5, 0.2, 0).unwrap(),
        gen_parallel_hats_with(0.5, 2).unwrap(),
    ]
    .into_iter()
    .map(Case::from_instance)
    .collect();
    let mut r = rng(2024);
    for k in 0..random {
        let n = r.gen_range(3..=7);
        cases.push(Case {
            name: format!("random#{k} n={n}"),
            matroid: random_matroid(n, &mut r),
            prior: random_covering_prior(n, &mut r),
        });
    }
    cases
}

fn min_margin(report: &BalancednessReport, floor: f64) -> Result<f64, String> {
    let mut worst = f64::INFINITY;
    for row in &report.rows {
        let (Some(est), Some(hw)) = (row.estimate, row.half_width) else {
            return Err(format!("element {} never active", row.element));
        };
        worst = worst.min(est + hw - floor);
    }
    Ok(worst)
}

fn axioms() -> Check {
    let mut count = 0;
    for n in 1..=8 {
        for k in 0..=n {
            ensure(Matroid::uniform(n, k).verify_axioms().unwrap(), || {
                format!("U({k},{n}) rejected")
            })?;
            count += 1;
        }
    }
    let mut r = rng(1);
    let mut explicit = Vec::new();
    for g in 0..20 {
        let n = r.gen_range(2..=10);
        let m = random_graphic(n, &mut r);
        ensure(m.verify_axioms().unwrap(), || {
            format!("graphic #{g} rejected")
        })?;
        let family: Vec<SubsetMask> = SubsetMask::all(n)
            .filter(|s| m.is_independent(s).unwrap())
            .collect();
        explicit.push(Matroid::explicit(n, family).unwrap());
        count += 1;
    }
    explicit.push(gen_two_element().matroid().unwrap());
    for (k, m) in explicit.iter().enumerate() {
        ensure(m.verify_axioms().unwrap(), || {
            format!("explicit #{k} rejected")
        })?;
        count += 1;
    }
    let mask = |n: usize, e: &[usize]| SubsetMask::from_elements(n, e.iter().copied()).unwrap();
    let corrupted = [
        Matroid::explicit(
            3,
            [
                mask(3, &[]),
                mask(3, &[0]),
                mask(3, &[1]),
                mask(3, &[0, 1]),
                mask(3, &[2]),
            ],
        )
        .unwrap(),
        Matroid::explicit(2, [mask(2, &[]), mask(2, &[0, 1])]).unwrap(),
        Matroid::explicit(2, [mask(2, &[0])]).unwrap(),
    ];
    for (k, m) in corrupted.iter().enumerate() {
        ensure(!m.verify_axioms().unwrap(), || {
            format!("corrupted family #{k} accepted")
        })?;
    }
    Ok(format!(
        "{count} matroids accepted, {} corrupted families rejected",
        corrupted.len()
    ))
}

fn weighted_rank() -> Check {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let n = r.gen_range(1..=10);
        let m = random_matroid(n, &mut r);
        let w: Vec<f64> = (0..n)
            .map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen() })
            .collect();
        let s = random_mask(n, &mut r);
        let diff = (m.weighted_rank(&w, &s).unwrap()
            - bruteforce_weighted_rank(&m, &w, &s).unwrap())
        .abs();
        worst = worst.max(diff);
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("10000 cases, max deviation {worst:e}"))
}

fn prefix_law() -> Check {
    let mut groups_checked = 0;
    for n in 1..=6usize {
        let ts: Vec<SubsetMask> = Permutation::all(n + 1)
            .map(|s| sentinel_prefix(&s))
            .collect();
        let mut sizes = vec![0u64; n + 1];
        for t in &ts {
            sizes[t.cardinality()] += 1;
        }
        ensure(sizes.iter().all(|&c| c == factorial(n as u64)), || {
            format!("|T| not uniform for n={n}")
        })?;
        for i in 1..=n {
            let before = SubsetMask::from_elements(n, 0..i - 1).unwrap();
            let mut groups: BTreeMap<SubsetMask, (u64, u64)> = BTreeMap::new();
            for t in &ts {
                let g = groups.entry(t.intersection(&before)).or_default();
                g.0 += 1;
                g.1 += u64::from(t.contains(i - 1));
            }
            for (s, (total, hit)) in groups {
                let got = q(hit as i64, total as i64);
                let want = q(s.cardinality() as i64 + 1, i as i64 + 1);
                ensure(got == want, || {
                    format!("n={n} i={i} S={s:?}: {got} vs {want}")
                })?;
                groups_checked += 1;
            }
        }
    }
    Ok(format!(
        "{groups_checked} conditional laws exact, |T| uniform for n<=6"
    ))
}

fn knapsack() -> Check {
    let mut r = rng(4);
    let mut worst = f64::INFINITY;
    for t in 0..10_000 {
        let i = r.gen_range(1..=20usize);
        let x: Vec<f64> = match t % 3 {
            0 => (0..i).map(|_| r.gen()).collect(),
            1 => (0..i)
                .map(|_| f64::from(u8::from(r.gen_bool(0.5))))
                .collect(),
            _ => {
                let ones = r.gen_range(0..=i);
                (0..i).map(|k| f64::from(u8::from(k < ones))).collect()
            }
        };
        let mean = x.iter().sum::<f64>() / i as f64;
        let alpha = if t % 2 == 0 {
            mean
        } else {
            mean * r.gen::<f64>()
        };
        let lhs: f64 = x
            .iter()
            .enumerate()
            .map(|(k, xk)| (k + 1) as f64 / (i * (i + 1)) as f64 * xk)
            .sum();
        let slack = lhs - alpha * alpha / 2.0;
        worst = worst.min(slack);
        ensure(slack >= -1e-12, || {
            format!("i={i} alpha={alpha} slack {slack:e}")
        })?;
    }
    Ok(format!("10000 feasible cases, min slack {worst:e}"))
}

fn exact_preselection(cases: &[Case]) -> Check {
    for case in cases {
        let alpha = case.alpha_star().as_f64();
        let cfg = PreselectConfig::new(alpha, FLOOR_EPS, EstimationMode::Exact);
        for variant in [PreselectVariant::Independent, PreselectVariant::Prefix] {
            preselect(&case.matroid, &case.prior, &cfg, variant, &mut rng(5))
                .map_err(|e| format!("{} {variant:?} at alpha*={alpha}: {e}", case.name))?;
        }
    }
    Ok(format!("{} instances, both variants complete", cases.len()))
}

fn sentinel_prefix_tight() -> Check {
    let inst = gen_kuniform_allactive(4, 2).unwrap();
    let (m, p) = (inst.matroid().unwrap(), inst.prior().unwrap());
    let scheme = Scheme::SentinelPrefix {
        order: Permutation::identity(4),
    };
    let exact = exact_balancedness::<BigRational>(&m, &scheme, &p).unwrap();
    let last = exact[3].clone().unwrap();
    ensure(last == q(3, 20), || {
        format!("exact last-element probability {last}")
    })?;
    ensure(last >= q(1, 8), || "below alpha^2/2".into())?;
    let report = estimate_balancedness(&m, &scheme, &p, 1_000_000, CI_LEVEL, 6).unwrap();
    let row = &report.rows[3];
    let (est, hw) = (row.estimate.unwrap(), row.half_width.unwrap());
    ensure((est - 0.15).abs() <= hw, || {
        format!("MC {est} outside 0.15 +- {hw}")
    })?;

    let (n, k) = (20i64, 10i64);
    let by_size = (1..=k).fold(<BigRational as Scalar>::zero(), |acc, t| {
        acc + q(t, n * (n + 1))
    });
    ensure(by_size == q(110, 840), || {
        format!("n=20 formula gives {by_size}")
    })?;
    let big = Scheme::SentinelPrefix {
        order: Permutation::identity(20),
    };
    let big_report = estimate_balancedness(
        &Matroid::uniform(20, 10),
        &big,
        &Prior::all_active(20),
        200_000,
        CI_LEVEL,
        6,
    )
    .unwrap();
    let row = &big_report.rows[19];
    let (big_est, big_hw) = (row.estimate.unwrap(), row.half_width.unwrap());
    ensure((big_est - 110.0 / 840.0).abs() <= big_hw, || {
        format!("n=20 MC {big_est}")
    })?;
    ensure(110.0 / 840.0 >= 0.125, || "n=20 below alpha^2/2".into())?;
    Ok(format!(
        "exact 3/20, MC {est:.5} +- {hw:.5}; n=20: 110/840 vs MC {big_est:.5}"
    ))
}

fn independent_subsample_tight() -> Check {
    let inst = gen_parallel_hats(0.5).unwrap();
    let (m, p) = (inst.matroid().unwrap(), inst.prior().unwrap());
    let hats = (m.n() - 3) / 2;
    ensure(hats == 17 && m.n() == 37, || {
        format!("unexpected size n={}", m.n())
    })?;
    let scheme = Scheme::IndependentSubsample {
        order: Permutation::identity(m.n()),
        rho: 0.25,
    };
    let report = estimate_balancedness(&m, &scheme, &p, 1_000_000, CI_LEVEL, 7).unwrap();
    let row = &report.rows[hats_bridge_edge(hats)];
    let (est, hw) = (row.estimate.unwrap(), row.half_width.unwrap());
    let want = 0.25 * (15.0f64 / 16.0).powi(17);
    ensure((est - want).abs() <= hw, || {
        format!("{est} outside {want} +- {hw}")
    })?;
    ensure(want >= 0.0625, || "target below alpha^2/4".into())?;
    Ok(format!("bridge edge {est:.5} +- {hw:.5} vs {want:.5}"))
}

fn universality_floors(cases: &[Case]) -> Check {
    let mut worst: f64 = f64::INFINITY;
    for (k, case) in cases.iter().enumerate() {
        let alpha = case.alpha_star().as_f64();
        let mut r = rng(800 + k as u64);
        let mc = PreselectConfig::new(alpha, FLOOR_EPS, EstimationMode::MonteCarlo);
        let (independent, _) = build_independent_subsample(&case.matroid, &case.prior, &mc, &mut r)
            .map_err(|e| format!("{} independent-subsample preselection: {e}", case.name))?;
        let exact = PreselectConfig::new(alpha, FLOOR_EPS, EstimationMode::Exact);
        let (sentinel, _) = build_sentinel_prefix(&case.matroid, &case.prior, &exact, &mut r)
            .map_err(|e| format!("{} sentinel-prefix preselection: {e}", case.name))?;
        for (scheme, floor) in [
            (independent, (1.0 - FLOOR_EPS) * alpha * alpha / 4.0),
            (sentinel, alpha * alpha / 2.0),
        ] {
            let report =
                estimate_balancedness(&case.matroid, &scheme, &case.prior, 100_000, CI_LEVEL, 8)
                    .unwrap();
            let margin = min_margin(&report, floor)?;
            ensure(margin >= 0.0, || {
                format!("{} {} short by {:e}", case.name, scheme.label(), -margin)
            })?;
            worst = worst.min(margin);
        }
    }
    Ok(format!(
        "{} instances, smallest margin above floor {worst:.4}",
        cases.len()
    ))
}

fn lp_cases() -> Vec<Case> {
    vec![
        Case::from_instance(gen_kuniform_allactive(4, 2).unwrap()),
        Case::from_instance(gen_two_element()),
    ]
}

fn lp_optimal() -> Check {
    let mut summary = Vec::new();
    for case in lp_cases() {
        let alpha = case.alpha_star().as_f64();
        let cfg = LpBuildConfig::new(LP_EPS, Some(alpha), ColumnMode::Exact);
        let (scheme, report) =
            build_lp_scheme(&case.matroid, &case.prior, &cfg, &mut rng(9)).unwrap();
        let (beta, gamma) = (report.solution.beta, report.solution.gamma);
        ensure(beta >= (1.0 - LP_EPS) * alpha, || {
            format!("{}: beta {beta}", case.name)
        })?;
        ensure(gamma >= (1.0 - LP_EPS) * alpha, || {
            format!("{}: gamma {gamma}", case.name)
        })?;
        for (i, b) in exact_balancedness::<f64>(&case.matroid, &scheme, &case.prior)
            .unwrap()
            .iter()
            .enumerate()
        {
            let b = b.ok_or_else(|| format!("{}: element {i} never active", case.name))?;
            ensure(b >= beta - 1e-9, || {
                format!("{}: element {i} balancedness {b} < beta {beta}", case.name)
            })?;
        }
        summary.push(format!("{} beta={beta:.4}", case.name));
    }
    Ok(summary.join(", "))
}

fn secretary_greedy() -> Check {
    let mut summary = Vec::new();
    for case in lp_cases() {
        let alpha = case.alpha_star().as_f64();
        let cfg = LpBuildConfig::new(LP_EPS, Some(alpha), ColumnMode::Exact);
        let (lp, _) = build_lp_scheme(&case.matroid, &case.prior, &cfg, &mut rng(10)).unwrap();
        let lp_min = exact_balancedness::<f64>(&case.matroid, &lp, &case.prior)
            .unwrap()
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min);
        let (scheme, _) = build_secretary_reduction(
            &case.matroid,
            &case.prior,
            SecretaryAlg::GreedyByWeight,
            1.0,
            &cfg,
            &mut rng(10),
        )
        .unwrap();
        let report =
            estimate_balancedness(&case.matroid, &scheme, &case.prior, 100_000, CI_LEVEL, 10)
                .unwrap();
        let margin = min_margin(&report, (1.0 - LP_EPS) * alpha)?;
        ensure(margin >= 0.0, || {
            format!("{}: short by {:e}", case.name, -margin)
        })?;
        let min = report.min_estimate.unwrap();
        ensure((min - lp_min).abs() <= 2.0 * LP_EPS, || {
            format!("{}: {min} vs LP {lp_min}", case.name)
        })?;
        summary.push(format!("{} min={min:.4} (LP {lp_min:.4})", case.name));
    }
    Ok(summary.join(", "))
}

fn secretary_classic() -> Check {
    let n = 5;
    let m = Matroid::uniform(n, 1);
    let all = SubsetMask::full(n);
    let mut r = rng(11);
    let (mut got, mut best) = (0.0, 0.0);
    for _ in 0..100_000 {
        let w: Vec<f64> = (0..n).map(|_| r.gen()).collect();
        let arrival = Permutation::random(n, &mut r);
        let out =
            ocrs_core::secretary_wrap(SecretaryAlg::Classic1Uniform, &w, &m, &all, Some(&arrival))
                .unwrap();
        got += out.iter().map(|i| w[i]).sum::<f64>();
        best += w.iter().cloned().fold(0.0, f64::max);
    }
    let ratio = got / best;
    let c = std::f64::consts::E.recip();
    ensure(ratio >= c - 0.03, || format!("competitiveness {ratio}"))?;

    let inst = gen_kuniform_allactive(n, 1).unwrap();
    let p = inst.prior().unwrap();
    let cfg = LpBuildConfig::new(FLOOR_EPS, Some(0.2), ColumnMode::Exact);
    let (scheme, _) =
        build_secretary_reduction(&m, &p, SecretaryAlg::Classic1Uniform, c, &cfg, &mut r).unwrap();
    let report = estimate_balancedness(&m, &scheme, &p, 100_000, CI_LEVEL, 11).unwrap();
    let floor = (1.0 - FLOOR_EPS) * c * 0.2;
    let margin = min_margin(&report, floor)?;
    ensure(margin >= 0.0, || {
        format!("reduction short of {floor} by {:e}", -margin)
    })?;
    Ok(format!(
        "competitiveness {ratio:.4}, reduction min {:.4} vs floor {floor:.4}",
        report.min_estimate.unwrap()
    ))
}

fn alpha_monotone() -> Check {
    let mut cases: Vec<Case> = battery(0)
        .into_iter()
        .filter(|c| c.matroid.n() <= 6)
        .collect();
    let mut r = rng(12);
    while cases.len() < 5 {
        let n = 6;
        cases.push(Case {
            name: format!("random n={n}"),
            matroid: random_matroid(n, &mut r),
            prior: random_covering_prior(n, &mut r),
        });
    }
    let mut checked = 0;
    for case in &cases {
        let base = case.alpha_star();
        for s in SubsetMask::all(case.matroid.n()) {
            let marg = case.prior.marginal(&s).unwrap();
            let a = max_uncontentious_alpha_exact(&case.matroid, &marg)
                .unwrap()
                .alpha_star;
            let b = max_uncontentious_alpha_exact(&case.matroid.restrict(&s).unwrap(), &marg)
                .unwrap()
                .alpha_star;
            ensure(a >= base && b >= base, || {
                format!("{}: S={s:?} gives {a}, {b} < {base}", case.name)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{} instances, {checked} subsets", cases.len()))
}

fn rank_inequality(cases: &[Case]) -> Check {
    let mut r = rng(13);
    let mut worst: Option<f64> = None;
    for case in cases {
        let alpha = case.alpha_star();
        let n = case.matroid.n();
        for _ in 0..100 {
            let w: Vec<BigRational> = (0..n).map(|_| q(r.gen_range(0..50), 1)).collect();
            let (rank, weight) = expected_rank_and_weight(&case.matroid, &case.prior, &w).unwrap();
            let gap = rank - alpha.clone() * weight;
            ensure(!gap.is_neg(), || format!("{}: gap {gap}", case.name))?;
            let g = gap.as_f64();
            worst = Some(worst.map_or(g, |v| v.min(g)));
        }
    }
    Ok(format!(
        "{} instances x 100 weights, min gap {:.4}",
        cases.len(),
        worst.unwrap_or(0.0)
    ))
}

fn reproducible_cli() -> Check {
    let run = |dir: &std::path::Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_ocrs"))
            .args([
                "evaluate",
                "--scheme",
                "sentinel-prefix",
                "--instance",
                "kuniform:4,2",
                "--trials",
                "100000",
                "--seed",
                "7",
            ])
            .arg("--out")
            .arg(dir)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.success(), || {
            format!("evaluate exited with {status}")
        })?;
        std::fs::read(dir.join("report.csv")).map_err(|e| e.to_string())
    };
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (x, y) = (run(a.path())?, run(b.path())?);
    ensure(x == y, || "reports differ".into())?;
    Ok(format!("{} identical bytes", x.len()))
}

fn main() -> ExitCode {
    let cases = battery(12);
    let criteria: Vec<Criterion<'_>> = vec![
        ("matroid axioms", Box::new(axioms)),
        ("greedy weighted rank is exact", Box::new(weighted_rank)),
        ("sentinel prefix law", Box::new(prefix_law)),
        ("prefix-weighted knapsack bound", Box::new(knapsack)),
        (
            "exact preselection completes at alpha*",
            Box::new(|| exact_preselection(&cases)),
        ),
        (
            "sentinel-prefix tight instance",
            Box::new(sentinel_prefix_tight),
        ),
        (
            "independent-subsample tight instance",
            Box::new(independent_subsample_tight),
        ),
        (
            "universality floors",
            Box::new(|| universality_floors(&cases)),
        ),
        ("LP-optimal mixture", Box::new(lp_optimal)),
        (
            "secretary reduction with greedy",
            Box::new(secretary_greedy),
        ),
        (
            "secretary reduction with classic rule",
            Box::new(secretary_classic),
        ),
        (
            "alpha* monotone under restriction",
            Box::new(alpha_monotone),
        ),
        (
            "expected weighted rank bound",
            Box::new(|| rank_inequality(&cases)),
        ),
        ("reproducible CLI reports", Box::new(reproducible_cli)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
