//! Order preselection: the backward loop choosing `π(n), π(n-1), .., π(1)`.
//!
//! Two statistics drive the loop. The independent variant asks that `j` escape
//! the span of an independent `ρ`-subsample of the active set; the prefix
//! variant asks that `j` escape the span of the active elements preceding it in
//! a uniformly random order of the remaining elements.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;
use crate::matroid::Matroid;
use crate::numeric::binomial;
use crate::permutation::Permutation;
use crate::prior::Prior;
use crate::sim::{shard_rng, SHARDS};
use crate::subsample::t_rho;

/// Slack applied to exact-mode thresholds against float round-off.
pub const EXACT_SLACK: f64 = 1e-9;
/// Largest active set whose subsamples the exact mode enumerates.
pub const EXACT_ATOM_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreselectVariant {
    Independent,
    Prefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreselectConfig {
    pub alpha: f64,
    pub eps: f64,
    pub mode: EstimationMode,
    pub sample_override: Option<u64>,
}

impl PreselectConfig {
    pub fn new(alpha: f64, eps: f64, mode: EstimationMode) -> Self {
        Self {
            alpha,
            eps,
            mode,
            sample_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(OcrsError::InvalidParameter(format!(
                "alpha {} outside (0, 1]",
                self.alpha
            )));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(OcrsError::InvalidParameter(format!(
                "eps {} outside (0, 1]",
                self.eps
            )));
        }
        if self.sample_override == Some(0) {
            return Err(OcrsError::InvalidParameter(
                "sample count must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `ceil(128 ln(4n/ε) / (α² ε² p_min))`, or the override.
    pub fn sample_size(&self, n: usize, p_min: f64) -> u64 {
        if let Some(m) = self.sample_override {
            return m;
        }
        let (a, e) = (self.alpha, self.eps);
        (128.0 * (4.0 * n.max(1) as f64 / e).ln() / (a * a * e * e * p_min)).ceil() as u64
    }
}

/// `active[j]`: samples with `j` active; `not_spanned[j]`: of those, samples where `j` escaped the span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanStats {
    pub samples: u64,
    pub active: Vec<u64>,
    pub not_spanned: Vec<u64>,
}

impl SpanStats {
    fn new(n: usize) -> Self {
        Self {
            samples: 0,
            active: vec![0; n],
            not_spanned: vec![0; n],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        for (a, b) in self.active.iter_mut().zip(other.active) {
            *a += b;
        }
        for (a, b) in self.not_spanned.iter_mut().zip(other.not_spanned) {
            *a += b;
        }
        self
    }

    pub fn ratio(&self, j: usize) -> Option<f64> {
        (self.active[j] > 0).then(|| self.not_spanned[j] as f64 / self.active[j] as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    /// Position being filled, counting from 1.
    pub position: usize,
    pub chosen: usize,
    /// `None` for a never-active element placed without a statistic.
    pub statistic: Option<f64>,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preselection {
    pub order: Permutation,
    pub variant: PreselectVariant,
    pub mode: EstimationMode,
    pub samples_per_step: u64,
    pub steps: Vec<StepRecord>,
}

fn sharded_stats<F>(n: usize, samples: u64, seed: u64, body: F) -> SpanStats
where
    F: Fn(&mut crate::SimRng, &mut SpanStats) + Sync,
{
    let per = samples / SHARDS;
    let extra = samples % SHARDS;
    (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = shard_rng(seed, shard);
            let mut stats = SpanStats::new(n);
            let count = per + u64::from(shard < extra);
            for _ in 0..count {
                body(&mut rng, &mut stats);
            }
            stats.samples = count;
            stats
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(SpanStats::new(n), SpanStats::merge)
}

/// Counts, over `m` draws of `A`, how often each `j ∈ A ∩ S_i` is outside the
/// span of a basis of `T_ρ(A) ∩ S_i`.
pub fn count_span_stats_independent<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    s_i: &SubsetMask,
    rho: f64,
    m: u64,
    rng: &mut R,
) -> Result<SpanStats> {
    check_inputs(matroid, prior, s_i)?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(OcrsError::InvalidParameter(format!(
            "rho {rho} outside [0, 1]"
        )));
    }
    Ok(sharded_stats(matroid.n(), m, rng.gen(), |rng, stats| {
        let a = prior.sample(rng).intersection(s_i);
        let b = t_rho(&a, rho, rng).expect("rho checked");
        let mut g = matroid.greedy();
        for e in b.iter() {
            g.try_add(e);
        }
        for j in a.iter() {
            stats.active[j] += 1;
            if g.can_add(j) {
                stats.not_spanned[j] += 1;
            }
        }
    }))
}

/// Counts, over `m` joint draws of `A` and a uniform order `σ` of `S_i`, how
/// often each `j ∈ A ∩ S_i` is outside the span of `A ∩ prefix(σ, j)`.
pub fn count_span_stats_prefix<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    s_i: &SubsetMask,
    m: u64,
    rng: &mut R,
) -> Result<SpanStats> {
    check_inputs(matroid, prior, s_i)?;
    let elements = s_i.to_vec();
    Ok(sharded_stats(matroid.n(), m, rng.gen(), |rng, stats| {
        let a = prior.sample(rng);
        let mut sigma = elements.clone();
        sigma.shuffle(rng);
        let mut g = matroid.greedy();
        for j in sigma.into_iter().filter(|&j| a.contains(j)) {
            stats.active[j] += 1;
            // The greedy set is a basis of the active prefix, so `j` escapes
            // its span exactly when it can be added.
            if g.try_add(j) {
                stats.not_spanned[j] += 1;
            }
        }
    }))
}

fn check_inputs(matroid: &Matroid, prior: &Prior, s: &SubsetMask) -> Result<()> {
    for got in [prior.n(), s.n()] {
        if got != matroid.n() {
            return Err(OcrsError::DimensionMismatch {
                expected: matroid.n(),
                got,
            });
        }
    }
    Ok(())
}

fn activation(prior: &Prior, s_i: &SubsetMask, support: &[(SubsetMask, f64)]) -> Vec<f64> {
    let mut x = vec![0.0; prior.n()];
    for (a, p) in support {
        for j in a.intersection(s_i).iter() {
            x[j] += p;
        }
    }
    x
}

fn float_support(prior: &Prior) -> Result<Vec<(SubsetMask, f64)>> {
    Ok(prior
        .support()?
        .into_iter()
        .map(|(a, p)| (a, num_traits::ToPrimitive::to_f64(&p).unwrap_or(0.0)))
        .collect())
}

fn check_atom(size: usize) -> Result<()> {
    if size > EXACT_ATOM_LIMIT {
        return Err(OcrsError::TooLarge {
            what: "active set for exact enumeration",
            size,
            limit: EXACT_ATOM_LIMIT,
        });
    }
    Ok(())
}

/// Exact `Pr[j ∉ span(T_ρ(A ∩ S_i)) | j ∈ A]` for each `j ∈ S_i`; `None` when `j` is never active.
pub fn exact_stats_independent(
    matroid: &Matroid,
    prior: &Prior,
    s_i: &SubsetMask,
    rho: f64,
) -> Result<Vec<Option<f64>>> {
    check_inputs(matroid, prior, s_i)?;
    let support = float_support(prior)?;
    let x = activation(prior, s_i, &support);
    let mut hit = vec![0.0; matroid.n()];
    for (a, p) in &support {
        let a = a.intersection(s_i);
        check_atom(a.cardinality())?;
        let size = a.cardinality() as i32;
        for u in a.subsets() {
            let k = u.cardinality() as i32;
            let w = p * rho.powi(k) * (1.0 - rho).powi(size - k);
            if w == 0.0 {
                continue;
            }
            let mut g = matroid.greedy();
            for e in u.iter() {
                g.try_add(e);
            }
            for j in a.iter() {
                if g.can_add(j) {
                    hit[j] += w;
                }
            }
        }
    }
    Ok(conditional(s_i, &hit, &x))
}

/// Exact `Pr[j ∉ span(A ∩ prefix(σ, j)) | j ∈ A]` with `σ` uniform over orders of `S_i`.
///
/// `prefix(σ, j)` has a uniform size `k ∈ {0..s-1}` and is a uniform `k`-subset of
/// `S_i - j`, so `Pr[prefix = P] = 1 / (s · C(s-1, |P|))`. Only `A ∩ prefix` matters;
/// its law sums that weight over the inactive part of the prefix.
pub fn exact_stats_prefix(
    matroid: &Matroid,
    prior: &Prior,
    s_i: &SubsetMask,
) -> Result<Vec<Option<f64>>> {
    check_inputs(matroid, prior, s_i)?;
    let support = float_support(prior)?;
    let x = activation(prior, s_i, &support);
    let s = s_i.cardinality();
    let mut hit = vec![0.0; matroid.n()];
    for (a, p) in &support {
        let a = a.intersection(s_i);
        check_atom(a.cardinality())?;
        if a.is_empty() {
            continue;
        }
        let others = a.cardinality() - 1;
        let rest = s - 1 - others;
        // law[q]: probability that the prefix meets the active others in a given q-set.
        let law: Vec<f64> = (0..=others)
            .map(|q| {
                (0..=rest)
                    .map(|t| binomial(rest, t) as f64 / (s as f64 * binomial(s - 1, q + t) as f64))
                    .sum()
            })
            .collect();
        for j in a.iter() {
            let pool = a.without(j);
            for q in pool.subsets() {
                let mut g = matroid.greedy();
                for e in q.iter() {
                    g.try_add(e);
                }
                if g.can_add(j) {
                    hit[j] += p * law[q.cardinality()];
                }
            }
        }
    }
    Ok(conditional(s_i, &hit, &x))
}

fn conditional(s_i: &SubsetMask, hit: &[f64], x: &[f64]) -> Vec<Option<f64>> {
    (0..hit.len())
        .map(|j| (s_i.contains(j) && x[j] > 0.0).then(|| hit[j] / x[j]))
        .collect()
}

pub fn preselect_independent<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    cfg: &PreselectConfig,
    rng: &mut R,
) -> Result<Preselection> {
    preselect(matroid, prior, cfg, PreselectVariant::Independent, rng)
}

pub fn preselect_prefix<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    cfg: &PreselectConfig,
    rng: &mut R,
) -> Result<Preselection> {
    preselect(matroid, prior, cfg, PreselectVariant::Prefix, rng)
}

/// Fills positions `n, n-1, .., 1`, each time choosing the lowest-index element of
/// the remaining set whose statistic meets the threshold.
pub fn preselect<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    cfg: &PreselectConfig,
    variant: PreselectVariant,
    rng: &mut R,
) -> Result<Preselection> {
    cfg.validate()?;
    let n = matroid.n();
    if prior.n() != n {
        return Err(OcrsError::DimensionMismatch {
            expected: n,
            got: prior.n(),
        });
    }
    let rho = cfg.alpha / 2.0;
    let target = match variant {
        PreselectVariant::Independent => rho,
        PreselectVariant::Prefix => cfg.alpha,
    };
    let samples = match cfg.mode {
        EstimationMode::Exact => 0,
        EstimationMode::MonteCarlo => {
            let p_min = prior.p_min_or_estimate(cfg.eps, rng)?;
            cfg.sample_size(n, p_min)
        }
    };
    let (mc_threshold, exact_threshold) = ((1.0 - cfg.eps / 4.0) * target, target - EXACT_SLACK);

    let mut remaining = SubsetMask::full(n);
    let mut order = vec![usize::MAX; n];
    let mut steps = Vec::with_capacity(n);
    for position in (1..=n).rev() {
        let stats: Vec<Option<f64>> = match (cfg.mode, variant) {
            (EstimationMode::Exact, PreselectVariant::Independent) => {
                exact_stats_independent(matroid, prior, &remaining, rho)?
            }
            (EstimationMode::Exact, PreselectVariant::Prefix) => {
                exact_stats_prefix(matroid, prior, &remaining)?
            }
            (EstimationMode::MonteCarlo, v) => {
                let counts = match v {
                    PreselectVariant::Independent => {
                        count_span_stats_independent(matroid, prior, &remaining, rho, samples, rng)?
                    }
                    PreselectVariant::Prefix => {
                        count_span_stats_prefix(matroid, prior, &remaining, samples, rng)?
                    }
                };
                (0..n).map(|j| counts.ratio(j)).collect()
            }
        };
        let threshold = match cfg.mode {
            EstimationMode::Exact => exact_threshold,
            EstimationMode::MonteCarlo => mc_threshold,
        };
        let mut chosen = remaining
            .iter()
            .find(|&j| stats[j].is_some_and(|s| s >= threshold));
        // Elements with zero activation are never selected, so their position is free.
        if chosen.is_none() && cfg.mode == EstimationMode::Exact {
            chosen = remaining.iter().find(|&j| stats[j].is_none());
        }
        let Some(j) = chosen else {
            return Err(OcrsError::NoQualifyingElement {
                step: position,
                partial: order[position..].to_vec(),
            });
        };
        order[position - 1] = j;
        remaining.remove(j);
        steps.push(StepRecord {
            position,
            chosen: j,
            statistic: stats[j],
            threshold,
        });
    }
    Ok(Preselection {
        order: Permutation::from_order(order)?,
        variant,
        mode: cfg.mode,
        samples_per_step: samples,
        steps,
    })
}
