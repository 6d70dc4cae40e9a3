//! The column-generation loop shared by the permutation LP and the secretary reduction.
//!
//! Each iteration solves the restricted LP over the columns found so far, asks a
//! separation routine for the column best aligned with the dual `μ`, and stops
//! once that column no longer violates the dual bound `Σ_i q_i μ_i <= γ`.

use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{coefficient_sample_size, estimate_xq, solve_restricted, LpSolution, WeightGrid};
use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;
use crate::matroid::Matroid;
use crate::numeric::ln_factorial;
use crate::oracle::exact_selection;
use crate::permutation::Permutation;
use crate::prior::Prior;
use crate::scheme::{greedy_ordered, secretary_wrap, Scheme, SecretaryAlg};

/// Columns per ground-set element before the loop gives up.
pub const COLUMNS_PER_ELEMENT: usize = 50;
/// Mixture weights at or below this are dropped from the emitted scheme.
const LAMBDA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnMode {
    /// Coefficients by full enumeration of an explicit support.
    Exact,
    /// Coefficients estimated by sampling.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpBuildConfig {
    pub eps: f64,
    /// Uncontentiousness level the build aims for; required for sampling-based columns.
    pub alpha: Option<f64>,
    pub mode: ColumnMode,
    pub max_columns: Option<usize>,
}

impl LpBuildConfig {
    pub fn new(eps: f64, alpha: Option<f64>, mode: ColumnMode) -> Self {
        Self {
            eps,
            alpha,
            mode,
            max_columns: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(OcrsError::InvalidParameter(format!(
                "eps {} outside (0, 1)",
                self.eps
            )));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(OcrsError::InvalidParameter(format!(
                    "alpha {a} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }

    fn alpha_for_sampling(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| {
            OcrsError::InvalidParameter("sampled columns need a target alpha".into())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnId {
    Order(Permutation),
    /// Grid indices of a weight vector.
    GridWeights(Vec<u64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnRecord {
    pub id: ColumnId,
    pub weights: Option<Vec<f64>>,
    pub q: Vec<f64>,
}

/// How the single user-facing `eps` is split across the build.
#[derive(Debug, Clone, Serialize)]
pub struct EpsBudget {
    pub eps: f64,
    /// `eps / parts`: the share given to each source of loss.
    pub eps_prime: f64,
    pub parts: u32,
    pub eta: Option<f64>,
    pub ln_delta: Option<f64>,
    pub samples_per_column: Option<u64>,
    pub grid: Option<WeightGrid>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildReport {
    pub mode: ColumnMode,
    pub x_tilde: Vec<f64>,
    pub columns: Vec<ColumnRecord>,
    pub beta_trajectory: Vec<f64>,
    pub gamma_trajectory: Vec<f64>,
    pub solution: LpSolution,
    /// `Σ_i q_i μ_i` of the last separated column; at convergence at most `γ + tolerance`.
    pub separation_value: f64,
    pub tolerance: f64,
    pub converged: bool,
    pub cap_reached: bool,
    pub budget: EpsBudget,
}

struct Generated<Id> {
    ids: Vec<Id>,
    qs: Vec<Vec<f64>>,
    solution: LpSolution,
    betas: Vec<f64>,
    gammas: Vec<f64>,
    separation_value: f64,
    tolerance: f64,
    converged: bool,
    cap_reached: bool,
}

fn generate<Id, E, S>(
    x: &[f64],
    initial: Id,
    cap: usize,
    eps: f64,
    alpha: Option<f64>,
    mut evaluate: E,
    mut separate: S,
) -> Result<Generated<Id>>
where
    Id: Clone + Eq + Hash,
    E: FnMut(&Id) -> Result<Vec<f64>>,
    S: FnMut(&[f64]) -> Result<Id>,
{
    let mut cache: HashMap<Id, Vec<f64>> = HashMap::new();
    let mut lookup = |id: &Id, cache: &mut HashMap<Id, Vec<f64>>| -> Result<Vec<f64>> {
        if let Some(q) = cache.get(id) {
            return Ok(q.clone());
        }
        let q = evaluate(id)?;
        cache.insert(id.clone(), q.clone());
        Ok(q)
    };
    let mut ids = vec![initial.clone()];
    let mut qs = vec![lookup(&initial, &mut cache)?];
    let (mut betas, mut gammas) = (Vec::new(), Vec::new());
    loop {
        let solution = solve_restricted(&qs, x)?;
        betas.push(solution.beta);
        gammas.push(solution.gamma);
        let tolerance = 1e-6f64.min(eps * alpha.unwrap_or(solution.gamma) / 10.0);
        let candidate = separate(&solution.mu)?;
        let q = lookup(&candidate, &mut cache)?;
        let value: f64 = q.iter().zip(&solution.mu).map(|(a, b)| a * b).sum();
        let done = value <= solution.gamma + tolerance || ids.contains(&candidate);
        let cap_reached = !done && ids.len() >= cap;
        if done || cap_reached {
            return Ok(Generated {
                ids,
                qs,
                solution,
                betas,
                gammas,
                separation_value: value,
                tolerance,
                converged: done,
                cap_reached,
            });
        }
        ids.push(candidate);
        qs.push(q);
    }
}

fn mixture<T: Clone>(items: &[T], lambda: &[f64]) -> Vec<(T, f64)> {
    let kept: Vec<(T, f64)> = items
        .iter()
        .zip(lambda)
        .filter(|(_, &l)| l > LAMBDA_FLOOR)
        .map(|(t, &l)| (t.clone(), l))
        .collect();
    let total: f64 = kept.iter().map(|(_, l)| l).sum();
    kept.into_iter().map(|(t, l)| (t, l / total)).collect()
}

fn float_support(prior: &Prior) -> Result<Vec<(SubsetMask, f64)>> {
    Ok(prior
        .support()?
        .into_iter()
        .map(|(a, p)| (a, num_traits::ToPrimitive::to_f64(&p).unwrap_or(0.0)))
        .collect())
}

fn check_dims(matroid: &Matroid, prior: &Prior) -> Result<usize> {
    let n = matroid.n();
    if prior.n() != n {
        return Err(OcrsError::DimensionMismatch {
            expected: n,
            got: prior.n(),
        });
    }
    if n == 0 {
        return Err(OcrsError::InvalidParameter("empty ground set".into()));
    }
    Ok(n)
}

/// `ln(k + 1)` for `ln_k = ln k`, stable for huge `k`.
fn ln_plus_one(ln_k: f64) -> f64 {
    ln_k + (-ln_k).exp().ln_1p()
}

/// Builds an LP-optimal mixture of greedy orders.
///
/// Starts from the order of decreasing activation and separates with the order of
/// decreasing dual weight. In sampling mode one sample size serves every column:
/// `η = α·eps/6` and `δ = (eps/6) / (n (n! + 1))`.
pub fn build_lp_scheme<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    cfg: &LpBuildConfig,
    rng: &mut R,
) -> Result<(Scheme, BuildReport)> {
    cfg.validate()?;
    let n = check_dims(matroid, prior)?;
    let eps_prime = cfg.eps / 6.0;
    let mut budget = EpsBudget {
        eps: cfg.eps,
        eps_prime,
        parts: 6,
        eta: None,
        ln_delta: None,
        samples_per_column: None,
        grid: None,
    };
    let cap = cfg.max_columns.unwrap_or(COLUMNS_PER_ELEMENT * n);

    let generated = match cfg.mode {
        ColumnMode::Exact => {
            let support = float_support(prior)?;
            let x = prior
                .activation()
                .expect("explicit support has activations");
            let g = generate(
                &x,
                Permutation::by_weight(&x),
                cap,
                cfg.eps,
                cfg.alpha,
                |pi: &Permutation| {
                    exact_selection(
                        matroid,
                        &Scheme::GreedyOrdered { order: pi.clone() },
                        &support,
                    )
                },
                |mu| Ok(Permutation::by_weight(mu)),
            )?;
            (x, g)
        }
        ColumnMode::MonteCarlo => {
            let alpha = cfg.alpha_for_sampling()?;
            let p_min = prior.p_min_or_estimate(cfg.eps, rng)?;
            let eta = eps_prime * alpha;
            let ln_delta = eps_prime.ln() - (n as f64).ln() - ln_plus_one(ln_factorial(n));
            let m = coefficient_sample_size(eta, ln_delta, p_min)?;
            budget.eta = Some(eta);
            budget.ln_delta = Some(ln_delta);
            budget.samples_per_column = Some(m);
            let (x, _) = estimate_xq(prior, m, rng, |a, _| SubsetMask::empty(a.n()));
            let g = generate(
                &x,
                Permutation::by_weight(&x),
                cap,
                cfg.eps,
                cfg.alpha,
                |pi: &Permutation| {
                    Ok(estimate_xq(prior, m, rng, |a, _| greedy_ordered(matroid, pi, a)).1)
                },
                |mu| Ok(Permutation::by_weight(mu)),
            )?;
            (x, g)
        }
    };
    let (x, g) = generated;
    let scheme = Scheme::PermutationMixture {
        components: mixture(&g.ids, &g.solution.lambda),
    };
    let columns = g
        .ids
        .iter()
        .zip(&g.qs)
        .map(|(id, q)| ColumnRecord {
            id: ColumnId::Order(id.clone()),
            weights: None,
            q: q.clone(),
        })
        .collect();
    Ok((scheme, report(cfg.mode, x, columns, g, budget)))
}

fn report<Id>(
    mode: ColumnMode,
    x_tilde: Vec<f64>,
    columns: Vec<ColumnRecord>,
    g: Generated<Id>,
    budget: EpsBudget,
) -> BuildReport {
    BuildReport {
        mode,
        x_tilde,
        columns,
        beta_trajectory: g.betas,
        gamma_trajectory: g.gammas,
        solution: g.solution,
        separation_value: g.separation_value,
        tolerance: g.tolerance,
        converged: g.converged,
        cap_reached: g.cap_reached,
        budget,
    }
}

/// Builds a mixture over weight vectors fed to a secretary algorithm `alg` that is
/// `c`-competitive. Dual weights are floored onto the grid with spacing
/// `(eps/7)/n`; in sampling mode `η = c·α·eps/7` and `δ = (eps/7) / (n (|W|^n + 1))`.
pub fn build_secretary_reduction<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    alg: SecretaryAlg,
    c: f64,
    cfg: &LpBuildConfig,
    rng: &mut R,
) -> Result<(Scheme, BuildReport)> {
    cfg.validate()?;
    if !(c > 0.0 && c <= 1.0) {
        return Err(OcrsError::InvalidParameter(format!(
            "competitive ratio {c} outside (0, 1]"
        )));
    }
    let n = check_dims(matroid, prior)?;
    let eps_prime = cfg.eps / 7.0;
    let cap = cfg.max_columns.unwrap_or(COLUMNS_PER_ELEMENT * n);

    let (x, samples, p_min, support) = match cfg.mode {
        ColumnMode::Exact => {
            let x = prior
                .activation()
                .expect("explicit support has activations");
            let p_min = prior.p_min().unwrap_or(1.0);
            (x, None, p_min, Some(float_support(prior)?))
        }
        ColumnMode::MonteCarlo => {
            let p_min = prior.p_min_or_estimate(cfg.eps, rng)?;
            (Vec::new(), Some(()), p_min, None)
        }
    };
    let grid = WeightGrid::new(eps_prime, p_min, n)?;
    let mut budget = EpsBudget {
        eps: cfg.eps,
        eps_prime,
        parts: 7,
        eta: None,
        ln_delta: None,
        samples_per_column: None,
        grid: Some(grid),
    };
    let (x, m) = match samples {
        None => (x, 0),
        Some(()) => {
            let alpha = cfg.alpha_for_sampling()?;
            let eta = eps_prime * c * alpha;
            let ln_grid_power = n as f64 * (grid.len() as f64).ln();
            let ln_delta = eps_prime.ln() - (n as f64).ln() - ln_plus_one(ln_grid_power);
            let m = coefficient_sample_size(eta, ln_delta, p_min)?;
            budget.eta = Some(eta);
            budget.ln_delta = Some(ln_delta);
            budget.samples_per_column = Some(m);
            (
                estimate_xq(prior, m, rng, |a, _| SubsetMask::empty(a.n())).0,
                m,
            )
        }
    };

    let total_x: f64 = x.iter().sum();
    if total_x <= 0.0 {
        return Err(OcrsError::InvalidParameter(
            "no element is ever active".into(),
        ));
    }
    let uniform: Vec<f64> = x
        .iter()
        .map(|&xi| if xi > 0.0 { 1.0 / total_x } else { 0.0 })
        .collect();
    let initial = grid.round_indices(&uniform)?;
    let weights_of = |ids: &[u64]| -> Vec<f64> { ids.iter().map(|&i| grid.value(i)).collect() };

    let g = generate(
        &x,
        initial,
        cap,
        cfg.eps,
        cfg.alpha.map(|a| c * a),
        |ids: &Vec<u64>| {
            let w = weights_of(ids);
            match &support {
                Some(support) => exact_selection(
                    matroid,
                    &Scheme::WeightMixture {
                        secretary: alg,
                        components: vec![(w, 1.0)],
                    },
                    support,
                ),
                None => Ok(estimate_xq(prior, m, rng, |a, r| {
                    let arrival = alg.arrival(&w, r);
                    secretary_wrap(alg, &w, matroid, a, Some(&arrival))
                        .expect("grid weights are valid")
                })
                .1),
            }
        },
        |mu| grid.round_indices(mu),
    )?;
    let weight_vectors: Vec<Vec<f64>> = g.ids.iter().map(|ids| weights_of(ids)).collect();
    let scheme = Scheme::WeightMixture {
        secretary: alg,
        components: mixture(&weight_vectors, &g.solution.lambda),
    };
    let columns = g
        .ids
        .iter()
        .zip(&g.qs)
        .zip(&weight_vectors)
        .map(|((id, q), w)| ColumnRecord {
            id: ColumnId::GridWeights(id.clone()),
            weights: Some(w.clone()),
            q: q.clone(),
        })
        .collect();
    Ok((scheme, report(cfg.mode, x, columns, g, budget)))
}
