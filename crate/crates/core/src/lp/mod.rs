//! Column generation for LP-optimal mixtures and the secretary reduction.

mod colgen;
mod grid;
pub mod simplex;

pub use colgen::{
    build_lp_scheme, build_secretary_reduction, BuildReport, ColumnId, ColumnMode, ColumnRecord,
    EpsBudget, LpBuildConfig,
};
pub use grid::WeightGrid;

use rand::Rng;
use serde::Serialize;

use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;
use crate::prior::Prior;
use crate::sim::count_selections;
use crate::SimRng;
use simplex::{LinearProgram, Relation};

/// Primal/dual pair of the restricted LP.
#[derive(Debug, Clone, Serialize)]
pub struct LpSolution {
    pub beta: f64,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub gamma: f64,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        self.gamma - self.beta
    }
}

/// Solves `max beta : sum_c q[c][i] λ_c >= beta x_i (x_i > 0), sum λ = 1, λ >= 0`
/// and its dual `min gamma : sum_i q[c][i] μ_i <= gamma, sum x_i μ_i = 1, μ >= 0`.
pub fn solve_restricted(columns: &[Vec<f64>], x: &[f64]) -> Result<LpSolution> {
    let n = x.len();
    if columns.is_empty() {
        return Err(OcrsError::InvalidParameter(
            "restricted LP needs a column".into(),
        ));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(OcrsError::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    let active: Vec<usize> = (0..n).filter(|&i| x[i] > 0.0).collect();
    if active.is_empty() {
        return Err(OcrsError::InvalidParameter(
            "no element is ever active".into(),
        ));
    }
    let k = columns.len();

    let mut objective = vec![0.0; k + 1];
    objective[k] = 1.0;
    let mut primal = LinearProgram::new(objective);
    for &i in &active {
        let mut row: Vec<f64> = columns.iter().map(|c| -c[i]).collect();
        row.push(x[i]);
        primal.constrain(row, Relation::Le, 0.0);
    }
    let mut simplex_row = vec![1.0; k];
    simplex_row.push(0.0);
    primal.constrain(simplex_row, Relation::Eq, 1.0);
    let p = primal.maximize()?;

    let m = active.len();
    let mut objective = vec![0.0; m + 1];
    objective[m] = -1.0;
    let mut dual = LinearProgram::new(objective);
    for c in columns {
        let mut row: Vec<f64> = active.iter().map(|&i| c[i]).collect();
        row.push(-1.0);
        dual.constrain(row, Relation::Le, 0.0);
    }
    let mut norm: Vec<f64> = active.iter().map(|&i| x[i]).collect();
    norm.push(0.0);
    dual.constrain(norm, Relation::Eq, 1.0);
    let d = dual.maximize()?;

    let mut mu = vec![0.0; n];
    for (slot, &i) in active.iter().enumerate() {
        mu[i] = d.x[slot];
    }
    let sol = LpSolution {
        beta: p.value,
        lambda: p.x[..k].to_vec(),
        mu,
        gamma: -d.value,
    };
    if sol.duality_gap().abs() > 1e-7 {
        return Err(OcrsError::NumericalDegeneracy(format!(
            "restricted primal {} and dual {} disagree",
            sol.beta, sol.gamma
        )));
    }
    Ok(sol)
}

/// Sample count `ceil(2 ln(2/δ) / (η² p_min²))`, taking `ln δ` so tiny failure
/// probabilities do not underflow.
pub fn coefficient_sample_size(eta: f64, ln_delta: f64, p_min: f64) -> Result<u64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(OcrsError::InvalidParameter(format!(
            "eta {eta} outside (0, 1)"
        )));
    }
    if ln_delta.is_nan() || ln_delta >= 0.0 {
        return Err(OcrsError::InvalidParameter(format!(
            "ln delta {ln_delta} must be negative"
        )));
    }
    if !(p_min > 0.0 && p_min <= 1.0) {
        return Err(OcrsError::InvalidParameter(format!(
            "p_min {p_min} outside (0, 1]"
        )));
    }
    let m = (2.0 * (std::f64::consts::LN_2 - ln_delta) / (eta * eta * p_min * p_min)).ceil();
    if !(m.is_finite() && m < u64::MAX as f64) {
        return Err(OcrsError::InvalidParameter(format!(
            "sample size {m} is not representable"
        )));
    }
    Ok(m as u64)
}

/// Empirical activation rates `x̃` and selection rates `q̃` of a scheme over `samples` draws.
pub fn estimate_xq<F, R>(prior: &Prior, samples: u64, rng: &mut R, run: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&SubsetMask, &mut SimRng) -> SubsetMask + Sync,
    R: Rng,
{
    let counts = count_selections(prior, samples, rng.gen(), run);
    let m = samples.max(1) as f64;
    (
        counts.active.iter().map(|&c| c as f64 / m).collect(),
        counts.selected.iter().map(|&c| c as f64 / m).collect(),
    )
}

/// Elements by decreasing `mu`, ties in ascending index.
pub fn separation_pi_mu(mu: &[f64]) -> crate::Permutation {
    crate::Permutation::by_weight(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sample_size_example() {
        assert_eq!(
            coefficient_sample_size(0.1, 0.01f64.ln(), 0.5).unwrap(),
            4239
        );
        assert!(coefficient_sample_size(0.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn single_matching_column() {
        let sol = solve_restricted(&[vec![0.3, 0.5]], &[0.3, 0.5]).unwrap();
        assert!((sol.beta - 1.0).abs() < 1e-9);
        assert!((sol.lambda[0] - 1.0).abs() < 1e-9);
        let sol = solve_restricted(&[vec![1.0]], &[1.0]).unwrap();
        assert!((sol.beta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_two_columns() {
        let sol = solve_restricted(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 1.0]).unwrap();
        assert!((sol.beta - 0.5).abs() < 1e-9);
        assert!((sol.lambda[0] - 0.5).abs() < 1e-9);
        assert!((sol.gamma - 0.5).abs() < 1e-9);
        assert!((sol.mu[0] - 0.5).abs() < 1e-9 && (sol.mu[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn inactive_elements_are_ignored() {
        let sol = solve_restricted(&[vec![0.5, 0.0]], &[0.5, 0.0]).unwrap();
        assert!((sol.beta - 1.0).abs() < 1e-9);
        assert_eq!(sol.mu[1], 0.0);
        assert!(solve_restricted(&[vec![0.0]], &[0.0]).is_err());
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separation_pi_mu(&[0.2, 0.7, 0.5]).order(), &[1, 2, 0]);
        assert_eq!(separation_pi_mu(&[0.0; 3]).order(), &[0, 1, 2]);
    }

    #[test]
    fn estimate_trivial_schemes() {
        let mut rng = SimRng::seed_from_u64(4);
        let prior = Prior::all_active(3);
        let (x, q) = estimate_xq(&prior, 500, &mut rng, |a, _| SubsetMask::empty(a.n()));
        assert_eq!(x, vec![1.0; 3]);
        assert_eq!(q, vec![0.0; 3]);
    }
}
