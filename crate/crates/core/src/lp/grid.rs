//! The discretized weight grid `{ eps·i/n : i = 0..=ceil(n/(eps·p_min)) }`.

use serde::Serialize;

use crate::error::{OcrsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightGrid {
    pub eps: f64,
    pub p_min: f64,
    pub n: usize,
    pub max_index: u64,
}

impl WeightGrid {
    pub fn new(eps: f64, p_min: f64, n: usize) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(OcrsError::InvalidParameter(format!(
                "grid eps {eps} outside (0, 1]"
            )));
        }
        if !(p_min > 0.0 && p_min <= 1.0) {
            return Err(OcrsError::InvalidParameter(format!(
                "p_min {p_min} outside (0, 1]"
            )));
        }
        if n == 0 {
            return Err(OcrsError::InvalidParameter(
                "grid over an empty ground set".into(),
            ));
        }
        let max_index = (n as f64 / (eps * p_min) - 1e-9).ceil().max(0.0) as u64;
        Ok(Self {
            eps,
            p_min,
            n,
            max_index,
        })
    }

    pub fn step(&self) -> f64 {
        self.eps / self.n as f64
    }

    pub fn value(&self, index: u64) -> f64 {
        self.eps * index as f64 / self.n as f64
    }

    pub fn max_value(&self) -> f64 {
        self.value(self.max_index)
    }

    pub fn len(&self) -> u64 {
        self.max_index + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest grid index whose value does not exceed `mu`.
    pub fn floor_index(&self, mu: f64) -> Result<u64> {
        if mu.is_nan() || mu < 0.0 {
            return Err(OcrsError::InvalidParameter(format!(
                "cannot round {mu} onto the grid"
            )));
        }
        // Dual solutions may overshoot the grid maximum by solver round-off.
        if mu > self.max_value() * (1.0 + 1e-9) + 1e-12 {
            return Err(OcrsError::InvalidParameter(format!(
                "coordinate {mu} exceeds the grid maximum {}",
                self.max_value()
            )));
        }
        let mut idx = (mu / self.step()).floor() as u64;
        while self.value(idx + 1) <= mu {
            idx += 1;
        }
        while idx > 0 && self.value(idx) > mu {
            idx -= 1;
        }
        Ok(idx.min(self.max_index))
    }

    /// Coordinate-wise floor onto the grid, returned as grid indices.
    pub fn round_indices(&self, mu: &[f64]) -> Result<Vec<u64>> {
        mu.iter().map(|&m| self.floor_index(m)).collect()
    }

    pub fn round_to_grid(&self, mu: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .round_indices(mu)?
            .into_iter()
            .map(|i| self.value(i))
            .collect())
    }
}
