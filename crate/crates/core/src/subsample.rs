//! Independent and prefix-based subsampling.

use rand::Rng;

use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;
use crate::permutation::Permutation;

/// Keeps each element of `s` independently with probability `rho`.
pub fn t_rho<R: Rng>(s: &SubsetMask, rho: f64, rng: &mut R) -> Result<SubsetMask> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(OcrsError::InvalidParameter(format!(
            "rho {rho} outside [0, 1]"
        )));
    }
    let mut out = SubsetMask::empty(s.n());
    for e in s.iter() {
        if rng.gen::<f64>() < rho {
            out.insert(e);
        }
    }
    Ok(out)
}

/// Shuffles `n + 1` symbols (the extra symbol `n` is a sentinel) and returns the
/// elements placed before the sentinel.
pub fn prefix_subsample<R: Rng>(n: usize, rng: &mut R) -> SubsetMask {
    let sigma = Permutation::random(n + 1, rng);
    sentinel_prefix(&sigma)
}

/// Elements preceding the sentinel `n` in a permutation of `n + 1` symbols.
pub fn sentinel_prefix(sigma: &Permutation) -> SubsetMask {
    let n = sigma.n() - 1;
    let mut out = SubsetMask::empty(n);
    for &e in sigma.order().iter().take_while(|&&e| e != n) {
        out.insert(e);
    }
    out
}
