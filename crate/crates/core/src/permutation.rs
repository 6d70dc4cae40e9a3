//! Orders on the ground set.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;
use crate::matroid::order_by_weight;

/// A bijection on `{0, .., n-1}`; `order()[p]` is the element at position `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &e in &order {
            if e >= n {
                return Err(OcrsError::ElementOutOfRange { element: e, n });
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(OcrsError::InvalidParameter(format!(
                    "element {e} repeated in permutation"
                )));
            }
        }
        Ok(Self { order })
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Self { order }
    }

    /// Decreasing weight, equal weights in ascending index.
    pub fn by_weight(w: &[f64]) -> Self {
        Self {
            order: order_by_weight(w),
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, e: usize) -> Option<usize> {
        self.order.iter().position(|&x| x == e)
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((0..n).collect()),
        }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = OcrsError;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Self::from_order(order)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.order
    }
}

pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { order: cur })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Elements strictly before `e` in `sigma`.
pub fn prefix_of(sigma: &Permutation, e: usize) -> Result<SubsetMask> {
    let n = sigma.n();
    let pos = sigma
        .position(e)
        .ok_or(OcrsError::ElementOutOfRange { element: e, n })?;
    SubsetMask::from_elements(n, sigma.order[..pos].iter().copied())
}
