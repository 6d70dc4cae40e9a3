#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use ocrs_core::{Matroid, Prior, SimRng, SubsetMask};
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn mask(n: usize, e: &[usize]) -> SubsetMask {
    SubsetMask::from_elements(n, e.iter().copied()).unwrap()
}

pub fn random_mask<R: Rng>(n: usize, rng: &mut R) -> SubsetMask {
    SubsetMask::from_elements(n, (0..n).filter(|_| rng.gen_bool(0.5))).unwrap()
}

/// Random loopless graph on up to `n/2 + 2` vertices with `n` edges, parallel edges allowed.
pub fn random_graphic<R: Rng>(n: usize, rng: &mut R) -> Matroid {
    let vertices = (n / 2 + 2).max(2);
    let edges = (0..n)
        .map(|_| {
            let a = rng.gen_range(0..vertices);
            let mut b = rng.gen_range(0..vertices - 1);
            if b >= a {
                b += 1;
            }
            [a, b]
        })
        .collect();
    Matroid::graphic(vertices, edges).unwrap()
}

/// Uniform or graphic matroid without loops.
pub fn random_matroid<R: Rng>(n: usize, rng: &mut R) -> Matroid {
    if rng.gen_bool(0.4) {
        Matroid::uniform(n, rng.gen_range(1..=n))
    } else {
        random_graphic(n, rng)
    }
}

/// Explicit prior with a few atoms and small-integer rational weights.
pub fn random_prior<R: Rng>(n: usize, rng: &mut R) -> Prior {
    let atoms = rng.gen_range(1..=5);
    let raw: Vec<(SubsetMask, u64)> = (0..atoms)
        .map(|_| (random_mask(n, rng), rng.gen_range(1..=9)))
        .collect();
    let total: u64 = raw.iter().map(|r| r.1).sum();
    Prior::explicit_exact(
        n,
        raw.into_iter()
            .map(|(a, w)| (a, BigRational::new(BigInt::from(w), BigInt::from(total)))),
    )
    .unwrap()
}

pub fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}
