//! Shared fixtures for the benchmarks.

use ocrs_core::harness::{
    gen_kuniform_allactive, gen_parallel_hats, gen_parallel_hats_with, Instance,
};
use ocrs_core::sim::shard_rng;
use ocrs_core::{Matroid, Prior, SimRng};

pub struct Fixture {
    pub matroid: Matroid,
    pub prior: Prior,
    pub alpha: f64,
}

fn load(inst: Instance) -> Fixture {
    Fixture {
        matroid: inst.matroid().expect("generated matroid"),
        prior: inst.prior().expect("generated prior"),
        alpha: inst.declared_alpha,
    }
}

/// The 37-edge parallel-hats graph at level 1/2.
pub fn hats() -> Fixture {
    load(gen_parallel_hats(0.5).expect("valid level"))
}

/// The 7-edge truncated parallel-hats graph.
pub fn small_hats() -> Fixture {
    load(gen_parallel_hats_with(0.5, 2).expect("valid level"))
}

pub fn kuniform(n: usize, k: usize) -> Fixture {
    load(gen_kuniform_allactive(n, k).expect("valid k"))
}

pub fn rng(seed: u64) -> SimRng {
    shard_rng(seed, 0)
}
