//! Sharded, deterministic Monte-Carlo trial loops.

use rand::SeedableRng;
use rayon::prelude::*;

use crate::mask::SubsetMask;
use crate::prior::Prior;
use crate::SimRng;

/// Trials are split into this many shards regardless of thread count, so
/// results depend only on the seed.
pub const SHARDS: u64 = 64;

/// The rng of one shard: the seed's ChaCha stream number `shard + 1`.
pub fn shard_rng(seed: u64, shard: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(shard + 1);
    rng
}

/// Per-element activation and selection counts over a batch of trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionCounts {
    pub trials: u64,
    pub active: Vec<u64>,
    pub selected: Vec<u64>,
}

impl SelectionCounts {
    fn new(n: usize) -> Self {
        Self {
            trials: 0,
            active: vec![0; n],
            selected: vec![0; n],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        for (a, b) in self.active.iter_mut().zip(other.active) {
            *a += b;
        }
        for (a, b) in self.selected.iter_mut().zip(other.selected) {
            *a += b;
        }
        self
    }
}

/// Draws `A ~ prior` per trial and records which active elements `run` selects.
/// Selected elements outside `A` are not counted.
pub fn count_selections<F>(prior: &Prior, trials: u64, seed: u64, run: F) -> SelectionCounts
where
    F: Fn(&SubsetMask, &mut SimRng) -> SubsetMask + Sync,
{
    let n = prior.n();
    let per = trials / SHARDS;
    let extra = trials % SHARDS;
    let shards: Vec<SelectionCounts> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = shard_rng(seed, shard);
            let mut counts = SelectionCounts::new(n);
            let count = per + u64::from(shard < extra);
            for _ in 0..count {
                let a = prior.sample(&mut rng);
                let out = run(&a, &mut rng);
                for i in a.iter() {
                    counts.active[i] += 1;
                }
                for i in out.intersection(&a).iter() {
                    counts.selected[i] += 1;
                }
            }
            counts.trials = count;
            counts
        })
        .collect();
    shards
        .into_iter()
        .fold(SelectionCounts::new(n), SelectionCounts::merge)
}
