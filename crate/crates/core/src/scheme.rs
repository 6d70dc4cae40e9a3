//! Executable online schemes.
//!
//! A [`Scheme`] is the output of a build phase and is cheap to run. Every run
//! goes through a [`Session`], which reveals elements one at a time in the
//! scheme's arrival order and receives each activity bit only when that
//! element arrives, so decisions can never look ahead.

use std::borrow::Cow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;
use crate::matroid::{check_weights, Greedy, Matroid};
use crate::permutation::Permutation;
use crate::preselect::{preselect, PreselectConfig, PreselectVariant, Preselection};
use crate::prior::Prior;
use crate::subsample::{prefix_subsample, t_rho};

const MIXTURE_TOLERANCE: f64 = 1e-9;

/// Online max-weight algorithms usable inside the secretary wrapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecretaryAlg {
    /// Elements arrive by decreasing (unmasked) weight; accept while independent.
    GreedyByWeight,
    /// Random arrival; reject the first `floor(n/e)`, then accept anything
    /// beating the best seen so far. Built for rank-one matroids.
    Classic1Uniform,
}

impl SecretaryAlg {
    /// Whether the arrival order is drawn uniformly at random rather than fixed by the weights.
    pub fn random_arrival(self) -> bool {
        matches!(self, Self::Classic1Uniform)
    }

    /// Arrival order for weights `w`, drawing from `rng` only for random-order algorithms.
    pub fn arrival<R: Rng>(self, w: &[f64], rng: &mut R) -> Permutation {
        match self {
            Self::GreedyByWeight => Permutation::by_weight(w),
            Self::Classic1Uniform => Permutation::random(w.len(), rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Accept each active element in `order` while independent.
    GreedyOrdered {
        order: Permutation,
    },
    /// Greedy over `order`, restricted to an independent `rho`-subsample of the ground set.
    IndependentSubsample {
        order: Permutation,
        rho: f64,
    },
    /// Greedy over `order`, restricted to the elements preceding a random sentinel.
    SentinelPrefix {
        order: Permutation,
    },
    PermutationMixture {
        components: Vec<(Permutation, f64)>,
    },
    WeightMixture {
        secretary: SecretaryAlg,
        components: Vec<(Vec<f64>, f64)>,
    },
}

/// The scheme randomness of one run, drawn before any element is revealed.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeDraw {
    /// Elements allowed to be selected (`T`); `None` means all.
    pub filter: Option<SubsetMask>,
    /// Index into the mixture components.
    pub component: usize,
    /// Arrival order for random-order secretary algorithms.
    pub arrival: Option<Permutation>,
}

impl SchemeDraw {
    pub fn plain() -> Self {
        Self {
            filter: None,
            component: 0,
            arrival: None,
        }
    }
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Self::GreedyOrdered { .. } => "greedy_ordered",
            Self::IndependentSubsample { .. } => "independent_subsample",
            Self::SentinelPrefix { .. } => "sentinel_prefix",
            Self::PermutationMixture { .. } => "permutation_mixture",
            Self::WeightMixture { .. } => "weight_mixture",
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let check_order = |p: &Permutation| {
            if p.n() == n {
                Ok(())
            } else {
                Err(OcrsError::DimensionMismatch {
                    expected: n,
                    got: p.n(),
                })
            }
        };
        match self {
            Self::GreedyOrdered { order } | Self::SentinelPrefix { order } => check_order(order),
            Self::IndependentSubsample { order, rho } => {
                if !(0.0..=1.0).contains(rho) {
                    return Err(OcrsError::InvalidParameter(format!(
                        "rho {rho} outside [0, 1]"
                    )));
                }
                check_order(order)
            }
            Self::PermutationMixture { components } => {
                check_mixture(components.iter().map(|c| c.1))?;
                components.iter().try_for_each(|(p, _)| check_order(p))
            }
            Self::WeightMixture { components, .. } => {
                check_mixture(components.iter().map(|c| c.1))?;
                components.iter().try_for_each(|(w, _)| check_weights(w, n))
            }
        }
    }

    fn sample_component<R: Rng>(weights: impl Iterator<Item = f64>, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (idx, w) in weights.enumerate() {
            acc += w;
            last = idx;
            if u < acc {
                return idx;
            }
        }
        last
    }

    /// Draws the scheme's internal randomness for an `n`-element ground set.
    pub fn draw<R: Rng>(&self, n: usize, rng: &mut R) -> SchemeDraw {
        match self {
            Self::GreedyOrdered { .. } => SchemeDraw::plain(),
            Self::IndependentSubsample { rho, .. } => SchemeDraw {
                filter: Some(t_rho(&SubsetMask::full(n), *rho, rng).expect("validated rho")),
                ..SchemeDraw::plain()
            },
            Self::SentinelPrefix { .. } => SchemeDraw {
                filter: Some(prefix_subsample(n, rng)),
                ..SchemeDraw::plain()
            },
            Self::PermutationMixture { components } => SchemeDraw {
                component: Self::sample_component(components.iter().map(|c| c.1), rng),
                ..SchemeDraw::plain()
            },
            Self::WeightMixture {
                secretary,
                components,
            } => {
                let component = Self::sample_component(components.iter().map(|c| c.1), rng);
                let arrival = secretary
                    .random_arrival()
                    .then(|| Permutation::random(n, rng));
                SchemeDraw {
                    component,
                    arrival,
                    ..SchemeDraw::plain()
                }
            }
        }
    }

    /// Starts an online run with fresh scheme randomness.
    pub fn start<'a, R: Rng>(&'a self, matroid: &'a Matroid, rng: &mut R) -> Session<'a> {
        let draw = self.draw(matroid.n(), rng);
        self.start_with(matroid, draw)
    }

    /// Starts an online run with the given randomness.
    pub fn start_with<'a>(&'a self, matroid: &'a Matroid, draw: SchemeDraw) -> Session<'a> {
        let (order, rule): (Cow<'a, [usize]>, Rule<'a>) = match self {
            Self::GreedyOrdered { order }
            | Self::IndependentSubsample { order, .. }
            | Self::SentinelPrefix { order } => (
                Cow::Borrowed(order.order()),
                Rule::Greedy {
                    filter: draw.filter,
                },
            ),
            Self::PermutationMixture { components } => (
                Cow::Borrowed(components[draw.component].0.order()),
                Rule::Greedy { filter: None },
            ),
            Self::WeightMixture {
                secretary,
                components,
            } => {
                let w = &components[draw.component].0;
                let order = match draw.arrival {
                    Some(p) => Cow::Owned(Vec::from(p)),
                    None => Cow::Owned(secretary.arrival(w, &mut NoRandomness).into()),
                };
                (order, Rule::secretary(*secretary, w))
            }
        };
        Session {
            greedy: matroid.greedy(),
            order,
            pos: 0,
            rule,
        }
    }

    /// Runs the scheme on a fully known active set, revealing it element by element.
    pub fn run<R: Rng>(&self, matroid: &Matroid, active: &SubsetMask, rng: &mut R) -> SubsetMask {
        let mut session = self.start(matroid, rng);
        while let Some(e) = session.next_element() {
            session.decide(active.contains(e));
        }
        session.finish()
    }
}

fn check_mixture(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    let mut count = 0;
    for w in weights {
        if w.is_nan() || w < 0.0 {
            return Err(OcrsError::InvalidParameter(format!(
                "negative mixture weight {w}"
            )));
        }
        total += w;
        count += 1;
    }
    if count == 0 || (total - 1.0).abs() > MIXTURE_TOLERANCE {
        return Err(OcrsError::InvalidParameter(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// A deterministic arrival never consults the rng; this one panics if it does.
struct NoRandomness;

impl rand::RngCore for NoRandomness {
    fn next_u32(&mut self) -> u32 {
        unreachable!("deterministic arrival drew randomness")
    }
    fn next_u64(&mut self) -> u64 {
        unreachable!("deterministic arrival drew randomness")
    }
    fn fill_bytes(&mut self, _: &mut [u8]) {
        unreachable!("deterministic arrival drew randomness")
    }
    fn try_fill_bytes(&mut self, _: &mut [u8]) -> std::result::Result<(), rand::Error> {
        unreachable!("deterministic arrival drew randomness")
    }
}

enum Rule<'a> {
    Greedy {
        filter: Option<SubsetMask>,
    },
    Secretary {
        alg: SecretaryAlg,
        weights: &'a [f64],
        observe: usize,
        best: Option<(f64, usize)>,
    },
}

impl<'a> Rule<'a> {
    fn secretary(alg: SecretaryAlg, weights: &'a [f64]) -> Self {
        let observe = match alg {
            SecretaryAlg::GreedyByWeight => 0,
            SecretaryAlg::Classic1Uniform => {
                (weights.len() as f64 / std::f64::consts::E).floor() as usize
            }
        };
        Rule::Secretary {
            alg,
            weights,
            observe,
            best: None,
        }
    }
}

/// Higher weight ranks first; equal weights rank by ascending index.
fn outranks(w: f64, e: usize, best: Option<(f64, usize)>) -> bool {
    match best {
        None => true,
        Some((bw, be)) => w > bw || (w == bw && e < be),
    }
}

/// One online run: call [`Session::next_element`], then [`Session::decide`] with
/// that element's activity, until no elements remain.
pub struct Session<'a> {
    greedy: Greedy<'a>,
    order: Cow<'a, [usize]>,
    pos: usize,
    rule: Rule<'a>,
}

impl Session<'_> {
    pub fn next_element(&self) -> Option<usize> {
        self.order.get(self.pos).copied()
    }

    /// Decides the current element irrevocably; returns whether it was selected.
    /// Panics if the arrival sequence is exhausted.
    pub fn decide(&mut self, active: bool) -> bool {
        let e = self.order[self.pos];
        let position = self.pos;
        self.pos += 1;
        match &mut self.rule {
            Rule::Greedy { filter } => {
                active && filter.as_ref().is_none_or(|t| t.contains(e)) && self.greedy.try_add(e)
            }
            Rule::Secretary {
                alg,
                weights,
                observe,
                best,
            } => {
                // Inactive elements are presented with weight zero.
                let w = if active { weights[e] } else { 0.0 };
                match alg {
                    SecretaryAlg::GreedyByWeight => w > 0.0 && self.greedy.try_add(e),
                    SecretaryAlg::Classic1Uniform => {
                        if position < *observe {
                            if outranks(w, e, *best) {
                                *best = Some((w, e));
                            }
                            false
                        } else {
                            w > 0.0 && outranks(w, e, *best) && self.greedy.try_add(e)
                        }
                    }
                }
            }
        }
    }

    pub fn selected(&self) -> &SubsetMask {
        self.greedy.selected()
    }

    pub fn finish(self) -> SubsetMask {
        self.greedy.into_selected()
    }
}

/// Greedy over `order`: keep each active element that preserves independence.
pub fn greedy_ordered(matroid: &Matroid, order: &Permutation, active: &SubsetMask) -> SubsetMask {
    let mut g = matroid.greedy();
    for &e in order.order() {
        if active.contains(e) {
            g.try_add(e);
        }
    }
    g.into_selected()
}

/// Runs `alg` on weights `w` masked by `active` (inactive elements show weight 0).
/// `arrival` is required for random-order algorithms and ignored otherwise.
pub fn secretary_wrap(
    alg: SecretaryAlg,
    w: &[f64],
    matroid: &Matroid,
    active: &SubsetMask,
    arrival: Option<&Permutation>,
) -> Result<SubsetMask> {
    check_weights(w, matroid.n())?;
    if alg.random_arrival() && arrival.is_none() {
        return Err(OcrsError::InvalidParameter(
            "random-order secretary needs an arrival order".into(),
        ));
    }
    let scheme = Scheme::WeightMixture {
        secretary: alg,
        components: vec![(w.to_vec(), 1.0)],
    };
    let draw = SchemeDraw {
        arrival: arrival.filter(|_| alg.random_arrival()).cloned(),
        ..SchemeDraw::plain()
    };
    let mut session = scheme.start_with(matroid, draw);
    while let Some(e) = session.next_element() {
        session.decide(active.contains(e));
    }
    Ok(session.finish())
}

/// Preselects an order with the independent statistic and returns the built scheme.
pub fn build_independent_subsample<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    cfg: &PreselectConfig,
    rng: &mut R,
) -> Result<(Scheme, Preselection)> {
    let sel = preselect(matroid, prior, cfg, PreselectVariant::Independent, rng)?;
    let scheme = Scheme::IndependentSubsample {
        order: sel.order.clone(),
        rho: cfg.alpha / 2.0,
    };
    Ok((scheme, sel))
}

/// Preselects an order with the prefix statistic and returns the built scheme.
pub fn build_sentinel_prefix<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    cfg: &PreselectConfig,
    rng: &mut R,
) -> Result<(Scheme, Preselection)> {
    let sel = preselect(matroid, prior, cfg, PreselectVariant::Prefix, rng)?;
    Ok((
        Scheme::SentinelPrefix {
            order: sel.order.clone(),
        },
        sel,
    ))
}

/// Builds the independent-subsample scheme and runs it once on a fresh `A ~ prior`.
/// With `alpha == 0` the subsample is empty and nothing is selected.
pub fn run_independent_subsample<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    alpha: f64,
    cfg: &PreselectConfig,
    rng: &mut R,
) -> Result<(Permutation, SubsetMask)> {
    let n = matroid.n();
    if alpha == 0.0 {
        let _ = prior.sample(rng);
        return Ok((Permutation::identity(n), SubsetMask::empty(n)));
    }
    let cfg = PreselectConfig { alpha, ..*cfg };
    let (scheme, sel) = build_independent_subsample(matroid, prior, &cfg, rng)?;
    let active = prior.sample(rng);
    Ok((sel.order, scheme.run(matroid, &active, rng)))
}

/// Builds the prefix-subsample scheme and runs it once on a fresh `A ~ prior`.
pub fn run_sentinel_prefix<R: Rng>(
    matroid: &Matroid,
    prior: &Prior,
    alpha: f64,
    cfg: &PreselectConfig,
    rng: &mut R,
) -> Result<(Permutation, SubsetMask)> {
    let cfg = PreselectConfig { alpha, ..*cfg };
    let (scheme, sel) = build_sentinel_prefix(matroid, prior, &cfg, rng)?;
    let active = prior.sample(rng);
    Ok((sel.order, scheme.run(matroid, &active, rng)))
}
