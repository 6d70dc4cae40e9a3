//! Distributions over active sets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;

/// Largest ground set a product prior is expanded to an explicit support for.
pub const PRODUCT_EXPANSION_LIMIT: usize = 20;

const SUM_TOLERANCE: f64 = 1e-12;

/// Black-box sampler over active sets.
pub type SamplerFn = dyn Fn(&mut dyn RngCore) -> SubsetMask + Send + Sync;

#[derive(Clone)]
enum Kind {
    Explicit(Explicit),
    Product {
        x: Vec<f64>,
    },
    AllActive,
    Opaque {
        sampler: Arc<SamplerFn>,
        within: SubsetMask,
    },
}

#[derive(Clone, Debug)]
struct Explicit {
    atoms: Vec<SubsetMask>,
    exact: Vec<BigRational>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

/// A prior over subsets of `{0, .., n-1}`. Immutable; sampling takes an external rng.
#[derive(Clone)]
pub struct Prior {
    n: usize,
    kind: Kind,
}

impl fmt::Debug for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Explicit(e) => f
                .debug_struct("Explicit")
                .field("n", &self.n)
                .field("atoms", &e.atoms)
                .field("probs", &e.probs)
                .finish(),
            Kind::Product { x } => f.debug_struct("Product").field("x", x).finish(),
            Kind::AllActive => f.debug_struct("AllActive").field("n", &self.n).finish(),
            Kind::Opaque { within, .. } => f
                .debug_struct("Opaque")
                .field("n", &self.n)
                .field("within", within)
                .finish(),
        }
    }
}

/// A probability written either as a float or as an exact fraction `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Probability {
    Float(f64),
    Ratio(String),
}

impl Probability {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Self::Float(v) => BigRational::from_float(*v)
                .ok_or_else(|| OcrsError::InvalidPrior(format!("probability {v} is not finite"))),
            Self::Ratio(s) => BigRational::from_str(s.trim())
                .map_err(|_| OcrsError::InvalidPrior(format!("cannot parse probability {s:?}"))),
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        let f = r.to_f64().unwrap_or(f64::NAN);
        match BigRational::from_float(f) {
            Some(back) if &back == r => Self::Float(f),
            _ => Self::Ratio(r.to_string()),
        }
    }
}

/// Serializable description of a prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PriorSpec {
    Explicit {
        n: usize,
        support: Vec<Vec<usize>>,
        probs: Vec<Probability>,
    },
    Product {
        x: Vec<f64>,
    },
    AllActive {
        n: usize,
    },
    /// The hard prior family: `Pr[empty] = 1 - delta (n + 1/alpha - 2)`,
    /// `Pr[[n]] = delta (1/alpha - 1)`, `Pr[{i}] = delta` for `i != j`.
    AllOrSingleton {
        n: usize,
        alpha: f64,
        delta: f64,
        j: usize,
    },
}

/// Result of estimating `p_min` from an opaque sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PminEstimate {
    pub empirical: f64,
    /// `empirical - eps`, floored at zero.
    pub lower: f64,
    pub eps: f64,
    pub samples: usize,
}

fn rational(value: f64) -> BigRational {
    BigRational::from_float(value).expect("finite probability")
}

impl Prior {
    pub fn all_active(n: usize) -> Self {
        Self {
            n,
            kind: Kind::AllActive,
        }
    }

    pub fn product(x: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(OcrsError::InvalidPrior(format!(
                "activation probability {v} of element {i} is outside [0, 1]"
            )));
        }
        Ok(Self {
            n: x.len(),
            kind: Kind::Product { x },
        })
    }

    pub fn explicit<I>(n: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, f64)>,
    {
        let exact = atoms
            .into_iter()
            .map(|(s, p)| Ok((s, Probability::Float(p).to_rational()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::explicit_exact(n, exact)
    }

    /// Explicit prior from exact probabilities. Duplicate atoms are merged,
    /// zero-mass atoms dropped and the support sorted by mask value.
    pub fn explicit_exact<I>(n: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, BigRational)>,
    {
        let mut merged: BTreeMap<SubsetMask, BigRational> = BTreeMap::new();
        for (s, p) in atoms {
            if s.n() != n {
                return Err(OcrsError::DimensionMismatch {
                    expected: n,
                    got: s.n(),
                });
            }
            if p.is_negative() {
                return Err(OcrsError::InvalidPrior(format!(
                    "negative probability {p} on atom {s:?}"
                )));
            }
            *merged.entry(s).or_insert_with(BigRational::zero) += p;
        }
        merged.retain(|_, p| !p.is_zero());
        let total: f64 = merged
            .values()
            .map(|p| p.to_f64().unwrap_or(f64::NAN))
            .sum();
        if total.is_nan() || (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(OcrsError::InvalidPrior(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let (atoms, exact): (Vec<_>, Vec<_>) = merged.into_iter().unzip();
        let probs: Vec<f64> = exact.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect();
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect();
        Ok(Self {
            n,
            kind: Kind::Explicit(Explicit {
                atoms,
                exact,
                probs,
                cdf,
            }),
        })
    }

    pub fn all_or_singleton(n: usize, alpha: f64, delta: f64, j: usize) -> Result<Self> {
        if n == 0 || j >= n {
            return Err(OcrsError::InvalidPrior(format!(
                "distinguished element {j} outside ground set of size {n}"
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(OcrsError::InvalidPrior(format!(
                "alpha {alpha} outside (0, 1]"
            )));
        }
        let a = Probability::Float(alpha).to_rational()?;
        let d = Probability::Float(delta).to_rational()?;
        let one = BigRational::one();
        let inv_alpha = &one / &a;
        let scale = BigRational::from_integer((n as i64).into()) + &inv_alpha
            - BigRational::from_integer(2.into());
        if !scale.is_positive() || !d.is_positive() || &d * &scale > one {
            return Err(OcrsError::InvalidPrior(format!(
                "delta {delta} outside (0, 1/(n + 1/alpha - 2)]"
            )));
        }
        let mut atoms = vec![
            (SubsetMask::empty(n), &one - &d * &scale),
            (SubsetMask::full(n), &d * (&inv_alpha - &one)),
        ];
        for i in (0..n).filter(|&i| i != j) {
            atoms.push((SubsetMask::singleton(n, i)?, d.clone()));
        }
        Self::explicit_exact(n, atoms)
    }

    /// Wraps a black-box sampler; `p_min` must then be estimated.
    pub fn opaque(n: usize, sampler: Arc<SamplerFn>) -> Self {
        Self {
            n,
            kind: Kind::Opaque {
                sampler,
                within: SubsetMask::full(n),
            },
        }
    }

    pub fn from_spec(spec: &PriorSpec) -> Result<Self> {
        match spec {
            PriorSpec::AllActive { n } => Ok(Self::all_active(*n)),
            PriorSpec::Product { x } => Self::product(x.clone()),
            PriorSpec::AllOrSingleton { n, alpha, delta, j } => {
                Self::all_or_singleton(*n, *alpha, *delta, *j)
            }
            PriorSpec::Explicit { n, support, probs } => {
                if support.len() != probs.len() {
                    return Err(OcrsError::InvalidPrior(format!(
                        "{} support sets but {} probabilities",
                        support.len(),
                        probs.len()
                    )));
                }
                let atoms = support
                    .iter()
                    .zip(probs)
                    .map(|(s, p)| {
                        Ok((
                            SubsetMask::from_elements(*n, s.iter().copied())?,
                            p.to_rational()?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::explicit_exact(*n, atoms)
            }
        }
    }

    /// Serializable form; opaque priors have none.
    pub fn to_spec(&self) -> Option<PriorSpec> {
        match &self.kind {
            Kind::AllActive => Some(PriorSpec::AllActive { n: self.n }),
            Kind::Product { x } => Some(PriorSpec::Product { x: x.clone() }),
            Kind::Explicit(e) => Some(PriorSpec::Explicit {
                n: self.n,
                support: e.atoms.iter().map(SubsetMask::to_vec).collect(),
                probs: e.exact.iter().map(Probability::from_rational).collect(),
            }),
            Kind::Opaque { .. } => None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.kind, Kind::Explicit(_))
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> SubsetMask {
        match &self.kind {
            Kind::AllActive => SubsetMask::full(self.n),
            Kind::Product { x } => {
                let mut s = SubsetMask::empty(self.n);
                for (i, &p) in x.iter().enumerate() {
                    if p >= 1.0 || (p > 0.0 && rng.gen::<f64>() < p) {
                        s.insert(i);
                    }
                }
                s
            }
            Kind::Explicit(e) => {
                let u: f64 = rng.gen();
                let idx = e.cdf.partition_point(|&c| c <= u).min(e.atoms.len() - 1);
                e.atoms[idx].clone()
            }
            Kind::Opaque { sampler, within } => {
                let rng: &mut dyn RngCore = rng;
                sampler(rng).intersection(within)
            }
        }
    }

    /// The law of `A ∩ s`.
    pub fn marginal(&self, s: &SubsetMask) -> Result<Self> {
        if s.n() != self.n {
            return Err(OcrsError::DimensionMismatch {
                expected: self.n,
                got: s.n(),
            });
        }
        match &self.kind {
            Kind::AllActive => Self::product(
                (0..self.n)
                    .map(|i| f64::from(u8::from(s.contains(i))))
                    .collect(),
            ),
            Kind::Product { x } => Self::product(
                x.iter()
                    .enumerate()
                    .map(|(i, &p)| if s.contains(i) { p } else { 0.0 })
                    .collect(),
            ),
            Kind::Explicit(e) => Self::explicit_exact(
                self.n,
                e.atoms
                    .iter()
                    .zip(&e.exact)
                    .map(|(a, p)| (a.intersection(s), p.clone())),
            ),
            Kind::Opaque { sampler, within } => Ok(Self {
                n: self.n,
                kind: Kind::Opaque {
                    sampler: Arc::clone(sampler),
                    within: within.intersection(s),
                },
            }),
        }
    }

    /// Exact support with probabilities; product priors are expanded when small enough.
    pub fn support(&self) -> Result<Vec<(SubsetMask, BigRational)>> {
        match &self.kind {
            Kind::AllActive => Ok(vec![(SubsetMask::full(self.n), BigRational::one())]),
            Kind::Explicit(e) => Ok(e
                .atoms
                .iter()
                .cloned()
                .zip(e.exact.iter().cloned())
                .collect()),
            Kind::Product { x } => {
                let uncertain: Vec<usize> =
                    (0..self.n).filter(|&i| x[i] > 0.0 && x[i] < 1.0).collect();
                if uncertain.len() > PRODUCT_EXPANSION_LIMIT {
                    return Err(OcrsError::TooLarge {
                        what: "product prior support",
                        size: uncertain.len(),
                        limit: PRODUCT_EXPANSION_LIMIT,
                    });
                }
                let base = SubsetMask::from_elements(self.n, (0..self.n).filter(|&i| x[i] >= 1.0))?;
                let xr: Vec<BigRational> = x.iter().map(|&p| rational(p)).collect();
                let free = SubsetMask::from_elements(uncertain.len(), 0..uncertain.len())?;
                let mut out = Vec::with_capacity(1 << uncertain.len());
                for pick in free.subsets() {
                    let mut atom = base.clone();
                    let mut p = BigRational::one();
                    for (slot, &i) in uncertain.iter().enumerate() {
                        if pick.contains(slot) {
                            atom.insert(i);
                            p *= &xr[i];
                        } else {
                            p *= BigRational::one() - &xr[i];
                        }
                    }
                    out.push((atom, p));
                }
                out.sort_by(|a, b| a.0.cmp(&b.0));
                Ok(out)
            }
            Kind::Opaque { .. } => Err(OcrsError::InvalidPrior(
                "an opaque sampler has no explicit support".into(),
            )),
        }
    }

    /// `Pr[i in A]` per element, exactly; `None` for opaque samplers.
    pub fn activation_exact(&self) -> Option<Vec<BigRational>> {
        match &self.kind {
            Kind::AllActive => Some(vec![BigRational::one(); self.n]),
            Kind::Product { x } => Some(x.iter().map(|&p| rational(p)).collect()),
            Kind::Explicit(e) => {
                let mut x = vec![BigRational::zero(); self.n];
                for (a, p) in e.atoms.iter().zip(&e.exact) {
                    for i in a.iter() {
                        x[i] += p;
                    }
                }
                Some(x)
            }
            Kind::Opaque { .. } => None,
        }
    }

    pub fn activation(&self) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Product { x } => Some(x.clone()),
            Kind::Explicit(e) => {
                let mut x = vec![0.0; self.n];
                for (a, p) in e.atoms.iter().zip(&e.probs) {
                    for i in a.iter() {
                        x[i] += p;
                    }
                }
                Some(x)
            }
            _ => self
                .activation_exact()
                .map(|v| v.iter().map(|p| p.to_f64().unwrap_or(0.0)).collect()),
        }
    }

    /// Elements that are never active (possible after marginalization).
    pub fn inactive_elements(&self) -> Option<Vec<usize>> {
        self.activation()
            .map(|x| (0..self.n).filter(|&i| x[i] <= 0.0).collect())
    }

    /// Smallest positive activation probability; exact for structured kinds.
    pub fn p_min(&self) -> Option<f64> {
        let x = self.activation()?;
        Some(x.into_iter().filter(|&p| p > 0.0).fold(1.0, f64::min))
    }

    /// Estimates `p_min` from `ceil(3 ln(2n / 0.01) / eps^2)` draws.
    pub fn estimate_p_min<R: Rng>(&self, eps: f64, rng: &mut R) -> Result<PminEstimate> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(OcrsError::InvalidParameter(format!(
                "eps {eps} outside (0, 1)"
            )));
        }
        let within = match &self.kind {
            Kind::Opaque { within, .. } => within.clone(),
            _ => SubsetMask::full(self.n),
        };
        let n = self.n.max(1) as f64;
        let samples = (3.0 * (2.0 * n / 0.01).ln() / (eps * eps)).ceil() as usize;
        let mut counts = vec![0usize; self.n];
        for _ in 0..samples {
            for i in self.sample(rng).iter() {
                counts[i] += 1;
            }
        }
        let mut empirical: f64 = 1.0;
        for i in within.iter() {
            if counts[i] == 0 {
                return Err(OcrsError::ZeroActivation { element: i });
            }
            empirical = empirical.min(counts[i] as f64 / samples as f64);
        }
        Ok(PminEstimate {
            empirical,
            lower: (empirical - eps).max(0.0),
            eps,
            samples,
        })
    }

    /// Exact `p_min` when available, otherwise the empirical estimate.
    pub fn p_min_or_estimate<R: Rng>(&self, eps: f64, rng: &mut R) -> Result<f64> {
        match self.p_min() {
            Some(p) => Ok(p),
            None => Ok(self.estimate_p_min(eps, rng)?.empirical),
        }
    }
}
