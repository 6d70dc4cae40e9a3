//! Brute-force ground truth for small instances.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{OcrsError, Result};
use crate::lp::simplex::{LinearProgram, Relation};
use crate::mask::SubsetMask;
use crate::matroid::{check_weights, Matroid};
use crate::numeric::{factorial, Scalar};
use crate::permutation::Permutation;
use crate::prior::Prior;
use crate::scheme::{Scheme, SchemeDraw, SecretaryAlg};
use crate::subsample::sentinel_prefix;

/// Largest support atom whose bases the uncontentiousness LP enumerates.
pub const ATOM_LIMIT: usize = 16;
/// Ground-set limits for enumerating scheme randomness.
pub const SUBSAMPLE_LIMIT: usize = 14;
pub const SENTINEL_LIMIT: usize = 8;
pub const ARRIVAL_LIMIT: usize = 8;
pub const BRUTE_FORCE_LIMIT: usize = 20;

fn too_large(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        return Err(OcrsError::TooLarge { what, size, limit });
    }
    Ok(())
}

/// All maximal independent subsets of `a`, by depth-first search over independent sets.
pub fn bases(matroid: &Matroid, a: &SubsetMask) -> Result<Vec<SubsetMask>> {
    too_large("support atom", a.cardinality(), ATOM_LIMIT)?;
    let elems = a.to_vec();
    let mut out = Vec::new();
    let mut current = SubsetMask::empty(matroid.n());
    extend(matroid, &elems, 0, &mut current, &mut out)?;
    Ok(out)
}

fn extend(
    matroid: &Matroid,
    elems: &[usize],
    from: usize,
    current: &mut SubsetMask,
    out: &mut Vec<SubsetMask>,
) -> Result<()> {
    if from == elems.len() {
        let maximal = elems
            .iter()
            .filter(|&&e| !current.contains(e))
            .try_fold(true, |acc, &e| {
                Ok::<_, OcrsError>(acc && !matroid.is_independent(&current.with(e))?)
            })?;
        if maximal {
            out.push(current.clone());
        }
        return Ok(());
    }
    let e = elems[from];
    current.insert(e);
    if matroid.is_independent(current)? {
        extend(matroid, elems, from + 1, current, out)?;
    }
    current.remove(e);
    extend(matroid, elems, from + 1, current, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRow<S> {
    pub atom: SubsetMask,
    pub prob: S,
    /// Independent subsets of `atom` with their selection probabilities (positive only).
    pub choices: Vec<(SubsetMask, S)>,
}

/// The best balancedness of any offline scheme, with a scheme achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCertificate<S> {
    pub alpha_star: S,
    pub witness: Vec<WitnessRow<S>>,
    /// `Pr[i selected | i active]` under the witness; `None` for never-active elements.
    pub balancedness: Vec<Option<S>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateDump {
    pub alpha_star: f64,
    pub alpha_star_exact: String,
    pub balancedness: Vec<Option<f64>>,
    pub witness: Vec<WitnessDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDump {
    pub atom: Vec<usize>,
    pub prob: f64,
    pub choices: Vec<(Vec<usize>, f64)>,
}

impl<S: Scalar> AlphaCertificate<S> {
    pub fn dump(&self) -> CertificateDump {
        CertificateDump {
            alpha_star: self.alpha_star.as_f64(),
            alpha_star_exact: self.alpha_star.exact_string(),
            balancedness: self
                .balancedness
                .iter()
                .map(|b| b.as_ref().map(Scalar::as_f64))
                .collect(),
            witness: self
                .witness
                .iter()
                .map(|r| WitnessDump {
                    atom: r.atom.to_vec(),
                    prob: r.prob.as_f64(),
                    choices: r
                        .choices
                        .iter()
                        .map(|(y, v)| (y.to_vec(), v.as_f64()))
                        .collect(),
                })
                .collect(),
        }
    }
}

fn support_in<S: Scalar>(prior: &Prior) -> Result<Vec<(SubsetMask, S)>> {
    Ok(prior
        .support()?
        .iter()
        .map(|(a, p)| (a.clone(), S::from_rational(p)))
        .collect())
}

fn activation_in<S: Scalar>(n: usize, support: &[(SubsetMask, S)]) -> Vec<S> {
    let mut x = vec![S::zero(); n];
    for (a, p) in support {
        for i in a.iter() {
            x[i] = x[i].clone() + p.clone();
        }
    }
    x
}

fn check_prior(matroid: &Matroid, prior: &Prior) -> Result<()> {
    if prior.n() != matroid.n() {
        return Err(OcrsError::DimensionMismatch {
            expected: matroid.n(),
            got: prior.n(),
        });
    }
    Ok(())
}

/// Solves `max α` over offline schemes: each support atom `A` picks a basis of `A`
/// at random, and every element must be selected with probability at least
/// `α · Pr[i ∈ A]`. Picking only bases loses nothing, since any independent
/// choice can be extended to a basis without lowering any selection probability.
pub fn max_uncontentious_alpha<S: Scalar>(
    matroid: &Matroid,
    prior: &Prior,
) -> Result<AlphaCertificate<S>> {
    check_prior(matroid, prior)?;
    let n = matroid.n();
    let support = support_in::<S>(prior)?;
    let x = activation_in(n, &support);
    let choices: Vec<Vec<SubsetMask>> = support
        .iter()
        .map(|(a, _)| bases(matroid, a))
        .collect::<Result<_>>()?;
    let offsets: Vec<usize> = choices
        .iter()
        .scan(1, |next, c| {
            let start = *next;
            *next += c.len();
            Some(start)
        })
        .collect();
    let vars = 1 + choices.iter().map(Vec::len).sum::<usize>();

    let mut objective = vec![S::zero(); vars];
    objective[0] = S::one();
    let mut lp = LinearProgram::new(objective);
    for (k, c) in choices.iter().enumerate() {
        let mut row = vec![S::zero(); vars];
        for slot in 0..c.len() {
            row[offsets[k] + slot] = S::one();
        }
        lp.constrain(row, Relation::Eq, S::one());
    }
    for i in (0..n).filter(|&i| x[i].is_pos()) {
        let mut row = vec![S::zero(); vars];
        row[0] = x[i].clone();
        for (k, c) in choices.iter().enumerate() {
            for (slot, y) in c.iter().enumerate() {
                if y.contains(i) {
                    row[offsets[k] + slot] = -support[k].1.clone();
                }
            }
        }
        lp.constrain(row, Relation::Le, S::zero());
    }
    let mut cap = vec![S::zero(); vars];
    cap[0] = S::one();
    lp.constrain(cap, Relation::Le, S::one());
    let opt = lp.maximize()?;

    let witness: Vec<WitnessRow<S>> = support
        .iter()
        .zip(&choices)
        .enumerate()
        .map(|(k, ((a, p), c))| WitnessRow {
            atom: a.clone(),
            prob: p.clone(),
            choices: c
                .iter()
                .enumerate()
                .map(|(slot, y)| (y.clone(), opt.x[offsets[k] + slot].clone()))
                .filter(|(_, v)| v.is_pos())
                .collect(),
        })
        .collect();
    let balancedness = witness_balancedness(n, &witness);
    Ok(AlphaCertificate {
        alpha_star: opt.x[0].clone(),
        witness,
        balancedness,
    })
}

/// Per-element conditional selection probability of an offline witness scheme.
pub fn witness_balancedness<S: Scalar>(n: usize, witness: &[WitnessRow<S>]) -> Vec<Option<S>> {
    let mut sel = vec![S::zero(); n];
    let mut x = vec![S::zero(); n];
    for row in witness {
        for i in row.atom.iter() {
            x[i] = x[i].clone() + row.prob.clone();
        }
        for (y, v) in &row.choices {
            for i in y.iter() {
                sel[i] = sel[i].clone() + row.prob.clone() * v.clone();
            }
        }
    }
    conditional(sel, &x)
}

fn conditional<S: Scalar>(sel: Vec<S>, x: &[S]) -> Vec<Option<S>> {
    sel.into_iter()
        .zip(x)
        .map(|(s, xi)| xi.is_pos().then(|| s / xi.clone()))
        .collect()
}

/// Every realization of the scheme's internal randomness with its probability.
pub fn scheme_draws<S: Scalar>(scheme: &Scheme, n: usize) -> Result<Vec<(SchemeDraw, S)>> {
    scheme.validate(n)?;
    let plain = |component| SchemeDraw {
        component,
        ..SchemeDraw::plain()
    };
    match scheme {
        Scheme::GreedyOrdered { .. } => Ok(vec![(SchemeDraw::plain(), S::one())]),
        Scheme::IndependentSubsample { rho, .. } => {
            too_large("ground set for subsample enumeration", n, SUBSAMPLE_LIMIT)?;
            let rho = S::from_f64(*rho);
            let keep = S::one() - rho.clone();
            Ok(SubsetMask::all(n)
                .map(|t| {
                    let k = t.cardinality();
                    let w = rho.pow_u(k) * keep.pow_u(n - k);
                    (
                        SchemeDraw {
                            filter: Some(t),
                            ..SchemeDraw::plain()
                        },
                        w,
                    )
                })
                .collect())
        }
        Scheme::SentinelPrefix { .. } => {
            too_large("ground set for sentinel enumeration", n, SENTINEL_LIMIT)?;
            let mut counts: BTreeMap<SubsetMask, u64> = BTreeMap::new();
            for sigma in Permutation::all(n + 1) {
                *counts.entry(sentinel_prefix(&sigma)).or_default() += 1;
            }
            let total = factorial(n + 1);
            Ok(counts
                .into_iter()
                .map(|(t, c)| {
                    (
                        SchemeDraw {
                            filter: Some(t),
                            ..SchemeDraw::plain()
                        },
                        S::from_ratio(c, total),
                    )
                })
                .collect())
        }
        Scheme::PermutationMixture { components } => Ok(components
            .iter()
            .enumerate()
            .map(|(c, (_, w))| (plain(c), S::from_f64(*w)))
            .collect()),
        Scheme::WeightMixture {
            secretary,
            components,
        } => match secretary {
            SecretaryAlg::GreedyByWeight => Ok(components
                .iter()
                .enumerate()
                .map(|(c, (_, w))| (plain(c), S::from_f64(*w)))
                .collect()),
            SecretaryAlg::Classic1Uniform => {
                too_large("ground set for arrival enumeration", n, ARRIVAL_LIMIT)?;
                let per = S::from_ratio(1, factorial(n));
                let mut out = Vec::new();
                for (c, (_, w)) in components.iter().enumerate() {
                    for arrival in Permutation::all(n) {
                        out.push((
                            SchemeDraw {
                                component: c,
                                arrival: Some(arrival),
                                ..SchemeDraw::plain()
                            },
                            S::from_f64(*w) * per.clone(),
                        ));
                    }
                }
                Ok(out)
            }
        },
    }
}

/// Unconditional `Pr[i selected]` by enumerating support atoms and scheme randomness.
pub fn exact_selection<S: Scalar>(
    matroid: &Matroid,
    scheme: &Scheme,
    support: &[(SubsetMask, S)],
) -> Result<Vec<S>> {
    let n = matroid.n();
    let draws = scheme_draws::<S>(scheme, n)?;
    let mut sel = vec![S::zero(); n];
    for (a, p) in support {
        for (draw, w) in &draws {
            let mut session = scheme.start_with(matroid, draw.clone());
            while let Some(e) = session.next_element() {
                session.decide(a.contains(e));
            }
            let weight = p.clone() * w.clone();
            for i in session.finish().iter() {
                sel[i] = sel[i].clone() + weight.clone();
            }
        }
    }
    Ok(sel)
}

/// Exact `Pr[i selected | i active]` per element; `None` for never-active elements.
pub fn exact_balancedness<S: Scalar>(
    matroid: &Matroid,
    scheme: &Scheme,
    prior: &Prior,
) -> Result<Vec<Option<S>>> {
    check_prior(matroid, prior)?;
    let support = support_in::<S>(prior)?;
    let x = activation_in(matroid.n(), &support);
    let sel = exact_selection(matroid, scheme, &support)?;
    Ok(conditional(sel, &x))
}

/// Maximum weight of an independent subset of `s` by exhaustive search.
pub fn bruteforce_weighted_rank(matroid: &Matroid, w: &[f64], s: &SubsetMask) -> Result<f64> {
    check_weights(w, matroid.n())?;
    too_large(
        "set for brute-force weighted rank",
        s.cardinality(),
        BRUTE_FORCE_LIMIT,
    )?;
    let elems = s.to_vec();
    let local = SubsetMask::full(elems.len());
    let mut best: f64 = 0.0;
    for pick in local.subsets() {
        let y = SubsetMask::from_elements(matroid.n(), pick.iter().map(|k| elems[k]))?;
        if matroid.is_independent(&y)? {
            best = best.max(y.iter().map(|i| w[i]).sum());
        }
    }
    Ok(best)
}

/// Greedy weighted rank in the scalar type (decreasing weight, ties by ascending index).
pub fn weighted_rank_in<S: Scalar>(matroid: &Matroid, w: &[S], s: &SubsetMask) -> S {
    let mut order: Vec<usize> = s.iter().collect();
    order.sort_by(|&a, &b| {
        w[b].partial_cmp(&w[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut g = matroid.greedy();
    let mut total = S::zero();
    for e in order {
        if w[e].is_pos() && g.try_add(e) {
            total = total + w[e].clone();
        }
    }
    total
}

/// `(E[r_w(A)], E[w(A)])` computed exactly over the prior's support.
pub fn expected_rank_and_weight<S: Scalar>(
    matroid: &Matroid,
    prior: &Prior,
    w: &[S],
) -> Result<(S, S)> {
    check_prior(matroid, prior)?;
    if w.len() != matroid.n() {
        return Err(OcrsError::DimensionMismatch {
            expected: matroid.n(),
            got: w.len(),
        });
    }
    let mut rank = S::zero();
    let mut weight = S::zero();
    for (a, p) in support_in::<S>(prior)? {
        rank = rank + p.clone() * weighted_rank_in(matroid, w, &a);
        let total = a.iter().fold(S::zero(), |acc, i| acc + w[i].clone());
        weight = weight + p * total;
    }
    Ok((rank, weight))
}

/// Exact uncontentiousness level in rationals.
pub fn max_uncontentious_alpha_exact(
    matroid: &Matroid,
    prior: &Prior,
) -> Result<AlphaCertificate<BigRational>> {
    max_uncontentious_alpha(matroid, prior)
}
