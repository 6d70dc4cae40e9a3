//! Matroids given by a membership oracle, with greedy-derived rank, span and bases.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::mask::SubsetMask;

/// Largest ground set `verify_axioms` will enumerate.
pub const AXIOM_CHECK_LIMIT: usize = 16;

/// Serializable description of a matroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MatroidSpec {
    Uniform {
        n: usize,
        k: usize,
    },
    /// One element per edge; repeated vertex pairs are parallel edges.
    Graphic {
        vertices: usize,
        edges: Vec<[usize; 2]>,
    },
    Explicit {
        n: usize,
        independent_sets: Vec<Vec<usize>>,
    },
    Restriction {
        parent: Box<MatroidSpec>,
        ground: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
enum Kind {
    Uniform {
        k: usize,
    },
    Graphic {
        vertices: usize,
        edges: Vec<[usize; 2]>,
    },
    Explicit {
        family: HashSet<SubsetMask>,
    },
    Restriction {
        parent: Box<Matroid>,
        ground: SubsetMask,
    },
}

/// Immutable matroid oracle. Queries take `&self` and are safe to share across threads.
#[derive(Debug, Clone)]
pub struct Matroid {
    n: usize,
    kind: Kind,
}

impl Matroid {
    pub fn uniform(n: usize, k: usize) -> Self {
        Self {
            n,
            kind: Kind::Uniform { k },
        }
    }

    pub fn graphic(vertices: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        if let Some(bad) = edges.iter().flatten().find(|&&v| v >= vertices) {
            return Err(OcrsError::InvalidMatroid(format!(
                "edge endpoint {bad} outside {vertices} vertices"
            )));
        }
        Ok(Self {
            n: edges.len(),
            kind: Kind::Graphic { vertices, edges },
        })
    }

    /// The family is taken as given; `verify_axioms` detects non-matroids.
    pub fn explicit<I>(n: usize, independent_sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = SubsetMask>,
    {
        let mut family = HashSet::new();
        for s in independent_sets {
            if s.n() != n {
                return Err(OcrsError::DimensionMismatch {
                    expected: n,
                    got: s.n(),
                });
            }
            family.insert(s);
        }
        Ok(Self {
            n,
            kind: Kind::Explicit { family },
        })
    }

    pub fn from_spec(spec: &MatroidSpec) -> Result<Self> {
        match spec {
            MatroidSpec::Uniform { n, k } => Ok(Self::uniform(*n, *k)),
            MatroidSpec::Graphic { vertices, edges } => Self::graphic(*vertices, edges.clone()),
            MatroidSpec::Explicit {
                n,
                independent_sets,
            } => {
                let sets = independent_sets
                    .iter()
                    .map(|s| SubsetMask::from_elements(*n, s.iter().copied()))
                    .collect::<Result<Vec<_>>>()?;
                Self::explicit(*n, sets)
            }
            MatroidSpec::Restriction { parent, ground } => {
                let parent = Self::from_spec(parent)?;
                let ground = SubsetMask::from_elements(parent.n, ground.iter().copied())?;
                parent.restrict(&ground)
            }
        }
    }

    pub fn to_spec(&self) -> MatroidSpec {
        match &self.kind {
            Kind::Uniform { k } => MatroidSpec::Uniform { n: self.n, k: *k },
            Kind::Graphic { vertices, edges } => MatroidSpec::Graphic {
                vertices: *vertices,
                edges: edges.clone(),
            },
            Kind::Explicit { family } => {
                let mut sets: Vec<&SubsetMask> = family.iter().collect();
                sets.sort();
                MatroidSpec::Explicit {
                    n: self.n,
                    independent_sets: sets.into_iter().map(SubsetMask::to_vec).collect(),
                }
            }
            Kind::Restriction { parent, ground } => MatroidSpec::Restriction {
                parent: Box::new(parent.to_spec()),
                ground: ground.to_vec(),
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_dim(&self, s: &SubsetMask) -> Result<()> {
        if s.n() != self.n {
            return Err(OcrsError::DimensionMismatch {
                expected: self.n,
                got: s.n(),
            });
        }
        Ok(())
    }

    pub fn is_independent(&self, s: &SubsetMask) -> Result<bool> {
        self.check_dim(s)?;
        Ok(self.independent(s))
    }

    fn independent(&self, s: &SubsetMask) -> bool {
        match &self.kind {
            Kind::Uniform { k } => s.cardinality() <= *k,
            Kind::Explicit { family } => family.contains(s),
            Kind::Restriction { parent, ground } => s.is_subset(ground) && parent.independent(s),
            Kind::Graphic { .. } => {
                let mut g = self.greedy();
                s.iter().all(|e| g.try_add(e))
            }
        }
    }

    /// Incremental independence state starting from the empty set.
    pub fn greedy(&self) -> Greedy<'_> {
        Greedy {
            selected: SubsetMask::empty(self.n),
            count: 0,
            state: self.greedy_state(),
        }
    }

    fn greedy_state(&self) -> GreedyState<'_> {
        match &self.kind {
            Kind::Uniform { k } => GreedyState::Uniform { k: *k },
            Kind::Graphic { vertices, edges } => GreedyState::Graphic {
                edges,
                parent: (0..*vertices).collect(),
            },
            Kind::Explicit { family } => GreedyState::Explicit { family },
            Kind::Restriction { parent, ground } => GreedyState::Restricted {
                ground,
                inner: Box::new(parent.greedy_state()),
            },
        }
    }

    /// A basis of `s` built by scanning elements in ascending index.
    pub fn basis_of(&self, s: &SubsetMask) -> Result<SubsetMask> {
        self.check_dim(s)?;
        Ok(self.basis_unchecked(s))
    }

    fn basis_unchecked(&self, s: &SubsetMask) -> SubsetMask {
        let mut g = self.greedy();
        for e in s.iter() {
            g.try_add(e);
        }
        g.into_selected()
    }

    pub fn rank(&self, s: &SubsetMask) -> Result<usize> {
        Ok(self.basis_of(s)?.cardinality())
    }

    /// Maximum weight of an independent subset of `s`, by greedy in decreasing
    /// weight (equal weights in ascending index).
    pub fn weighted_rank(&self, w: &[f64], s: &SubsetMask) -> Result<f64> {
        self.check_dim(s)?;
        check_weights(w, self.n)?;
        let mut g = self.greedy();
        let mut total = 0.0;
        for e in order_by_weight(w).into_iter().filter(|&e| s.contains(e)) {
            if w[e] > 0.0 && g.try_add(e) {
                total += w[e];
            }
        }
        Ok(total)
    }

    /// `{ i : i in Y or Y + i dependent }` for the ascending-scan basis `Y` of `s`.
    /// For restrictions the result is confined to the restricted ground set.
    pub fn span(&self, s: &SubsetMask) -> Result<SubsetMask> {
        self.check_dim(s)?;
        let mut g = self.greedy();
        for e in s.iter() {
            g.try_add(e);
        }
        let mut out = g.selected().clone();
        for i in 0..self.n {
            if !out.contains(i) && !g.can_add(i) {
                out.insert(i);
            }
        }
        if let Kind::Restriction { ground, .. } = &self.kind {
            out = out.intersection(ground);
        }
        Ok(out)
    }

    pub fn restrict(&self, ground: &SubsetMask) -> Result<Self> {
        self.check_dim(ground)?;
        Ok(Self {
            n: self.n,
            kind: Kind::Restriction {
                parent: Box::new(self.clone()),
                ground: ground.clone(),
            },
        })
    }

    /// Exhaustive check of non-emptiness, downward closure and exchange.
    pub fn verify_axioms(&self) -> Result<bool> {
        let n = self.n;
        if n > AXIOM_CHECK_LIMIT {
            return Err(OcrsError::TooLarge {
                what: "ground set for axiom check",
                size: n,
                limit: AXIOM_CHECK_LIMIT,
            });
        }
        let size = 1usize << n;
        let indep: Vec<bool> = (0..size)
            .map(|b| self.independent(&SubsetMask::from_bits(n, b as u64)))
            .collect();
        if !indep[0] {
            return Ok(false);
        }
        for b in 0..size {
            if indep[b] && (0..n).any(|i| b >> i & 1 == 1 && !indep[b & !(1 << i)]) {
                return Ok(false);
            }
        }
        // largest[z]: size of the largest independent subset of z.
        let mut largest = vec![0u8; size];
        for z in 1..size {
            largest[z] = if indep[z] {
                z.count_ones() as u8
            } else {
                (0..n)
                    .filter(|i| z >> i & 1 == 1)
                    .map(|i| largest[z & !(1 << i)])
                    .max()
                    .unwrap_or(0)
            };
        }
        // Exchange fails for Y iff some independent X with |X| = |Y| + 1 avoids
        // every element that extends Y.
        for y in 0..size {
            if !indep[y] {
                continue;
            }
            let extend = (0..n)
                .filter(|&i| y >> i & 1 == 0 && indep[y | 1 << i])
                .fold(0usize, |acc, i| acc | 1 << i);
            let avoid = (size - 1) & !extend;
            if largest[avoid] as u32 > y.count_ones() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn check_weights(w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(OcrsError::DimensionMismatch {
            expected: n,
            got: w.len(),
        });
    }
    if let Some((element, &value)) = w.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(OcrsError::NegativeWeight { element, value });
    }
    Ok(())
}

/// Elements sorted by decreasing weight, equal weights in ascending index.
pub fn order_by_weight(w: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    order
}

enum GreedyState<'a> {
    Uniform {
        k: usize,
    },
    Graphic {
        edges: &'a [[usize; 2]],
        parent: Vec<usize>,
    },
    Explicit {
        family: &'a HashSet<SubsetMask>,
    },
    Restricted {
        ground: &'a SubsetMask,
        inner: Box<GreedyState<'a>>,
    },
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

impl GreedyState<'_> {
    fn can_add(&mut self, selected: &SubsetMask, count: usize, e: usize) -> bool {
        match self {
            Self::Uniform { k } => count < *k,
            Self::Graphic { edges, parent } => {
                let [u, v] = edges[e];
                find(parent, u) != find(parent, v)
            }
            Self::Explicit { family } => family.contains(&selected.with(e)),
            Self::Restricted { ground, inner } => {
                ground.contains(e) && inner.can_add(selected, count, e)
            }
        }
    }

    fn add(&mut self, e: usize) {
        match self {
            Self::Uniform { .. } | Self::Explicit { .. } => {}
            Self::Graphic { edges, parent } => {
                let [u, v] = edges[e];
                let (ru, rv) = (find(parent, u), find(parent, v));
                parent[ru] = rv;
            }
            Self::Restricted { inner, .. } => inner.add(e),
        }
    }
}

/// Greedy independent-set builder: elements are added only while the set stays independent.
pub struct Greedy<'a> {
    selected: SubsetMask,
    count: usize,
    state: GreedyState<'a>,
}

impl Greedy<'_> {
    /// Whether `selected + e` is independent. Elements already selected return false.
    #[inline]
    pub fn can_add(&mut self, e: usize) -> bool {
        !self.selected.contains(e) && self.state.can_add(&self.selected, self.count, e)
    }

    #[inline]
    pub fn try_add(&mut self, e: usize) -> bool {
        if self.can_add(e) {
            self.selected.insert(e);
            self.count += 1;
            self.state.add(e);
            true
        } else {
            false
        }
    }

    pub fn selected(&self) -> &SubsetMask {
        &self.selected
    }

    pub fn into_selected(self) -> SubsetMask {
        self.selected
    }
}
