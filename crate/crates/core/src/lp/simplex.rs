//! Dense two-phase tableau simplex with Bland's rule, generic over the scalar type.

use crate::error::{OcrsError, Result};
use crate::numeric::Scalar;

const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row<S> {
    coeffs: Vec<S>,
    relation: Relation,
    rhs: S,
}

/// `maximize c·x  subject to  rows, x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    objective: Vec<S>,
    rows: Vec<Row<S>>,
}

#[derive(Debug, Clone)]
pub struct LpOptimum<S> {
    pub value: S,
    pub x: Vec<S>,
    pub pivots: usize,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(objective: Vec<S>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Panics if `coeffs` does not have one entry per variable.
    pub fn constrain(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn maximize(&self) -> Result<LpOptimum<S>> {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau<S> {
    /// Each row has `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<S>>,
    obj: Vec<S>,
    basis: Vec<usize>,
    num_vars: usize,
    cols: usize,
    artificial_start: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let n = lp.num_vars();
        let normalized: Vec<Row<S>> = lp
            .rows
            .iter()
            .map(|r| {
                if r.rhs < S::zero() {
                    Row {
                        coeffs: r.coeffs.iter().map(|c| -c.clone()).collect(),
                        relation: match r.relation {
                            Relation::Le => Relation::Ge,
                            Relation::Ge => Relation::Le,
                            Relation::Eq => Relation::Eq,
                        },
                        rhs: -r.rhs.clone(),
                    }
                } else {
                    r.clone()
                }
            })
            .collect();
        let slacks = normalized
            .iter()
            .filter(|r| r.relation != Relation::Eq)
            .count();
        let artificials = normalized
            .iter()
            .filter(|r| r.relation != Relation::Le)
            .count();
        let artificial_start = n + slacks;
        let cols = artificial_start + artificials;
        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_art) = (n, artificial_start);
        for r in normalized {
            let mut row = r.coeffs;
            row.resize(cols + 1, S::zero());
            match r.relation {
                Relation::Le => {
                    row[next_slack] = S::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -S::one();
                    next_slack += 1;
                    row[next_art] = S::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = S::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            row[cols] = r.rhs;
            rows.push(row);
        }
        Self {
            rows,
            obj: vec![S::zero(); cols + 1],
            basis,
            num_vars: n,
            cols,
            artificial_start,
            pivots: 0,
        }
    }

    fn solve(mut self, objective: &[S]) -> Result<LpOptimum<S>> {
        if self.artificial_start < self.cols {
            let mut phase1 = vec![S::zero(); self.cols];
            for c in phase1.iter_mut().skip(self.artificial_start) {
                *c = -S::one();
            }
            self.set_objective(&phase1);
            self.optimize(self.cols)?;
            if self.obj[self.cols].is_neg() {
                return Err(OcrsError::Infeasible);
            }
            self.expel_artificials();
        }
        let mut phase2 = objective.to_vec();
        phase2.resize(self.cols, S::zero());
        self.set_objective(&phase2);
        self.optimize(self.artificial_start)?;

        let mut x = vec![S::zero(); self.num_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.num_vars {
                x[b] = self.rows[r][self.cols].clone();
            }
        }
        Ok(LpOptimum {
            value: self.obj[self.cols].clone(),
            x,
            pivots: self.pivots,
        })
    }

    /// Reduced-cost row for `maximize c·x` priced against the current basis.
    fn set_objective(&mut self, c: &[S]) {
        self.obj = c.iter().map(|v| -v.clone()).collect();
        self.obj.push(S::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let factor = self.obj[b].clone();
            if factor != S::zero() {
                for (o, v) in self.obj.iter_mut().zip(&self.rows[r]) {
                    *o = o.clone() - factor.clone() * v.clone();
                }
            }
        }
    }

    /// Primal simplex over columns `0..allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j].is_neg()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, S)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[enter].is_pos() {
                    continue;
                }
                let ratio = row[self.cols].clone() / row[enter].clone();
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio
                            || (ratio <= best_ratio && self.basis[r] < self.basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((leave, _)) = leave else {
                return Err(OcrsError::Unbounded);
            };
            self.pivot(leave, enter);
            if self.pivots > MAX_PIVOTS {
                return Err(OcrsError::NumericalDegeneracy(format!(
                    "simplex exceeded {MAX_PIVOTS} pivots"
                )));
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rows[r][c] = S::one();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<S>| {
            let factor = row[c].clone();
            if factor != S::zero() {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
                row[c] = S::zero();
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// After phase one, pivots artificial variables out of the basis or drops
    /// their (redundant) rows.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.artificial_start {
                match (0..self.artificial_start).find(|&j| !self.rows[r][j].is_negligible()) {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
}
