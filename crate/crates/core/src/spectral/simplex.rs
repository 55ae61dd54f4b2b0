//! Dense tableau simplex with Bland's rule.
//!
//! The solver only handles problems that come with a feasible starting basis
//! (`min c.x` s.t. `A x = b`, `x >= 0`, `b >= 0`, with one identity column
//! per row), which is all the approximate-norm LP needs. It is generic over
//! the scalar so the same pivoting code runs in exact rationals and in `f64`.

use std::fmt::Debug;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

pub(crate) trait Scalar: Clone + Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_pos(&self) -> bool;
    /// `self < other`, beyond the scalar's tolerance.
    fn less(&self, other: &Self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    /// Drops round-off noise; identity for exact scalars.
    fn clean(self) -> Self {
        self
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn less(&self, other: &Self) -> bool {
        self < other
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

/// Feasibility and optimality tolerance of the floating-point path.
pub(crate) const FLOAT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn less(&self, other: &Self) -> bool {
        *self < *other - FLOAT_TOL
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn clean(self) -> Self {
        if self.abs() < 1e-13 {
            0.0
        } else {
            self
        }
    }
}

pub(crate) struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    reduced: Vec<T>,
    basis: Vec<usize>,
    cols: usize,
}

pub(crate) struct Solution<T> {
    pub values: Vec<T>,
    pub pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    /// `rows[i]` must have a unit entry in column `basis[i]` and zeros in the
    /// other basic columns; `rhs` must be nonnegative.
    pub fn new(rows: Vec<Vec<T>>, rhs: Vec<T>, cost: &[T], basis: Vec<usize>) -> Self {
        let cols = cost.len();
        let mut reduced = cost.to_vec();
        for (row, &b) in rows.iter().zip(&basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (r, a) in reduced.iter_mut().zip(row) {
                if !a.is_zero() {
                    *r = r.sub(&cb.mul(a));
                }
            }
        }
        Tableau {
            rows,
            rhs,
            reduced,
            basis,
            cols,
        }
    }

    pub fn solve(mut self, max_pivots: usize) -> Result<Solution<T>> {
        let mut pivots = 0;
        loop {
            // Bland: lowest-index improving column ...
            let Some(enter) = (0..self.cols).find(|&j| self.reduced[j].is_neg()) else {
                break;
            };
            // ... and lowest-index basic variable among minimum ratios.
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[enter];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].div(a);
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio.less(best)
                            || (!best.less(&ratio) && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((leave, _)) = leave else {
                return Err(Error::Invariant(
                    "approximate-norm LP reported unbounded".into(),
                ));
            };
            if pivots == max_pivots {
                return Err(Error::IterationCap {
                    cap: max_pivots,
                    objective: format!("{:?}", self.objective_hint()),
                    rows: self.rows.len(),
                    cols: self.cols,
                });
            }
            self.pivot(leave, enter);
            pivots += 1;
        }
        let mut values = vec![T::zero(); self.cols];
        for (i, &b) in self.basis.iter().enumerate() {
            values[b] = self.rhs[i].clone();
        }
        Ok(Solution { values, pivots })
    }

    fn objective_hint(&self) -> Vec<T> {
        self.rhs.iter().take(4).cloned().collect()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        let nz: Vec<usize> = (0..self.cols)
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        for &j in &nz {
            let v = self.rows[r][j].div(&p).clean();
            self.rows[r][j] = v;
        }
        self.rows[r][c] = one_like(&p);
        self.rhs[r] = self.rhs[r].div(&p).clean();

        let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r].clone());
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                self.rows[i][c] = T::zero();
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] = row[j].sub(&factor.mul(&pivot_row[j])).clean();
            }
            row[c] = T::zero();
            self.rhs[i] = self.rhs[i].sub(&factor.mul(&pivot_rhs)).clean();
        }
        let factor = self.reduced[c].clone();
        if !factor.is_zero() {
            for &j in &nz {
                self.reduced[j] = self.reduced[j].sub(&factor.mul(&pivot_row[j])).clean();
            }
        }
        self.reduced[c] = T::zero();
        self.basis[r] = c;
    }
}

fn one_like<T: Scalar>(p: &T) -> T {
    p.div(p)
}
