//! Exact LU factorization of a basis matrix with product-form updates.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::lp::{Basis, LpProblem};
use crate::rational::ops::{add_mul, div, sub_mul};
use crate::rational::Rational;

use super::SimplexError;

/// One product-form update: column `position` of the basis was replaced by
/// a column whose representation in the previous basis is `alpha`.
#[derive(Debug, Clone)]
struct Eta {
    position: usize,
    pivot: Rational,
    /// non-zero entries of alpha other than the pivot
    others: Vec<(usize, Rational)>,
}

/// `P·B0 = L·U` for the basis at the last refactorization, followed by the
/// eta matrices of every pivot since.
#[derive(Debug, Clone)]
pub struct BasisFactorization {
    /// Column of the constraint matrix sitting at each basis position.
    header: Vec<usize>,
    /// Row `i` of `P·B0` is row `perm[i]` of `B0`.
    perm: Vec<usize>,
    /// Strictly lower part, unit diagonal implied.
    lower: Vec<Vec<Rational>>,
    upper: Vec<Vec<Rational>>,
    /// Non-zeros of `lower` and `upper` together.
    lu_nonzeros: usize,
    etas: Vec<Eta>,
    eta_nonzeros: usize,
}

/// Factorizes the columns of `basis`.
pub fn factorize_basis(problem: &LpProblem, basis: &Basis) -> Result<BasisFactorization, SimplexError> {
    if basis.len() != problem.num_rows() {
        return Err(SimplexError::BasisSize {
            expected: problem.num_rows(),
            actual: basis.len(),
        });
    }
    BasisFactorization::new(problem, basis.columns().to_vec())
}

/// Slack columns first: they are unit vectors and cause no fill, leaving
/// only the state columns to eliminate.
fn elimination_order(problem: &LpProblem, mut header: Vec<usize>) -> Vec<usize> {
    let n = problem.num_states();
    header.sort_unstable_by_key(|&c| (c < n, c));
    header
}

impl BasisFactorization {
    /// Factorizes the basis made of the columns in `header`. Positions are
    /// assigned afresh; see [`BasisFactorization::header`].
    pub fn new(problem: &LpProblem, header: Vec<usize>) -> Result<Self, SimplexError> {
        let header = elimination_order(problem, header);
        let m = header.len();
        let mut mat = vec![vec![Rational::zero(); m]; m];
        for (r, &col) in header.iter().enumerate() {
            for (i, v) in problem.column(col) {
                mat[i][r] = v;
            }
        }
        let mut perm: Vec<usize> = (0..m).collect();
        let mut lower = vec![vec![Rational::zero(); m]; m];

        for k in 0..m {
            let p = (k..m)
                .find(|&i| !mat[i][k].is_zero())
                .ok_or(SimplexError::SingularBasis { position: k })?;
            if p != k {
                mat.swap(p, k);
                lower.swap(p, k);
                perm.swap(p, k);
            }
            let (top, bottom) = mat.split_at_mut(k + 1);
            let pivot_row = &top[k];
            let pivot = &pivot_row[k];
            for (off, row) in bottom.iter_mut().enumerate() {
                if row[k].is_zero() {
                    continue;
                }
                let factor = div(&row[k], pivot);
                for j in k + 1..m {
                    sub_mul(&mut row[j], &factor, &pivot_row[j]);
                }
                row[k] = Rational::zero();
                lower[k + 1 + off][k] = factor;
            }
        }

        let count = |rows: &[Vec<Rational>]| rows.iter().flatten().filter(|v| !v.is_zero()).count();
        let lu_nonzeros = count(&lower) + count(&mat);
        Ok(BasisFactorization {
            header,
            perm,
            lower,
            upper: mat,
            lu_nonzeros,
            etas: Vec::new(),
            eta_nonzeros: 0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.header.len()
    }

    /// Column held at each basis position.
    pub fn header(&self) -> &[usize] {
        &self.header
    }

    pub fn basis(&self) -> Basis {
        let mut cols = self.header.clone();
        cols.sort_unstable();
        Basis::from_sorted_unchecked(cols)
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// True once the updates carry more non-zeros than the factors
    /// themselves, at which point a fresh factorization solves faster.
    pub fn updates_outweigh_factors(&self) -> bool {
        self.eta_nonzeros > self.lu_nonzeros
    }

    /// Solves `B·x = rhs`, with `x` indexed by basis position.
    pub fn solve(&self, rhs: &[Rational]) -> Vec<Rational> {
        let m = self.dimension();
        let mut z: Vec<Rational> = self.perm.iter().map(|&i| rhs[i].clone()).collect();
        for i in 0..m {
            let mut acc = core::mem::take(&mut z[i]);
            for (l, zk) in self.lower[i][..i].iter().zip(&z[..i]) {
                sub_mul(&mut acc, l, zk);
            }
            z[i] = acc;
        }
        for i in (0..m).rev() {
            let mut acc = core::mem::take(&mut z[i]);
            for (u, zk) in self.upper[i][i + 1..].iter().zip(&z[i + 1..]) {
                sub_mul(&mut acc, u, zk);
            }
            z[i] = div(&acc, &self.upper[i][i]);
        }
        for eta in &self.etas {
            let xp = div(&z[eta.position], &eta.pivot);
            for (i, a) in &eta.others {
                sub_mul(&mut z[*i], a, &xp);
            }
            z[eta.position] = xp;
        }
        z
    }

    /// Solves `yᵀ·B = rhsᵀ`, with `rhs` indexed by basis position and `y` by row.
    pub fn solve_transposed(&self, rhs: &[Rational]) -> Vec<Rational> {
        let m = self.dimension();
        let mut w = rhs.to_vec();
        for eta in self.etas.iter().rev() {
            let mut acc = core::mem::take(&mut w[eta.position]);
            for (i, a) in &eta.others {
                sub_mul(&mut acc, &w[*i], a);
            }
            w[eta.position] = div(&acc, &eta.pivot);
        }
        // Uᵀ·a = w
        for i in 0..m {
            let mut acc = core::mem::take(&mut w[i]);
            for (row, wk) in self.upper[..i].iter().zip(&w[..i]) {
                sub_mul(&mut acc, &row[i], wk);
            }
            w[i] = div(&acc, &self.upper[i][i]);
        }
        // Lᵀ·g = a
        for i in (0..m).rev() {
            let mut acc = core::mem::take(&mut w[i]);
            for (row, wk) in self.lower[i + 1..].iter().zip(&w[i + 1..]) {
                sub_mul(&mut acc, &row[i], wk);
            }
            w[i] = acc;
        }
        let mut y = vec![Rational::zero(); m];
        for (i, g) in w.into_iter().enumerate() {
            y[self.perm[i]] = g;
        }
        y
    }

    /// Replaces the column at `position` by `entering`, given
    /// `alpha = B⁻¹·A_entering`. `alpha[position]` must be non-zero.
    pub fn replace(&mut self, position: usize, entering: usize, alpha: &[Rational]) {
        let pivot = alpha[position].clone();
        assert!(!pivot.is_zero(), "pivot on a zero element");
        let others: Vec<(usize, Rational)> = alpha
            .iter()
            .enumerate()
            .filter(|(i, a)| *i != position && !a.is_zero())
            .map(|(i, a)| (i, a.clone()))
            .collect();
        self.eta_nonzeros += others.len() + 1;
        self.etas.push(Eta {
            position,
            pivot,
            others,
        });
        self.header[position] = entering;
    }

    /// `Pᵀ·L·U`, the basis matrix at the last refactorization, with its
    /// columns in ascending column order.
    pub fn reconstruct(&self) -> Vec<Vec<Rational>> {
        let m = self.dimension();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_unstable_by_key(|&j| self.header[j]);
        let mut b = vec![vec![Rational::zero(); m]; m];
        for i in 0..m {
            for (out, &j) in order.iter().enumerate() {
                let mut acc = self.upper[i][j].clone();
                for k in 0..i.min(j + 1) {
                    add_mul(&mut acc, &self.lower[i][k], &self.upper[k][j]);
                }
                b[self.perm[i]][out] = acc;
            }
        }
        b
    }
}
