//! Rational simplex over the canonical form, started from a caller-supplied
//! basis.
//!
//! Both variants use Bland's least-index rule for the entering and the
//! leaving choice, so they terminate in exact arithmetic even on degenerate
//! problems. Neither introduces artificial columns: the primal method gets
//! feasible by minimising the total infeasibility of the current basic
//! solution, and the dual method becomes dual feasible (when the start is
//! not) by running primal phase two against a right-hand side for which the
//! start basis is feasible.

mod factorization;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_traits::{One, Zero};

use crate::lp::{Basis, Column, LpProblem};
use crate::rational::ops::{add_mul, cmp_fractions, div, sub, sub_mul};
use crate::rational::{sign, Rational};

pub use factorization::{factorize_basis, BasisFactorization};

/// Pivots between refactorizations.
pub const REFACTOR_INTERVAL: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimplexError {
    #[error("basis is singular (no pivot at position {position})")]
    SingularBasis { position: usize },
    #[error("a basis needs {expected} columns, got {actual}")]
    BasisSize { expected: usize, actual: usize },
    #[error("basic solution violates the constraints after refactorization")]
    ResidualMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimplexStatus {
    Optimal,
    IterationLimit,
    /// No feasible point.
    Infeasible,
    /// Objective unbounded below (or, from the dual method's first phase,
    /// no dual feasible basis exists).
    Unbounded,
}

impl fmt::Display for SimplexStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimplexStatus::Optimal => "optimal",
            SimplexStatus::IterationLimit => "iteration-limit",
            SimplexStatus::Infeasible => "infeasible",
            SimplexStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Primal,
    Dual,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Primal => "primal",
            Variant::Dual => "dual",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PivotRecord {
    /// 1-based.
    pub iteration: usize,
    pub phase: Phase,
    pub entering: Column,
    pub leaving: Column,
}

impl fmt::Display for PivotRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phase = match self.phase {
            Phase::One => 1,
            Phase::Two => 2,
        };
        write!(f, "{} phase{} enter {} leave {}", self.iteration, phase, self.entering, self.leaving)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexOutcome {
    pub status: SimplexStatus,
    /// Basic solution of the final basis, over all `n + m` columns.
    pub solution: Vec<Rational>,
    pub objective: Rational,
    pub basis: Basis,
    pub pivots: usize,
    pub phase_one_pivots: usize,
    pub phase_log: Vec<PivotRecord>,
}

impl SimplexOutcome {
    /// One line per pivot: `<iteration> phase<k> enter <column> leave <column>`.
    pub fn pivot_log_text(&self) -> String {
        let mut out = String::new();
        for p in &self.phase_log {
            let _ = writeln!(out, "{p}");
        }
        out
    }
}

/// Default cap on pivots: `10 · (n + m)`.
pub fn default_iteration_limit(problem: &LpProblem) -> usize {
    10 * problem.num_columns()
}

/// The solution induced by the factorized basis: zero off the basis,
/// `B⁻¹·b` on it.
pub fn basic_solution(problem: &LpProblem, fact: &BasisFactorization) -> Vec<Rational> {
    let xb = fact.solve(problem.rhs());
    let mut x = vec![Rational::zero(); problem.num_columns()];
    for (value, &col) in xb.into_iter().zip(fact.header()) {
        x[col] = value;
    }
    x
}

/// Reduced costs `c_k − c_B·B⁻¹·A_k` of every non-basic column, ascending
/// by column.
pub fn reduced_costs(problem: &LpProblem, fact: &BasisFactorization) -> Vec<(usize, Rational)> {
    let y = duals(problem, fact);
    let basic = basic_mask(problem, fact);
    (0..problem.num_columns())
        .filter(|&k| !basic[k])
        .map(|k| (k, sub(&problem.cost()[k], &problem.dot_column(&y, k))))
        .collect()
}

/// True when no reduced cost is negative.
pub fn is_dual_feasible(problem: &LpProblem, fact: &BasisFactorization) -> bool {
    reduced_costs(problem, fact).iter().all(|(_, rc)| sign(rc) >= 0)
}

fn duals(problem: &LpProblem, fact: &BasisFactorization) -> Vec<Rational> {
    let cb: Vec<Rational> = fact.header().iter().map(|&c| problem.cost()[c].clone()).collect();
    fact.solve_transposed(&cb)
}

fn basic_mask(problem: &LpProblem, fact: &BasisFactorization) -> Vec<bool> {
    let mut mask = vec![false; problem.num_columns()];
    for &c in fact.header() {
        mask[c] = true;
    }
    mask
}

fn dense_column(problem: &LpProblem, col: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); problem.num_rows()];
    for (i, a) in problem.column(col) {
        v[i] = a;
    }
    v
}

/// Two-phase primal simplex from `start`.
pub fn primal_simplex(problem: &LpProblem, start: &Basis, limit: Option<usize>) -> Result<SimplexOutcome, SimplexError> {
    let mut solver = Solver::new(problem, start, limit)?;
    let status = solver.primal(problem.rhs(), true, Phase::Two)?;
    solver.finish(status)
}

/// Dual simplex from `start`; skips its first phase when `start` is already
/// dual feasible.
pub fn dual_simplex(problem: &LpProblem, start: &Basis, limit: Option<usize>) -> Result<SimplexOutcome, SimplexError> {
    let mut solver = Solver::new(problem, start, limit)?;
    let status = solver.dual()?;
    solver.finish(status)
}

pub fn solve(problem: &LpProblem, start: &Basis, variant: Variant, limit: Option<usize>) -> Result<SimplexOutcome, SimplexError> {
    match variant {
        Variant::Primal => primal_simplex(problem, start, limit),
        Variant::Dual => dual_simplex(problem, start, limit),
    }
}

struct Solver<'a> {
    problem: &'a LpProblem,
    fact: BasisFactorization,
    basic: Vec<bool>,
    limit: usize,
    pivots: usize,
    phase_one_pivots: usize,
    log: Vec<PivotRecord>,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a LpProblem, start: &Basis, limit: Option<usize>) -> Result<Self, SimplexError> {
        let fact = factorize_basis(problem, start)?;
        let basic = basic_mask(problem, &fact);
        Ok(Solver {
            problem,
            fact,
            basic,
            limit: limit.unwrap_or_else(|| default_iteration_limit(problem)),
            pivots: 0,
            phase_one_pivots: 0,
            log: Vec::new(),
        })
    }

    /// Returns whether the basis was refactorized, which reassigns positions.
    fn pivot(&mut self, position: usize, entering: usize, alpha: &[Rational], phase: Phase) -> Result<bool, SimplexError> {
        let leaving = self.fact.header()[position];
        self.fact.replace(position, entering, alpha);
        self.basic[leaving] = false;
        self.basic[entering] = true;
        self.pivots += 1;
        if phase == Phase::One {
            self.phase_one_pivots += 1;
        }
        self.log.push(PivotRecord {
            iteration: self.pivots,
            phase,
            entering: self.problem.column_identity(entering),
            leaving: self.problem.column_identity(leaving),
        });
        if self.fact.num_updates() >= REFACTOR_INTERVAL || self.fact.updates_outweigh_factors() {
            self.refactor()?;
            return Ok(true);
        }
        Ok(false)
    }

    fn refactor(&mut self) -> Result<(), SimplexError> {
        self.fact = BasisFactorization::new(self.problem, self.fact.header().to_vec())?;
        self.check_residual()
    }

    fn check_residual(&self) -> Result<(), SimplexError> {
        let x = basic_solution(self.problem, &self.fact);
        if self.problem.apply(&x) != self.problem.rhs() {
            return Err(SimplexError::ResidualMismatch);
        }
        Ok(())
    }

    /// Primal iterations against `rhs`. With `seek_feasibility`, a basic
    /// solution with negative entries first minimises their total magnitude;
    /// otherwise the basis must already be feasible for `rhs`.
    fn primal(&mut self, rhs: &[Rational], seek_feasibility: bool, label: Phase) -> Result<SimplexStatus, SimplexError> {
        let problem = self.problem;
        let m = problem.num_rows();
        loop {
            let xb = self.fact.solve(rhs);
            let negative: Vec<bool> = xb.iter().map(|v| sign(v) < 0).collect();
            let phase_one = seek_feasibility && negative.iter().any(|&b| b);

            let costs: Vec<Rational> = if phase_one {
                negative
                    .iter()
                    .map(|&neg| if neg { -Rational::one() } else { Rational::zero() })
                    .collect()
            } else {
                self.fact.header().iter().map(|&c| problem.cost()[c].clone()).collect()
            };
            let y = self.fact.solve_transposed(&costs);
            let entering = (0..problem.num_columns()).find(|&k| {
                if self.basic[k] {
                    return false;
                }
                let direct = if phase_one { Rational::zero() } else { problem.cost()[k].clone() };
                sign(&sub(&direct, &problem.dot_column(&y, k))) < 0
            });
            let Some(entering) = entering else {
                return Ok(if phase_one { SimplexStatus::Infeasible } else { SimplexStatus::Optimal });
            };
            if self.pivots >= self.limit {
                return Ok(SimplexStatus::IterationLimit);
            }

            let alpha = self.fact.solve(&dense_column(problem, entering));
            // (ratio as numerator and positive denominator, column of the
            // basic variable, position)
            let mut best: Option<(Rational, Rational, usize, usize)> = None;
            for r in 0..m {
                let a = &alpha[r];
                let eligible = if phase_one && negative[r] {
                    sign(a) < 0
                } else {
                    sign(a) > 0
                };
                if !eligible {
                    continue;
                }
                let (num, den) = if sign(a) < 0 { (-&xb[r], -a) } else { (xb[r].clone(), a.clone()) };
                let col = self.fact.header()[r];
                let better = match &best {
                    None => true,
                    Some((tn, td, c, _)) => match cmp_fractions(&num, &den, tn, td) {
                        core::cmp::Ordering::Less => true,
                        core::cmp::Ordering::Equal => col < *c,
                        core::cmp::Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((num, den, col, r));
                }
            }
            let Some((_, _, _, position)) = best else {
                // phase one always has a blocking row: some negative basic
                // variable grows towards zero
                debug_assert!(!phase_one);
                return Ok(SimplexStatus::Unbounded);
            };
            let phase = if phase_one { Phase::One } else { label };
            self.pivot(position, entering, &alpha, phase)?;
        }
    }

    fn dual(&mut self) -> Result<SimplexStatus, SimplexError> {
        let problem = self.problem;
        if !is_dual_feasible(problem, &self.fact) {
            // B·1 makes the current basis primal feasible; optimality for that
            // right-hand side is dual feasibility for ours.
            let mut shifted = vec![Rational::zero(); problem.num_rows()];
            for &col in self.fact.header() {
                for (i, a) in problem.column(col) {
                    shifted[i] += a;
                }
            }
            match self.primal(&shifted, false, Phase::One)? {
                SimplexStatus::Optimal => {}
                other => return Ok(other),
            }
        }

        // x_B and y are updated in place between refactorizations
        let mut xb = self.fact.solve(problem.rhs());
        let mut y = duals(problem, &self.fact);
        loop {
            let leaving = (0..problem.num_rows())
                .filter(|&r| sign(&xb[r]) < 0)
                .min_by_key(|&r| self.fact.header()[r]);
            let Some(position) = leaving else {
                return Ok(SimplexStatus::Optimal);
            };
            if self.pivots >= self.limit {
                return Ok(SimplexStatus::IterationLimit);
            }

            let mut unit = vec![Rational::zero(); problem.num_rows()];
            unit[position] = Rational::one();
            let rho = self.fact.solve_transposed(&unit);

            // (reduced cost, -alpha_rk, column): the ratio is their quotient
            let mut best: Option<(Rational, Rational, usize)> = None;
            for k in 0..problem.num_columns() {
                if self.basic[k] {
                    continue;
                }
                let a = problem.dot_column(&rho, k);
                if sign(&a) >= 0 {
                    continue;
                }
                let rc = sub(&problem.cost()[k], &problem.dot_column(&y, k));
                let den = -a;
                if best.as_ref().is_none_or(|(tn, td, _)| cmp_fractions(&rc, &den, tn, td).is_lt()) {
                    best = Some((rc, den, k));
                }
            }
            let Some((rc, _, entering)) = best else {
                return Ok(SimplexStatus::Infeasible);
            };
            let alpha = self.fact.solve(&dense_column(problem, entering));

            let primal_step = div(&xb[position], &alpha[position]);
            for (x, a) in xb.iter_mut().zip(&alpha) {
                sub_mul(x, &primal_step, a);
            }
            xb[position] = primal_step;
            let dual_step = div(&rc, &alpha[position]);
            for (yi, r) in y.iter_mut().zip(&rho) {
                add_mul(yi, &dual_step, r);
            }

            if self.pivot(position, entering, &alpha, Phase::Two)? {
                xb = self.fact.solve(problem.rhs());
            }
        }
    }

    fn finish(self, status: SimplexStatus) -> Result<SimplexOutcome, SimplexError> {
        self.check_residual()?;
        let solution = basic_solution(self.problem, &self.fact);
        let objective = solution
            .iter()
            .zip(self.problem.cost())
            .filter(|(x, c)| !x.is_zero() && !c.is_zero())
            .map(|(x, c)| x * c)
            .sum();
        Ok(SimplexOutcome {
            status,
            solution,
            objective,
            basis: self.fact.basis(),
            pivots: self.pivots,
            phase_one_pivots: self.phase_one_pivots,
            phase_log: self.log,
        })
    }
}

#[cfg(test)]
mod tests;
