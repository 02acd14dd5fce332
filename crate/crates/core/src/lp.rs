//! The reachability LP in canonical form `min c·x, (A|I)·x = b, x >= 0` and
//! the bases that schedulers induce on it.
//!
//! Columns `0..n` belong to the maybe states (in ascending id order), columns
//! `n..n+m` are the slacks of the rows. Row `i` is the `i`-th transition of a
//! maybe state in canonical order.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_traits::{One, Zero};

use crate::mdp::{Mdp, Scheduler, StateId, TransitionId};
use crate::qualitative::{MaybeAnalysis, Objective, StateClass};
use crate::rational::ops::add_mul;
use crate::rational::{fraction_string, sign, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("no maybe states: every probability is already 0 or 1")]
    EmptyMaybeSet,
    #[error("analysis covers {analysis} states but the model has {model}")]
    AnalysisMismatch { analysis: usize, model: usize },
    #[error("scheduler gives no usable choice for maybe state {state}")]
    SchedulerDomainMismatch { state: StateId },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BasisError {
    #[error("a basis needs {expected} columns, got {actual}")]
    WrongSize { expected: usize, actual: usize },
    #[error("column {0} appears twice")]
    Duplicate(usize),
    #[error("column {0} does not exist")]
    OutOfRange(usize),
}

/// What an LP column stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Column {
    State(StateId),
    Slack(TransitionId),
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::State(s) => write!(f, "x[s{s}]"),
            Column::Slack(t) => write!(f, "slack[t{t}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    objective: Objective,
    /// Dense `m × n` block, already negated for the min objective.
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    c: Vec<Rational>,
    columns: Vec<Column>,
    rows: Vec<TransitionId>,
    /// For every MDP transition, its row if it belongs to a maybe state.
    row_of: Vec<Option<usize>>,
    maybe_states: Vec<StateId>,
}

/// Builds the LP whose optimal state columns are the optimal reachability
/// probabilities of the maybe states.
pub fn build_lp(mdp: &Mdp, analysis: &MaybeAnalysis) -> Result<LpProblem, LpError> {
    if analysis.num_states() != mdp.num_states() {
        return Err(LpError::AnalysisMismatch {
            analysis: analysis.num_states(),
            model: mdp.num_states(),
        });
    }
    let maybe = analysis.maybe_states();
    let n = maybe.len();
    if n == 0 {
        return Err(LpError::EmptyMaybeSet);
    }
    let negate = analysis.objective() == Objective::Min;

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut rows = Vec::new();
    let mut row_of = vec![None; mdp.num_transitions()];
    for &s in maybe {
        for mu in mdp.enabled(s) {
            let mut row = vec![Rational::zero(); n];
            let mut to_target = Rational::zero();
            for (t, p) in mdp.transition(mu).distribution() {
                match analysis.class(*t) {
                    StateClass::Maybe(j) => row[j] = p.clone(),
                    StateClass::Target => to_target += p,
                    StateClass::Zero => {}
                }
            }
            let own = analysis.maybe_position(s).expect("row source is a maybe state");
            row[own] -= Rational::one();
            let mut rhs = -to_target;
            if negate {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
            }
            row_of[mu] = Some(rows.len());
            rows.push(mu);
            a.push(row);
            b.push(rhs);
        }
    }
    let m = rows.len();
    let unit = if negate { -Rational::one() } else { Rational::one() };
    let mut c = vec![unit; n];
    c.extend(core::iter::repeat_n(Rational::zero(), m));
    let columns = maybe
        .iter()
        .map(|&s| Column::State(s))
        .chain(rows.iter().map(|&mu| Column::Slack(mu)))
        .collect();

    Ok(LpProblem {
        objective: analysis.objective(),
        a,
        b,
        c,
        columns,
        rows,
        row_of,
        maybe_states: maybe.to_vec(),
    })
}

impl LpProblem {
    pub fn objective(&self) -> Objective {
        self.objective
    }

    /// Number of rows (transitions of maybe states).
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Number of state columns.
    pub fn num_states(&self) -> usize {
        self.maybe_states.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn maybe_states(&self) -> &[StateId] {
        &self.maybe_states
    }

    pub fn column_identity(&self, col: usize) -> Column {
        self.columns[col]
    }

    /// Transition owning row `row`.
    pub fn row_transition(&self, row: usize) -> TransitionId {
        self.rows[row]
    }

    pub fn row_of_transition(&self, mu: TransitionId) -> Option<usize> {
        self.row_of.get(mu).copied().flatten()
    }

    pub fn slack_column(&self, row: usize) -> usize {
        self.num_states() + row
    }

    /// Entry of the full constraint matrix `(±A | I)`.
    pub fn entry(&self, row: usize, col: usize) -> Rational {
        let n = self.num_states();
        if col < n {
            self.a[row][col].clone()
        } else if col - n == row {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    /// Non-zero entries of column `col` as `(row, value)`.
    pub fn column(&self, col: usize) -> Vec<(usize, Rational)> {
        let n = self.num_states();
        if col < n {
            self.a
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .map(|(i, r)| (i, r[col].clone()))
                .collect()
        } else {
            vec![(col - n, Rational::one())]
        }
    }

    /// `y · A_col` without materialising the column.
    pub fn dot_column(&self, y: &[Rational], col: usize) -> Rational {
        let n = self.num_states();
        if col < n {
            let mut acc = Rational::zero();
            for (yi, row) in y.iter().zip(&self.a) {
                let v = &row[col];
                add_mul(&mut acc, yi, v);
            }
            acc
        } else {
            y[col - n].clone()
        }
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.b
    }

    pub fn cost(&self) -> &[Rational] {
        &self.c
    }

    /// The dense constraint matrix `(±A | I)` row by row.
    pub fn constraint_matrix(&self) -> Vec<Vec<Rational>> {
        (0..self.num_rows())
            .map(|i| (0..self.num_columns()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// `(±A|I)·x`.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let n = self.num_states();
        self.a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut acc = x[n + i].clone();
                for (v, xj) in row.iter().zip(x) {
                    add_mul(&mut acc, v, xj);
                }
                acc
            })
            .collect()
    }

    /// Human-readable LP in CPLEX-like syntax with `p/q` coefficients.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        let name = |col: usize| -> String {
            match self.columns[col] {
                Column::State(s) => alloc::format!("x_s{s}"),
                Column::Slack(t) => alloc::format!("w_t{t}"),
            }
        };
        let term = |out: &mut String, first: bool, coef: &Rational, var: &str| {
            let neg = sign(coef) < 0;
            let abs = if neg { -coef.clone() } else { coef.clone() };
            let op = match (first, neg) {
                (true, false) => "",
                (true, true) => "- ",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            if abs.is_one() {
                let _ = write!(out, "{op}{var}");
            } else {
                let _ = write!(out, "{op}{} {var}", fraction_string(&abs));
            }
        };

        let _ = writeln!(out, "\\ {} reachability, {} states, {} rows", self.objective, self.num_states(), self.num_rows());
        out.push_str("Minimize\n obj: ");
        let mut first = true;
        for col in 0..self.num_columns() {
            if !self.c[col].is_zero() {
                term(&mut out, first, &self.c[col], &name(col));
                first = false;
            }
        }
        out.push_str("\nSubject To\n");
        for i in 0..self.num_rows() {
            let _ = write!(out, " r_t{}: ", self.rows[i]);
            let mut first = true;
            for col in 0..self.num_columns() {
                let v = self.entry(i, col);
                if !v.is_zero() {
                    term(&mut out, first, &v, &name(col));
                    first = false;
                }
            }
            let _ = writeln!(out, " = {}", fraction_string(&self.b[i]));
        }
        out.push_str("End\n");
        out
    }
}

/// A set of exactly `m` distinct columns, kept ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    columns: Vec<usize>,
}

impl Basis {
    pub fn new(problem: &LpProblem, mut columns: Vec<usize>) -> Result<Self, BasisError> {
        if columns.len() != problem.num_rows() {
            return Err(BasisError::WrongSize {
                expected: problem.num_rows(),
                actual: columns.len(),
            });
        }
        columns.sort_unstable();
        if let Some(w) = columns.windows(2).find(|w| w[0] == w[1]) {
            return Err(BasisError::Duplicate(w[0]));
        }
        if let Some(&c) = columns.last().filter(|&&c| c >= problem.num_columns()) {
            return Err(BasisError::OutOfRange(c));
        }
        Ok(Basis { columns })
    }

    pub(crate) fn from_sorted_unchecked(columns: Vec<usize>) -> Self {
        debug_assert!(columns.windows(2).all(|w| w[0] < w[1]));
        Basis { columns }
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn contains(&self, col: usize) -> bool {
        self.columns.binary_search(&col).is_ok()
    }

    pub fn identities<'a>(&'a self, problem: &'a LpProblem) -> impl Iterator<Item = Column> + 'a {
        self.columns.iter().map(|&c| problem.column_identity(c))
    }
}

/// All state columns plus the slacks of every transition the scheduler does
/// not choose.
pub fn basis_from_scheduler(problem: &LpProblem, scheduler: &Scheduler) -> Result<Basis, LpError> {
    let n = problem.num_states();
    let mut chosen_rows = vec![false; problem.num_rows()];
    for &s in problem.maybe_states() {
        let row = scheduler
            .choice(s)
            .and_then(|mu| problem.row_of_transition(mu))
            .ok_or(LpError::SchedulerDomainMismatch { state: s })?;
        chosen_rows[row] = true;
    }
    let mut columns: Vec<usize> = (0..n).collect();
    columns.extend(
        chosen_rows
            .iter()
            .enumerate()
            .filter(|(_, &chosen)| !chosen)
            .map(|(r, _)| problem.slack_column(r)),
    );
    // one row per maybe state was chosen, so |columns| = n + (m - n) = m
    Ok(Basis::new(problem, columns).expect("scheduler basis has m distinct columns"))
}

/// The all-slack basis (the identity block).
pub fn default_basis(problem: &LpProblem) -> Basis {
    Basis {
        columns: (0..problem.num_rows()).map(|r| problem.slack_column(r)).collect(),
    }
}
