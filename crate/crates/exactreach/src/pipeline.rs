//! The checking pipeline: qualitative analysis, value iteration, LP
//! construction, scheduler basis, exact simplex.

use std::fmt;
use std::time::Instant;

use exactreach_core::lp::LpError;
use exactreach_core::qualitative::StateClass;
use exactreach_core::simplex::{self, PivotRecord, SimplexError};
use exactreach_core::value_iteration::{value_iterate_with, ValueIterationError, ValueIterationOptions, DEFAULT_EPSILON};
use exactreach_core::{
    basis_from_scheduler, build_lp, default_basis, maybe_states, Mdp, Objective, Rational, Scheduler, SimplexStatus,
    StateSet, Variant,
};
use num_traits::{One, Zero};

use crate::format::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StartBasis {
    Scheduler,
    Default,
}

impl fmt::Display for StartBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StartBasis::Scheduler => "scheduler",
            StartBasis::Default => "default",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub epsilon: f64,
    pub variant: Variant,
    pub start_basis: StartBasis,
    /// On a singular scheduler basis (max only), retry once with value
    /// iteration counting everything within `epsilon` of the optimum as
    /// tied, so the tie-break can steer towards the target.
    pub repair_apt: bool,
    /// Replaces the value-iteration scheduler on the maybe states.
    pub scheduler_override: Option<Scheduler>,
    /// Pivot cap; `None` means `10 · (n + m)`.
    pub iteration_limit: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            epsilon: DEFAULT_EPSILON,
            variant: Variant::Dual,
            start_basis: StartBasis::Scheduler,
            repair_apt: false,
            scheduler_override: None,
            iteration_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Exact,
    SchedulerNotApt,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::SchedulerNotApt => "scheduler-not-apt",
            Status::Error => "error",
        })
    }
}

/// Wall-clock seconds per phase. LP construction includes building the
/// start basis.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub value_iteration_s: f64,
    pub lp_construction_s: f64,
    pub simplex_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub objective: Objective,
    pub status: Status,
    /// Exact value per state; empty unless `status` is `Exact`.
    pub values: Vec<Rational>,
    /// Value-iteration estimate per state (0/1 outside the maybe states).
    pub approx: Vec<f64>,
    pub pivots: usize,
    pub scheduler_optimal: bool,
    /// The candidate scheduler handed to the LP stage.
    pub scheduler: Scheduler,
    pub pivot_log: Vec<PivotRecord>,
    /// LP size as (maybe states, rows); zero when no LP was needed.
    pub lp_size: (usize, usize),
    pub repaired: bool,
    /// Explanation when `status` is not `Exact`.
    pub message: Option<String>,
    pub timings: Timings,
}

impl ExactResult {
    pub fn pivot_log_text(&self) -> String {
        self.pivot_log.iter().map(|p| format!("{p}\n")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("unknown target label `{0}`")]
    UnknownLabel(String),
    #[error("target state {0} does not exist")]
    UnknownTarget(usize),
    #[error("value iteration failed: {0}")]
    ValueIteration(#[from] ValueIterationError),
    #[error("LP construction failed: {0}")]
    Lp(#[from] LpError),
}

/// Runs the pipeline on `model` with the states labelled `target` as goal.
pub fn run(model: &Model, objective: Objective, target: &str, options: &RunOptions) -> Result<ExactResult, RunError> {
    let targets = model
        .label(target)
        .ok_or_else(|| RunError::UnknownLabel(target.to_string()))?;
    check(&model.mdp, targets, objective, options)
}

/// Runs the pipeline on an MDP and an explicit target set.
pub fn check(mdp: &Mdp, targets: &StateSet, objective: Objective, options: &RunOptions) -> Result<ExactResult, RunError> {
    if let Some(&bad) = targets.iter().find(|&&s| s >= mdp.num_states()) {
        return Err(RunError::UnknownTarget(bad));
    }
    let clock = Instant::now();
    let analysis = maybe_states(mdp, targets, objective);
    let frame = |x: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..mdp.num_states())
            .map(|s| match analysis.class(s) {
                StateClass::Target => 1.0,
                StateClass::Zero => 0.0,
                StateClass::Maybe(j) => x(j),
            })
            .collect()
    };
    let exact_frame = |x: &[Rational]| -> Vec<Rational> {
        (0..mdp.num_states())
            .map(|s| match analysis.class(s) {
                StateClass::Target => Rational::one(),
                StateClass::Zero => Rational::zero(),
                StateClass::Maybe(j) => x[j].clone(),
            })
            .collect()
    };

    let mut result = ExactResult {
        objective,
        status: Status::Exact,
        values: Vec::new(),
        approx: Vec::new(),
        pivots: 0,
        scheduler_optimal: true,
        scheduler: Scheduler::empty(mdp),
        pivot_log: Vec::new(),
        lp_size: (0, 0),
        repaired: false,
        message: None,
        timings: Timings::default(),
    };

    if analysis.num_maybe() == 0 {
        result.values = exact_frame(&[]);
        result.approx = frame(&|_| unreachable!());
        result.timings.total_s = clock.elapsed().as_secs_f64();
        return Ok(result);
    }

    let mut vi_options = ValueIterationOptions::with_epsilon(options.epsilon);
    let t = Instant::now();
    let mut approx = value_iterate_with(mdp, &analysis, &vi_options)?;
    result.timings.value_iteration_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let problem = build_lp(mdp, &analysis)?;
    result.lp_size = (problem.num_states(), problem.num_rows());
    let mut candidate = match &options.scheduler_override {
        Some(s) => s.restricted_to(analysis.maybe_states()),
        None => approx.scheduler.clone(),
    };
    let mut start = match options.start_basis {
        StartBasis::Scheduler => basis_from_scheduler(&problem, &candidate)?,
        StartBasis::Default => default_basis(&problem),
    };
    result.timings.lp_construction_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut repair_vi_s = 0.0;
    let mut outcome = simplex::solve(&problem, &start, options.variant, options.iteration_limit);
    let retry = options.repair_apt
        && options.scheduler_override.is_none()
        && objective == Objective::Max
        && matches!(outcome, Err(SimplexError::SingularBasis { .. }));
    if retry {
        vi_options.tie_tolerance = options.epsilon;
        let v = Instant::now();
        approx = value_iterate_with(mdp, &analysis, &vi_options)?;
        repair_vi_s = v.elapsed().as_secs_f64();
        result.timings.value_iteration_s += repair_vi_s;
        candidate = approx.scheduler.clone();
        start = basis_from_scheduler(&problem, &candidate)?;
        outcome = simplex::solve(&problem, &start, options.variant, options.iteration_limit);
        result.repaired = true;
    }
    result.timings.simplex_s = t.elapsed().as_secs_f64() - repair_vi_s;
    result.approx = frame(&|j| approx.values[j]);
    result.scheduler = candidate;

    match outcome {
        Ok(out) => {
            result.pivots = out.pivots;
            result.scheduler_optimal = out.pivots == 0;
            result.pivot_log = out.phase_log;
            if out.status == SimplexStatus::Optimal {
                result.values = exact_frame(&out.solution[..problem.num_states()]);
            } else {
                result.status = Status::Error;
                result.scheduler_optimal = false;
                result.message = Some(format!("simplex stopped with status {}", out.status));
            }
        }
        Err(SimplexError::SingularBasis { .. }) if objective == Objective::Max => {
            result.status = Status::SchedulerNotApt;
            result.scheduler_optimal = false;
            result.message = Some("the scheduler basis is singular: the candidate scheduler is not apt".into());
        }
        Err(e) => {
            result.status = Status::Error;
            result.scheduler_optimal = false;
            result.message = Some(format!("internal error: {e}"));
        }
    }
    result.timings.total_s = clock.elapsed().as_secs_f64();
    Ok(result)
}
