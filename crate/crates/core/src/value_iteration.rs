//! Floating-point value iteration: approximate optimal probabilities and a
//! candidate scheduler for the exact stage.

use alloc::vec;
use alloc::vec::Vec;

use crate::mdp::{Mdp, Scheduler, StateId, TransitionId};
use crate::qualitative::{MaybeAnalysis, Objective, StateClass};
use crate::rational::{to_f64, Rational};

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_MAX_SWEEPS: u64 = 10_000_000;
/// Backups closer than this are treated as equal when picking the scheduler.
pub const FLOAT_TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValueIterationError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("non-finite value in sweep {sweep}")]
    NonFiniteValue { sweep: u64 },
    #[error("no convergence after {sweeps} sweeps")]
    NonConvergence { sweeps: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueIterationOptions {
    pub epsilon: f64,
    pub max_sweeps: u64,
    /// Width of the band around the optimum inside which transitions count
    /// as tied. Defaults to [`FLOAT_TIE`]; widening it trades optimality of
    /// the candidate for reachability of the target.
    pub tie_tolerance: f64,
}

impl Default for ValueIterationOptions {
    fn default() -> Self {
        ValueIterationOptions {
            epsilon: DEFAULT_EPSILON,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            tie_tolerance: FLOAT_TIE,
        }
    }
}

impl ValueIterationOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        ValueIterationOptions {
            epsilon,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    /// Indexed by maybe-state position.
    pub values: Vec<f64>,
    /// Defined exactly on the maybe states.
    pub scheduler: Scheduler,
    pub iterations: u64,
    pub epsilon: f64,
}

/// One transition of a maybe state, in floating point.
struct Backup {
    id: TransitionId,
    target_mass: f64,
    /// (maybe position, probability)
    maybe_mass: Vec<(usize, f64)>,
}

impl Backup {
    fn eval(&self, x: &[f64]) -> f64 {
        self.maybe_mass
            .iter()
            .fold(self.target_mass, |acc, &(j, p)| acc + p * x[j])
    }
}

fn backups(mdp: &Mdp, analysis: &MaybeAnalysis) -> Vec<Vec<Backup>> {
    analysis
        .maybe_states()
        .iter()
        .map(|&s| {
            mdp.enabled(s)
                .map(|mu| {
                    let tr = mdp.transition(mu);
                    let mut target = Rational::from_integer(0.into());
                    let mut maybe_mass = Vec::new();
                    for (t, p) in tr.distribution() {
                        match analysis.class(*t) {
                            StateClass::Target => target += p,
                            StateClass::Maybe(j) => maybe_mass.push((j, to_f64(p))),
                            StateClass::Zero => {}
                        }
                    }
                    Backup {
                        id: mu,
                        target_mass: to_f64(&target),
                        maybe_mass,
                    }
                })
                .collect()
        })
        .collect()
}

fn better(objective: Objective, a: f64, b: f64) -> bool {
    match objective {
        Objective::Max => a > b,
        Objective::Min => a < b,
    }
}

fn optimum(objective: Objective, row: &[Backup], x: &[f64]) -> f64 {
    let mut best = row[0].eval(x);
    for b in &row[1..] {
        let v = b.eval(x);
        if better(objective, v, best) {
            best = v;
        }
    }
    best
}

/// Value iteration with default options and the given threshold.
pub fn value_iterate(mdp: &Mdp, analysis: &MaybeAnalysis, epsilon: f64) -> Result<ApproxResult, ValueIterationError> {
    value_iterate_with(mdp, analysis, &ValueIterationOptions::with_epsilon(epsilon))
}

/// Synchronous sweeps of the Bellman operator from the zero vector until the
/// largest absolute change is at most `epsilon`.
pub fn value_iterate_with(
    mdp: &Mdp,
    analysis: &MaybeAnalysis,
    options: &ValueIterationOptions,
) -> Result<ApproxResult, ValueIterationError> {
    let epsilon = options.epsilon;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ValueIterationError::InvalidEpsilon(epsilon));
    }
    let objective = analysis.objective();
    let rows = backups(mdp, analysis);
    let n = rows.len();
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut sweeps = 0u64;

    if n > 0 {
        loop {
            if sweeps >= options.max_sweeps {
                return Err(ValueIterationError::NonConvergence { sweeps });
            }
            sweeps += 1;
            let mut diff = 0.0f64;
            for (j, row) in rows.iter().enumerate() {
                let v = optimum(objective, row, &x);
                if !v.is_finite() {
                    return Err(ValueIterationError::NonFiniteValue { sweep: sweeps });
                }
                diff = diff.max((v - x[j]).abs());
                next[j] = v;
            }
            core::mem::swap(&mut x, &mut next);
            if diff <= epsilon {
                break;
            }
        }
    }

    let scheduler = greedy_scheduler(mdp, analysis, &rows, &x, options.tie_tolerance);
    Ok(ApproxResult {
        values: x,
        scheduler,
        iterations: sweeps,
        epsilon,
    })
}

/// Picks, per maybe state, a transition attaining the optimal backup.
///
/// For max, ties are resolved towards the target: states are settled in
/// breadth-first layers from the target set, each taking the lowest-index
/// tied transition that reaches an already settled state. States the layers
/// never reach fall back to the tied transition closest to the target in
/// the full graph. For min the lowest index wins.
fn greedy_scheduler(
    mdp: &Mdp,
    analysis: &MaybeAnalysis,
    rows: &[Vec<Backup>],
    x: &[f64],
    tolerance: f64,
) -> Scheduler {
    let objective = analysis.objective();
    let tied: Vec<Vec<TransitionId>> = rows
        .iter()
        .map(|row| {
            let best = optimum(objective, row, x);
            row.iter()
                .filter(|b| (b.eval(x) - best).abs() <= tolerance)
                .map(|b| b.id)
                .collect()
        })
        .collect();

    let maybe = analysis.maybe_states();
    let mut choice: Vec<Option<TransitionId>> = vec![None; maybe.len()];

    if objective == Objective::Min {
        for (j, ties) in tied.iter().enumerate() {
            choice[j] = ties.first().copied();
        }
    } else {
        let mut settled: Vec<bool> = (0..mdp.num_states()).map(|s| analysis.is_target(s)).collect();
        loop {
            let mut layer = Vec::new();
            for (j, &s) in maybe.iter().enumerate() {
                if choice[j].is_some() {
                    continue;
                }
                if let Some(&mu) = tied[j]
                    .iter()
                    .find(|&&mu| mdp.transition(mu).support().any(|t| settled[t]))
                {
                    choice[j] = Some(mu);
                    layer.push(s);
                }
            }
            if layer.is_empty() {
                break;
            }
            for s in layer {
                settled[s] = true;
            }
        }
        if choice.iter().any(Option::is_none) {
            let dist = graph_distance(mdp, analysis);
            for (j, ties) in tied.iter().enumerate() {
                if choice[j].is_none() {
                    choice[j] = ties
                        .iter()
                        .copied()
                        .min_by_key(|&mu| (transition_distance(mdp, &dist, mu), mu));
                }
            }
        }
    }

    let mut sched = Scheduler::empty(mdp);
    for (j, &s) in maybe.iter().enumerate() {
        let mu = choice[j].expect("every maybe state has at least one tied transition");
        sched.set(mdp, s, mu).expect("enabled by construction");
    }
    sched
}

/// BFS distance from each state to the target set over the whole MDP graph.
fn graph_distance(mdp: &Mdp, analysis: &MaybeAnalysis) -> Vec<usize> {
    let preds = mdp.predecessors();
    let mut dist = vec![usize::MAX; mdp.num_states()];
    let mut queue = alloc::collections::VecDeque::new();
    for &t in analysis.target_states() {
        dist[t] = 0;
        queue.push_back(t);
    }
    while let Some(t) = queue.pop_front() {
        for &mu in &preds[t] {
            let s: StateId = mdp.transition(mu).source();
            if dist[s] == usize::MAX {
                dist[s] = dist[t] + 1;
                queue.push_back(s);
            }
        }
    }
    dist
}

fn transition_distance(mdp: &Mdp, dist: &[usize], mu: TransitionId) -> usize {
    mdp.transition(mu)
        .support()
        .map(|t| dist[t])
        .min()
        .unwrap_or(usize::MAX)
        .saturating_add(1)
}
