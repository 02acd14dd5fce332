//! Graph-based precomputation: states with zero optimal probability, the
//! maybe states left for the LP, and the apt check on schedulers.
//!
//! Nothing here does arithmetic on probabilities; only supports matter.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::mdp::{Mdp, Scheduler, StateId, TransitionId};

pub type StateSet = BTreeSet<StateId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Objective {
    Max,
    Min,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Max => "max",
            Objective::Min => "min",
        })
    }
}

/// Role of a state in a reachability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    Target,
    Zero,
    /// Position in the sorted maybe list.
    Maybe(usize),
}

/// Partition of the state space for one objective and target set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaybeAnalysis {
    objective: Objective,
    zero_states: StateSet,
    target_states: StateSet,
    maybe_states: Vec<StateId>,
    class: Vec<StateClass>,
}

impl MaybeAnalysis {
    pub fn objective(&self) -> Objective {
        self.objective
    }

    /// States with optimal probability zero (never targets).
    pub fn zero_states(&self) -> &StateSet {
        &self.zero_states
    }

    pub fn target_states(&self) -> &StateSet {
        &self.target_states
    }

    /// Maybe states in ascending id order; position `j` is LP column `j`.
    pub fn maybe_states(&self) -> &[StateId] {
        &self.maybe_states
    }

    pub fn num_maybe(&self) -> usize {
        self.maybe_states.len()
    }

    pub fn num_states(&self) -> usize {
        self.class.len()
    }

    pub fn class(&self, state: StateId) -> StateClass {
        self.class[state]
    }

    /// Position of `state` among the maybe states.
    pub fn maybe_position(&self, state: StateId) -> Option<usize> {
        match self.class[state] {
            StateClass::Maybe(j) => Some(j),
            _ => None,
        }
    }

    pub fn is_target(&self, state: StateId) -> bool {
        self.class[state] == StateClass::Target
    }
}

fn membership(n: usize, set: &StateSet) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &s in set {
        mask[s] = true;
    }
    mask
}

fn complement(mask: &[bool]) -> StateSet {
    mask.iter()
        .enumerate()
        .filter_map(|(s, &inside)| (!inside).then_some(s))
        .collect()
}

/// States from which no scheduler reaches `targets` with positive
/// probability: the complement of backward reachability from `targets`.
pub fn prob0_max(mdp: &Mdp, targets: &StateSet) -> StateSet {
    prob0_max_with(mdp, targets, &mdp.predecessors())
}

fn prob0_max_with(mdp: &Mdp, targets: &StateSet, preds: &[Vec<TransitionId>]) -> StateSet {
    let mut reaches = membership(mdp.num_states(), targets);
    let mut work: VecDeque<StateId> = targets.iter().copied().collect();
    while let Some(t) = work.pop_front() {
        for &mu in &preds[t] {
            let s = mdp.transition(mu).source();
            if !reaches[s] {
                reaches[s] = true;
                work.push_back(s);
            }
        }
    }
    complement(&reaches)
}

/// States from which some scheduler avoids `targets` forever: the largest
/// set outside `targets` in which every state keeps a transition whose whole
/// support stays inside the set.
pub fn prob0_min(mdp: &Mdp, targets: &StateSet) -> StateSet {
    prob0_min_with(mdp, targets, &mdp.predecessors())
}

fn prob0_min_with(mdp: &Mdp, targets: &StateSet, preds: &[Vec<TransitionId>]) -> StateSet {
    let n = mdp.num_states();
    let mut inside: Vec<bool> = membership(n, targets).iter().map(|t| !t).collect();
    // a transition is "closed" while its support lies inside the candidate set
    let mut closed: Vec<bool> = mdp
        .transitions()
        .iter()
        .map(|tr| tr.support().all(|t| inside[t]))
        .collect();
    let mut closed_count: Vec<usize> = (0..n)
        .map(|s| mdp.enabled(s).filter(|&mu| closed[mu]).count())
        .collect();

    let mut work: VecDeque<StateId> = (0..n).filter(|&s| inside[s] && closed_count[s] == 0).collect();
    for &s in &work {
        inside[s] = false;
    }
    while let Some(t) = work.pop_front() {
        for &mu in &preds[t] {
            if !closed[mu] {
                continue;
            }
            closed[mu] = false;
            let s = mdp.transition(mu).source();
            closed_count[s] -= 1;
            if inside[s] && closed_count[s] == 0 {
                inside[s] = false;
                work.push_back(s);
            }
        }
    }
    inside
        .iter()
        .enumerate()
        .filter_map(|(s, &keep)| keep.then_some(s))
        .collect()
}

/// Partitions the states into target, zero and maybe states for `objective`.
pub fn maybe_states(mdp: &Mdp, targets: &StateSet, objective: Objective) -> MaybeAnalysis {
    let preds = mdp.predecessors();
    let zero = match objective {
        Objective::Max => prob0_max_with(mdp, targets, &preds),
        Objective::Min => prob0_min_with(mdp, targets, &preds),
    };
    let zero: StateSet = zero.difference(targets).copied().collect();

    let mut class = Vec::with_capacity(mdp.num_states());
    let mut maybe = Vec::new();
    for s in 0..mdp.num_states() {
        class.push(if targets.contains(&s) {
            StateClass::Target
        } else if zero.contains(&s) {
            StateClass::Zero
        } else {
            maybe.push(s);
            StateClass::Maybe(maybe.len() - 1)
        });
    }
    MaybeAnalysis {
        objective,
        zero_states: zero,
        target_states: targets.clone(),
        maybe_states: maybe,
        class,
    }
}

/// Whether every maybe state reaches the targets in the chain induced by
/// `scheduler`. Always true for the min objective. A scheduler undefined on
/// some maybe state is not apt.
pub fn is_apt(mdp: &Mdp, analysis: &MaybeAnalysis, scheduler: &Scheduler) -> bool {
    if !scheduler.covers(analysis.maybe_states()) {
        return false;
    }
    if analysis.objective() == Objective::Min {
        return true;
    }
    // backward search from the targets along chosen transitions only
    let n = mdp.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for &s in analysis.maybe_states() {
        let mu = scheduler.choice(s).expect("covered");
        for t in mdp.transition(mu).support() {
            preds[t].push(s);
        }
    }
    let mut reached = membership(n, analysis.target_states());
    let mut work: VecDeque<StateId> = analysis.target_states().iter().copied().collect();
    while let Some(t) = work.pop_front() {
        for &s in &preds[t] {
            if !reached[s] {
                reached[s] = true;
                work.push_back(s);
            }
        }
    }
    analysis.maybe_states().iter().all(|&s| reached[s])
}

/// A scheduler over the zero states that never leaves them under the min
/// objective (and an arbitrary one for max), plus first-enabled choices on
/// the targets. Used to complete maybe-state schedulers into full ones
/// without giving zero states any probability.
pub fn zero_completion(mdp: &Mdp, analysis: &MaybeAnalysis) -> Scheduler {
    let mut choice = Scheduler::empty(mdp);
    let zero = analysis.zero_states();
    for s in 0..mdp.num_states() {
        let mu = match analysis.class(s) {
            StateClass::Maybe(_) => continue,
            StateClass::Target => mdp.enabled(s).start,
            StateClass::Zero => mdp
                .enabled(s)
                .find(|&mu| mdp.transition(mu).support().all(|t| zero.contains(&t)))
                .unwrap_or(mdp.enabled(s).start),
        };
        choice.set(mdp, s, mu).expect("enabled by construction");
    }
    choice
}
