//! Markov decision processes, memoryless schedulers and the Markov chains
//! they induce.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type StateId = usize;
/// Index of a transition in canonical (grouped-by-source) order.
pub type TransitionId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("model has no states")]
    NoStates,
    #[error("transition {transition}: source state {state} does not exist")]
    UnknownSource { transition: usize, state: StateId },
    #[error("transition {transition}: probability mass on unknown state {target}")]
    DanglingTarget { transition: usize, target: StateId },
    #[error("transition {transition}: state {target} listed twice")]
    DuplicateTarget { transition: usize, target: StateId },
    #[error("transition {transition}: probability of state {target} is not positive")]
    NonPositiveProbability { transition: usize, target: StateId },
    #[error("transition {transition}: probabilities sum to {sum}, not 1")]
    DistributionNotStochastic { transition: usize, sum: Rational },
    #[error("state {state} has no enabled transition")]
    EmptyEnabledSet { state: StateId },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchedulerError {
    #[error("state {state} is out of range")]
    UnknownState { state: StateId },
    #[error("transition {transition} is not enabled in state {state}")]
    NotEnabled { state: StateId, transition: TransitionId },
    #[error("no transition chosen for state {state}")]
    IncompleteScheduler { state: StateId },
    #[error("scheduler was built for a model with {expected} states, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path needs exactly one more state than transitions")]
    Shape,
    #[error("step {step}: state {state} out of range")]
    UnknownState { step: usize, state: StateId },
    #[error("step {step}: transition {transition} is not enabled in the preceding state")]
    NotEnabled { step: usize, transition: TransitionId },
    #[error("step {step}: transition {transition} gives state {state} probability zero")]
    ZeroProbability {
        step: usize,
        transition: TransitionId,
        state: StateId,
    },
}

/// A transition as read from input, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTransition {
    pub source: StateId,
    pub action: String,
    pub targets: Vec<(StateId, Rational)>,
}

/// An unvalidated model description.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawModel {
    pub num_states: usize,
    pub transitions: Vec<RawTransition>,
}

impl RawModel {
    pub fn new(num_states: usize) -> Self {
        RawModel {
            num_states,
            transitions: Vec::new(),
        }
    }

    /// Appends a transition given as `(target, numerator, denominator)` triples.
    pub fn transition(mut self, source: StateId, action: &str, targets: &[(StateId, i64, i64)]) -> Self {
        self.transitions.push(RawTransition {
            source,
            action: action.into(),
            targets: targets
                .iter()
                .map(|&(t, n, d)| (t, Rational::new(n.into(), d.into())))
                .collect(),
        });
        self
    }

    pub fn validate(self) -> Result<Mdp, ModelError> {
        validate_mdp(self)
    }
}

/// A probability distribution enabled in one state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    source: StateId,
    action: String,
    /// Sorted by target, all probabilities positive.
    distribution: Vec<(StateId, Rational)>,
}

impl Transition {
    pub fn source(&self) -> StateId {
        self.source
    }

    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn distribution(&self) -> &[(StateId, Rational)] {
        &self.distribution
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.distribution.iter().map(|(t, _)| *t)
    }

    /// Probability of moving to `target`, zero when outside the support.
    pub fn probability(&self, target: StateId) -> Rational {
        self.distribution
            .binary_search_by_key(&target, |(t, _)| *t)
            .map(|i| self.distribution[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }
}

/// A validated MDP. Transitions are stored grouped by source state, in state
/// order, preserving input order within a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdp {
    num_states: usize,
    transitions: Vec<Transition>,
    enabled: Vec<Range<TransitionId>>,
    /// canonical index -> position in the input
    input_position: Vec<usize>,
}

/// Checks well-formedness and sorts transitions into canonical order.
pub fn validate_mdp(raw: RawModel) -> Result<Mdp, ModelError> {
    let n = raw.num_states;
    if n == 0 {
        return Err(ModelError::NoStates);
    }
    let mut checked = Vec::with_capacity(raw.transitions.len());
    for (idx, t) in raw.transitions.into_iter().enumerate() {
        if t.source >= n {
            return Err(ModelError::UnknownSource {
                transition: idx,
                state: t.source,
            });
        }
        let mut dist = t.targets;
        for (target, p) in &dist {
            if *target >= n {
                return Err(ModelError::DanglingTarget {
                    transition: idx,
                    target: *target,
                });
            }
            if *p <= Rational::zero() {
                return Err(ModelError::NonPositiveProbability {
                    transition: idx,
                    target: *target,
                });
            }
        }
        dist.sort_by_key(|(target, _)| *target);
        if let Some(w) = dist.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ModelError::DuplicateTarget {
                transition: idx,
                target: w[0].0,
            });
        }
        let sum: Rational = dist.iter().map(|(_, p)| p).sum();
        if !sum.is_one() {
            return Err(ModelError::DistributionNotStochastic { transition: idx, sum });
        }
        checked.push((
            idx,
            Transition {
                source: t.source,
                action: t.action,
                distribution: dist,
            },
        ));
    }

    // stable: input order survives within a state
    checked.sort_by_key(|(_, t)| t.source);

    let mut enabled = Vec::with_capacity(n);
    let mut start = 0;
    for s in 0..n {
        let end = start + checked[start..].iter().take_while(|(_, t)| t.source == s).count();
        if end == start {
            return Err(ModelError::EmptyEnabledSet { state: s });
        }
        enabled.push(start..end);
        start = end;
    }

    let (input_position, transitions) = checked.into_iter().unzip();
    Ok(Mdp {
        num_states: n,
        transitions,
        enabled,
        input_position,
    })
}

impl Mdp {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id]
    }

    /// Canonical indices of the transitions enabled in `state`.
    pub fn enabled(&self, state: StateId) -> Range<TransitionId> {
        self.enabled[state].clone()
    }

    pub fn is_enabled(&self, state: StateId, transition: TransitionId) -> bool {
        self.enabled[state].contains(&transition)
    }

    /// Position in the original input of the transition with canonical index `id`.
    pub fn input_position(&self, id: TransitionId) -> usize {
        self.input_position[id]
    }

    /// For every state `t`, the transitions with `t` in their support, in
    /// increasing canonical order.
    pub fn predecessors(&self) -> Vec<Vec<TransitionId>> {
        let mut preds = vec![Vec::new(); self.num_states];
        for (id, tr) in self.transitions.iter().enumerate() {
            for target in tr.support() {
                preds[target].push(id);
            }
        }
        preds
    }

    /// Number of memoryless deterministic schedulers over all states,
    /// saturating at `u128::MAX`.
    pub fn scheduler_count(&self) -> u128 {
        self.enabled
            .iter()
            .fold(1u128, |acc, r| acc.saturating_mul(r.len() as u128))
    }

    pub fn is_markov_chain(&self) -> bool {
        self.enabled.iter().all(|r| r.len() == 1)
    }
}

/// A memoryless deterministic scheduler: a partial map from states to one of
/// their enabled transitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scheduler {
    choice: Vec<Option<TransitionId>>,
}

impl Scheduler {
    /// The scheduler defined nowhere.
    pub fn empty(mdp: &Mdp) -> Self {
        Scheduler {
            choice: vec![None; mdp.num_states()],
        }
    }

    /// Builds a scheduler from `(state, transition)` pairs; later pairs win.
    pub fn new(
        mdp: &Mdp,
        pairs: impl IntoIterator<Item = (StateId, TransitionId)>,
    ) -> Result<Self, SchedulerError> {
        let mut sched = Scheduler::empty(mdp);
        for (state, transition) in pairs {
            sched.set(mdp, state, transition)?;
        }
        Ok(sched)
    }

    /// Every state picks its first enabled transition.
    pub fn first_enabled(mdp: &Mdp) -> Self {
        Scheduler {
            choice: (0..mdp.num_states()).map(|s| Some(mdp.enabled(s).start)).collect(),
        }
    }

    pub fn set(&mut self, mdp: &Mdp, state: StateId, transition: TransitionId) -> Result<(), SchedulerError> {
        if self.choice.len() != mdp.num_states() {
            return Err(SchedulerError::SizeMismatch {
                expected: self.choice.len(),
                actual: mdp.num_states(),
            });
        }
        if state >= mdp.num_states() {
            return Err(SchedulerError::UnknownState { state });
        }
        if !mdp.is_enabled(state, transition) {
            return Err(SchedulerError::NotEnabled { state, transition });
        }
        self.choice[state] = Some(transition);
        Ok(())
    }

    pub fn choice(&self, state: StateId) -> Option<TransitionId> {
        self.choice.get(state).copied().flatten()
    }

    pub fn num_states(&self) -> usize {
        self.choice.len()
    }

    /// States where the scheduler is defined, ascending.
    pub fn domain(&self) -> impl Iterator<Item = StateId> + '_ {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(s, c)| c.map(|_| s))
    }

    pub fn covers(&self, states: &[StateId]) -> bool {
        states.iter().all(|&s| self.choice(s).is_some())
    }

    /// Forgets every choice outside `states`.
    pub fn restricted_to(&self, states: &[StateId]) -> Scheduler {
        let mut choice = vec![None; self.choice.len()];
        for &s in states {
            choice[s] = self.choice(s);
        }
        Scheduler { choice }
    }

    /// Overlays `self` on top of `other`: choices of `self` win.
    pub fn or(&self, other: &Scheduler) -> Scheduler {
        Scheduler {
            choice: self
                .choice
                .iter()
                .zip(&other.choice)
                .map(|(a, b)| a.or(*b))
                .collect(),
        }
    }
}

/// An MDP with exactly one enabled transition per state. State `s` owns
/// transition `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovChain {
    mdp: Mdp,
    /// per state, the transition of the MDP it was restricted from
    origin: Vec<TransitionId>,
}

impl MarkovChain {
    /// Wraps an MDP that already is a chain.
    pub fn from_mdp(mdp: Mdp) -> Option<Self> {
        if !mdp.is_markov_chain() {
            return None;
        }
        let origin = (0..mdp.num_states()).collect();
        Some(MarkovChain { mdp, origin })
    }

    pub fn as_mdp(&self) -> &Mdp {
        &self.mdp
    }

    pub fn num_states(&self) -> usize {
        self.mdp.num_states()
    }

    /// The only transition of `state`.
    pub fn step(&self, state: StateId) -> &Transition {
        self.mdp.transition(state)
    }

    /// Transition of the originating MDP that `state` keeps.
    pub fn origin(&self, state: StateId) -> TransitionId {
        self.origin[state]
    }

    /// The chain's sole scheduler.
    pub fn unique_scheduler(&self) -> Scheduler {
        Scheduler::first_enabled(&self.mdp)
    }
}

/// Keeps, for every state, only the transition chosen by `scheduler` (or by
/// `completion` where `scheduler` is undefined).
pub fn restrict(mdp: &Mdp, scheduler: &Scheduler, completion: &Scheduler) -> Result<MarkovChain, SchedulerError> {
    for sched in [scheduler, completion] {
        if sched.num_states() != mdp.num_states() {
            return Err(SchedulerError::SizeMismatch {
                expected: sched.num_states(),
                actual: mdp.num_states(),
            });
        }
    }
    let mut origin = Vec::with_capacity(mdp.num_states());
    let mut transitions = Vec::with_capacity(mdp.num_states());
    for s in 0..mdp.num_states() {
        let chosen = scheduler
            .choice(s)
            .or_else(|| completion.choice(s))
            .ok_or(SchedulerError::IncompleteScheduler { state: s })?;
        if !mdp.is_enabled(s, chosen) {
            return Err(SchedulerError::NotEnabled {
                state: s,
                transition: chosen,
            });
        }
        origin.push(chosen);
        transitions.push(mdp.transition(chosen).clone());
    }
    let chain = Mdp {
        num_states: mdp.num_states(),
        enabled: (0..mdp.num_states()).map(|s| s..s + 1).collect(),
        input_position: origin.iter().map(|&t| mdp.input_position(t)).collect(),
        transitions,
    };
    Ok(MarkovChain { mdp: chain, origin })
}

/// An alternating sequence `s0 μ1 s1 … μk sk` where each `μi` is enabled in
/// `s(i-1)` and gives `si` positive probability.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePath {
    states: Vec<StateId>,
    transitions: Vec<TransitionId>,
}

impl FinitePath {
    pub fn new(mdp: &Mdp, states: Vec<StateId>, transitions: Vec<TransitionId>) -> Result<Self, PathError> {
        if states.len() != transitions.len() + 1 {
            return Err(PathError::Shape);
        }
        for (step, &s) in states.iter().enumerate() {
            if s >= mdp.num_states() {
                return Err(PathError::UnknownState { step, state: s });
            }
        }
        for (i, &mu) in transitions.iter().enumerate() {
            let step = i + 1;
            if mu >= mdp.num_transitions() || !mdp.is_enabled(states[i], mu) {
                return Err(PathError::NotEnabled { step, transition: mu });
            }
            if mdp.transition(mu).probability(states[step]).is_zero() {
                return Err(PathError::ZeroProbability {
                    step,
                    transition: mu,
                    state: states[step],
                });
            }
        }
        Ok(FinitePath { states, transitions })
    }

    /// The length-zero path sitting in `state`.
    pub fn at(state: StateId) -> Self {
        FinitePath {
            states: vec![state],
            transitions: Vec::new(),
        }
    }

    pub fn first(&self) -> StateId {
        self.states[0]
    }

    pub fn last(&self) -> StateId {
        *self.states.last().expect("paths are never empty")
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn transitions(&self) -> &[TransitionId] {
        &self.transitions
    }
}

/// Probability of following `path` from `start` under `scheduler`: the product
/// of step probabilities, or zero if the path disagrees with the scheduler or
/// does not begin in `start`.
pub fn path_probability(mdp: &Mdp, scheduler: &Scheduler, start: StateId, path: &FinitePath) -> Rational {
    if path.first() != start {
        return Rational::zero();
    }
    let mut prob = Rational::one();
    for (i, &mu) in path.transitions.iter().enumerate() {
        if scheduler.choice(path.states[i]) != Some(mu) {
            return Rational::zero();
        }
        prob *= mdp.transition(mu).probability(path.states[i + 1]);
    }
    prob
}
