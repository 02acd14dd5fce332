//! Independent exact ground truth: per-chain linear solves, exhaustive
//! scheduler enumeration and exact policy iteration.
//!
//! Nothing here touches the LP or simplex code; the linear algebra is a
//! separate Gaussian elimination.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::mdp::{restrict, MarkovChain, Mdp, Scheduler, StateId, TransitionId};
use crate::qualitative::{is_apt, zero_completion, MaybeAnalysis, Objective, StateClass, StateSet};
use crate::rational::Rational;

/// Enumeration refuses models with more schedulers than this.
pub const MAX_SCHEDULERS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} schedulers exceed the enumeration limit")]
    TooManySchedulers(u128),
    #[error("policy iteration must start from an apt scheduler")]
    NonAptStart,
    #[error("start scheduler does not cover maybe state {0}")]
    IncompleteStart(StateId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// Exact optimal probability of every state.
    pub values: Vec<Rational>,
    /// A scheduler attaining `values` at every state simultaneously.
    pub argopt: Scheduler,
    pub schedulers_examined: u64,
}

/// Exact probability of reaching `targets` from every state of `chain`.
pub fn chain_reach_exact(chain: &MarkovChain, targets: &StateSet) -> Vec<Rational> {
    let n = chain.num_states();
    let is_target: Vec<bool> = (0..n).map(|s| targets.contains(&s)).collect();

    // states that reach the targets at all
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n {
        for t in chain.step(s).support() {
            preds[t].push(s);
        }
    }
    let mut reaches = is_target.clone();
    let mut work: VecDeque<StateId> = targets.iter().copied().collect();
    while let Some(t) = work.pop_front() {
        for &s in &preds[t] {
            if !reaches[s] {
                reaches[s] = true;
                work.push_back(s);
            }
        }
    }

    let unknown: Vec<StateId> = (0..n).filter(|&s| reaches[s] && !is_target[s]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &s) in unknown.iter().enumerate() {
        index[s] = i;
    }

    // (I - P) v = r over the unknown states
    let k = unknown.len();
    let mut system = vec![vec![Rational::zero(); k + 1]; k];
    for (i, &s) in unknown.iter().enumerate() {
        system[i][i] = Rational::one();
        for (t, p) in chain.step(s).distribution() {
            if is_target[*t] {
                system[i][k] += p;
            } else if reaches[*t] {
                system[i][index[*t]] -= p;
            }
        }
    }
    let solution = gauss_solve(system);

    let mut values = vec![Rational::zero(); n];
    for s in 0..n {
        if is_target[s] {
            values[s] = Rational::one();
        } else if reaches[s] {
            values[s] = solution[index[s]].clone();
        }
    }
    values
}

/// Solves an augmented `k × (k+1)` system, pivoting on the entry of largest
/// magnitude in each column. Panics on a singular system.
fn gauss_solve(mut system: Vec<Vec<Rational>>) -> Vec<Rational> {
    let k = system.len();
    for col in 0..k {
        let pivot_row = (col..k)
            .filter(|&r| !system[r][col].is_zero())
            .max_by(|&a, &b| system[a][col].abs().cmp(&system[b][col].abs()).then(b.cmp(&a)))
            .expect("chain system is non-singular once non-reaching states are removed");
        system.swap(col, pivot_row);
        let (head, tail) = system.split_at_mut(col + 1);
        let pivot = &head[col];
        for row in tail.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot[col];
            for j in col..=k {
                if !pivot[j].is_zero() {
                    let delta = &factor * &pivot[j];
                    row[j] -= delta;
                }
            }
        }
    }
    let mut x = vec![Rational::zero(); k];
    for i in (0..k).rev() {
        let mut acc = system[i][k].clone();
        for j in i + 1..k {
            if !system[i][j].is_zero() {
                acc -= &system[i][j] * &x[j];
            }
        }
        x[i] = acc / &system[i][i];
    }
    x
}

fn improves(objective: Objective, candidate: &Rational, incumbent: &Rational) -> bool {
    match objective {
        Objective::Max => candidate > incumbent,
        Objective::Min => candidate < incumbent,
    }
}

/// Enumerates every memoryless deterministic scheduler, evaluating each
/// induced chain exactly.
pub fn brute_force_optimal(mdp: &Mdp, targets: &StateSet, objective: Objective) -> Result<OracleResult, OracleError> {
    let count = mdp.scheduler_count();
    if count > MAX_SCHEDULERS {
        return Err(OracleError::TooManySchedulers(count));
    }
    let empty = Scheduler::empty(mdp);
    let evaluate = |sched: &Scheduler| {
        let chain = restrict(mdp, sched, &empty).expect("total scheduler");
        chain_reach_exact(&chain, targets)
    };

    let mut best: Option<Vec<Rational>> = None;
    let mut examined = 0u64;
    for sched in AllSchedulers::new(mdp) {
        let values = evaluate(&sched);
        examined += 1;
        match &mut best {
            None => best = Some(values),
            Some(best) => {
                for (b, v) in best.iter_mut().zip(values) {
                    if improves(objective, &v, b) {
                        *b = v;
                    }
                }
            }
        }
    }
    let best = best.expect("every model has at least one scheduler");
    // second pass: the first scheduler in enumeration order attaining the optimum
    let argopt = AllSchedulers::new(mdp)
        .find(|sched| evaluate(sched) == best)
        .expect("an optimal memoryless scheduler attains every state's optimum");
    Ok(OracleResult {
        values: best,
        argopt,
        schedulers_examined: examined,
    })
}

/// Every total memoryless deterministic scheduler, lexicographically by
/// choice with state 0 most significant.
struct AllSchedulers<'a> {
    mdp: &'a Mdp,
    digits: Option<Vec<TransitionId>>,
}

impl<'a> AllSchedulers<'a> {
    fn new(mdp: &'a Mdp) -> Self {
        let digits = (0..mdp.num_states()).map(|s| mdp.enabled(s).start).collect();
        AllSchedulers {
            mdp,
            digits: Some(digits),
        }
    }
}

impl Iterator for AllSchedulers<'_> {
    type Item = Scheduler;

    fn next(&mut self) -> Option<Scheduler> {
        let digits = self.digits.as_mut()?;
        let sched = Scheduler::new(self.mdp, digits.iter().copied().enumerate())
            .expect("digits stay inside enabled ranges");
        let mut s = digits.len();
        loop {
            if s == 0 {
                self.digits = None;
                break;
            }
            s -= 1;
            digits[s] += 1;
            if digits[s] < self.mdp.enabled(s).end {
                break;
            }
            digits[s] = self.mdp.enabled(s).start;
        }
        Some(sched)
    }
}

/// One-step lookahead value of `mu` with zero states counting 0 and targets 1.
fn lookahead(mdp: &Mdp, analysis: &MaybeAnalysis, values: &[Rational], mu: TransitionId) -> Rational {
    let mut acc = Rational::zero();
    for (t, p) in mdp.transition(mu).distribution() {
        match analysis.class(*t) {
            StateClass::Target => acc += p,
            StateClass::Maybe(_) => acc += p * &values[*t],
            StateClass::Zero => {}
        }
    }
    acc
}

/// Howard policy iteration in exact arithmetic, starting from `start`
/// (defined on the maybe states; apt for the max objective).
///
/// `schedulers_examined` counts evaluated schedulers, i.e. rounds.
pub fn exact_policy_iteration(mdp: &Mdp, analysis: &MaybeAnalysis, start: &Scheduler) -> Result<OracleResult, OracleError> {
    let maybe = analysis.maybe_states();
    if let Some(&s) = maybe.iter().find(|&&s| start.choice(s).is_none()) {
        return Err(OracleError::IncompleteStart(s));
    }
    if !is_apt(mdp, analysis, start) {
        return Err(OracleError::NonAptStart);
    }
    let objective = analysis.objective();
    let completion = zero_completion(mdp, analysis);
    let targets = analysis.target_states();
    let mut current = start.restricted_to(maybe);
    let mut rounds = 0u64;
    let mut previous: Option<Vec<Rational>> = None;

    loop {
        let chain = restrict(mdp, &current, &completion).expect("maybe states covered, rest completed");
        let values = chain_reach_exact(&chain, targets);
        rounds += 1;
        if let Some(prev) = &previous {
            debug_assert!(maybe
                .iter()
                .all(|&s| !improves(objective, &prev[s], &values[s])));
            debug_assert!(prev != &values);
        }

        let mut improved: Vec<(StateId, TransitionId)> = Vec::new();
        for &s in maybe {
            let held = current.choice(s).expect("covered");
            let mut best = lookahead(mdp, analysis, &values, held);
            let mut best_mu = held;
            for mu in mdp.enabled(s) {
                let v = lookahead(mdp, analysis, &values, mu);
                if improves(objective, &v, &best) {
                    best = v;
                    best_mu = mu;
                }
            }
            if best_mu != held {
                improved.push((s, best_mu));
            }
        }
        if improved.is_empty() {
            let argopt = current.or(&completion);
            return Ok(OracleResult {
                values,
                argopt,
                schedulers_examined: rounds,
            });
        }

        let mut tentative = current.clone();
        for &(s, mu) in &improved {
            tentative.set(mdp, s, mu).expect("enabled");
        }
        if !is_apt(mdp, analysis, &tentative) {
            // fall back to the first single switch that keeps the scheduler apt
            tentative = improved
                .iter()
                .map(|&(s, mu)| {
                    let mut t = current.clone();
                    t.set(mdp, s, mu).expect("enabled");
                    t
                })
                .find(|t| is_apt(mdp, analysis, t))
                .expect("strict improvements from an apt scheduler stay apt");
        }
        previous = Some(values);
        current = tentative;
    }
}
