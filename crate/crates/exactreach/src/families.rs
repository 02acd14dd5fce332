//! Parameterized model families used by the benchmarks and acceptance
//! tests.

use exactreach_core::mdp::{RawModel, RawTransition};
use exactreach_core::rational::fraction_string;
use exactreach_core::{Rational, StateId, StateSet};
use num_traits::One;

use crate::format::Model;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn push(raw: &mut RawModel, source: StateId, action: &str, targets: Vec<(StateId, Rational)>) {
    raw.transitions.push(RawTransition {
        source,
        action: action.into(),
        targets,
    });
}

fn labelled(raw: RawModel, goal: StateId) -> Model {
    let goal: StateSet = [goal].into_iter().collect();
    Model {
        mdp: raw.validate().expect("family members are well formed"),
        labels: vec![("goal".into(), goal)],
    }
}

/// Walk on `0..=n` absorbing at both ends, goal `n`. Every interior state
/// may step up with probability `(d+1)/(2d)` (action `up`) or with the
/// mirrored probability `(d-1)/(2d)` (action `down`).
pub fn biased_walk(n: usize, d: i64) -> Model {
    assert!(n >= 2 && d >= 2);
    let fair_up = q(d + 1, 2 * d);
    let fair_down = q(d - 1, 2 * d);
    let mut raw = RawModel::new(n + 1);
    push(&mut raw, 0, "-", vec![(0, Rational::one())]);
    for i in 1..n {
        push(&mut raw, i, "up", vec![(i - 1, fair_down.clone()), (i + 1, fair_up.clone())]);
        push(&mut raw, i, "down", vec![(i - 1, fair_up.clone()), (i + 1, fair_down.clone())]);
    }
    push(&mut raw, n, "-", vec![(n, Rational::one())]);
    labelled(raw, n)
}

/// Parameters of [`near_tie`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearTie {
    /// Number of decision stages.
    pub stages: usize,
    /// Immediate success probability of the `now` action.
    pub now: Rational,
    /// Eventual success probability through the leak state.
    pub later: Rational,
    /// Self-loop probability of the leak state.
    pub stay: Rational,
}

impl NearTie {
    pub fn name(&self) -> String {
        format!(
            "near-tie-k{}-p{}-g{}-r{}",
            self.stages,
            fraction_string(&self.now).replace('/', "_"),
            fraction_string(&self.later).replace('/', "_"),
            fraction_string(&self.stay).replace('/', "_"),
        )
    }
}

/// A chain of decision stages. In stage `i`, action `now` reaches the goal
/// at once with probability `now` and otherwise moves to stage `i+1`;
/// action `wait` enters a leak state that lingers with probability `stay`
/// and then succeeds with probability `later`. The leak is slow, so a
/// coarse value iteration stops before it sees that waiting pays more.
///
/// States: `2i` decision, `2i+1` leak, then goal, then fail.
pub fn near_tie(p: &NearTie) -> Model {
    let k = p.stages;
    assert!(k >= 1);
    let goal = 2 * k;
    let fail = 2 * k + 1;
    let mut raw = RawModel::new(2 * k + 2);
    let one = Rational::one();
    let leave = &one - &p.stay;
    for i in 0..k {
        let (d, l) = (2 * i, 2 * i + 1);
        let next = if i + 1 < k { 2 * i + 2 } else { fail };
        push(&mut raw, d, "now", vec![(goal, p.now.clone()), (next, &one - &p.now)]);
        push(&mut raw, d, "wait", vec![(l, one.clone())]);
        push(
            &mut raw,
            l,
            "-",
            vec![
                (l, p.stay.clone()),
                (goal, &leave * &p.later),
                (next, &leave * (&one - &p.later)),
            ],
        );
    }
    push(&mut raw, goal, "-", vec![(goal, one.clone())]);
    push(&mut raw, fail, "-", vec![(fail, one)]);
    labelled(raw, goal)
}

/// The parameter grid searched for coarse-epsilon traps.
pub fn near_tie_grid() -> Vec<NearTie> {
    let mut out = Vec::new();
    for stages in 1..=4 {
        for now in [q(1, 20), q(1, 12), q(1, 10)] {
            for later in [q(1, 5), q(1, 2), q(4, 5), q(9, 10)] {
                for stay in [q(9, 10), q(19, 20), q(49, 50)] {
                    out.push(NearTie {
                        stages,
                        now: now.clone(),
                        later: later.clone(),
                        stay,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactreach_core::oracle::brute_force_optimal;
    use exactreach_core::Objective;

    #[test]
    fn small_walk_matches_gamblers_ruin() {
        // from state 1 of 0..=2, up with 2/3: reach 2 with 2/3
        let m = biased_walk(2, 3);
        let r = brute_force_optimal(&m.mdp, m.label("goal").unwrap(), Objective::Max).unwrap();
        assert_eq!(r.values[1], q(2, 3));
        let r = brute_force_optimal(&m.mdp, m.label("goal").unwrap(), Objective::Min).unwrap();
        assert_eq!(r.values[1], q(1, 3));
    }

    #[test]
    fn waiting_is_optimal_when_later_beats_now() {
        let p = NearTie {
            stages: 1,
            now: q(1, 10),
            later: q(1, 2),
            stay: q(19, 20),
        };
        let m = near_tie(&p);
        let r = brute_force_optimal(&m.mdp, m.label("goal").unwrap(), Objective::Max).unwrap();
        assert_eq!(r.values[0], q(1, 2));
        assert_eq!(p.name(), "near-tie-k1-p1_10-g1_2-r19_20");
    }
}
