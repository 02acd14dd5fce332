mod common;

use common::{random_mdp, random_raw, Shape, SMALL};
use exactreach_core::lp::{basis_from_scheduler, build_lp, default_basis};
use exactreach_core::mdp::{path_probability, restrict, FinitePath, Mdp, Scheduler};
use exactreach_core::oracle::{brute_force_optimal, chain_reach_exact, exact_policy_iteration};
use exactreach_core::qualitative::{is_apt, maybe_states, prob0_max, prob0_min, zero_completion, MaybeAnalysis};
use exactreach_core::simplex::{
    basic_solution, dual_simplex, factorize_basis, primal_simplex, reduced_costs, SimplexOutcome, SimplexStatus,
};
use exactreach_core::value_iteration::{value_iterate, value_iterate_with, ValueIterationOptions};
use exactreach_core::rational::ops;
use exactreach_core::{Objective, Rational, StateSet};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TINY: Shape = Shape {
    max_states: 4,
    max_choices: 2,
    max_support: 2,
    max_denominator: 4,
};

fn rational() -> impl Strategy<Value = Rational> {
    (any::<i64>(), 1..i64::MAX).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

/// Rationals of a few hundred bits sharing random factors, the regime where
/// the fused operations take their multi-word paths.
fn wide_rational() -> impl Strategy<Value = Rational> {
    (
        prop::collection::vec(any::<i64>(), 1..8),
        prop::collection::vec(1..i64::MAX, 1..8),
        prop::collection::vec(2..64i64, 0..12),
    )
        .prop_map(|(num, den, shared)| {
            let product = |xs: &[i64]| xs.iter().fold(num_bigint::BigInt::from(1), |acc, &x| acc * x);
            let common = product(&shared);
            Rational::new(product(&num) * &common, product(&den) * common)
        })
}

fn same_representation(x: &Rational, y: &Rational) -> bool {
    x.numer() == y.numer() && x.denom() == y.denom()
}

/// Every well-formed path of length at most `len` starting in `start`.
fn paths(mdp: &Mdp, start: usize, len: usize) -> Vec<FinitePath> {
    let mut out = vec![FinitePath::at(start)];
    let mut frontier = vec![(vec![start], vec![])];
    for _ in 0..len {
        let mut next = Vec::new();
        for (states, trans) in &frontier {
            let last: usize = *states.last().unwrap();
            for mu in mdp.enabled(last) {
                for t in mdp.transition(mu).support() {
                    let mut s = states.clone();
                    let mut tr: Vec<usize> = trans.clone();
                    s.push(t);
                    tr.push(mu);
                    out.push(FinitePath::new(mdp, s.clone(), tr.clone()).unwrap());
                    next.push((s, tr));
                }
            }
        }
        frontier = next;
    }
    out
}

fn random_scheduler(mdp: &Mdp, rng: &mut ChaCha8Rng) -> Scheduler {
    Scheduler::new(
        mdp,
        (0..mdp.num_states()).map(|s| {
            let r = mdp.enabled(s);
            (s, rng.gen_range(r))
        }),
    )
    .unwrap()
}

fn assert_optimal_certificate(problem: &exactreach_core::LpProblem, out: &SimplexOutcome) {
    assert_eq!(out.status, SimplexStatus::Optimal);
    assert_eq!(problem.apply(&out.solution), problem.rhs());
    assert!(out.solution.iter().all(|x| !x.is_negative()));
    let fact = factorize_basis(problem, &out.basis).unwrap();
    assert!(reduced_costs(problem, &fact).iter().all(|(_, rc)| !rc.is_negative()));
    let cx: Rational = out.solution.iter().zip(problem.cost()).map(|(x, c)| x * c).sum();
    assert_eq!(cx, out.objective);
}

fn analyses(mdp: &Mdp, targets: &StateSet) -> [MaybeAnalysis; 2] {
    [
        maybe_states(mdp, targets, Objective::Max),
        maybe_states(mdp, targets, Objective::Min),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
    }

    #[test]
    fn fused_operations_match_the_operators(a in wide_rational(), b in wide_rational(), c in wide_rational()) {
        // the operators reduce their results, so equal representations mean
        // the fused results are in lowest terms too
        prop_assert!(same_representation(&ops::mul(&a, &b), &(&a * &b)));
        prop_assert!(same_representation(&ops::add(&a, &b), &(&a + &b)));
        prop_assert!(same_representation(&ops::sub(&a, &b), &(&a - &b)));
        prop_assert!(same_representation(&ops::add(&a, &a), &(&a + &a)));
        prop_assert!(same_representation(&ops::sub(&a, &a), &Rational::zero()));
        if !b.is_zero() {
            prop_assert!(same_representation(&ops::div(&a, &b), &(&a / &b)));
        }
        let mut acc = c.clone();
        ops::sub_mul(&mut acc, &a, &b);
        prop_assert!(same_representation(&acc, &(&c - &a * &b)));
        ops::add_mul(&mut acc, &a, &b);
        prop_assert!(same_representation(&acc, &c));
        let (d1, d2) = (b.abs() + Rational::one(), c.abs() + Rational::one());
        prop_assert_eq!(ops::cmp_fractions(&a, &d1, &c, &d2), (&a / &d1).cmp(&(&c / &d2)));
    }

    #[test]
    fn validation_orders_transitions_by_source(seed in any::<u64>()) {
        let (mdp, _) = random_mdp(seed, SMALL);
        let sources: Vec<usize> = mdp.transitions().iter().map(|t| t.source()).collect();
        prop_assert!(sources.windows(2).all(|w| w[0] <= w[1]));
        for s in 0..mdp.num_states() {
            prop_assert!(!mdp.enabled(s).is_empty());
            let positions: Vec<usize> = mdp.enabled(s).map(|t| mdp.input_position(t)).collect();
            prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn restricted_chain_preserves_path_probabilities(seed in any::<u64>()) {
        let (mdp, _) = random_mdp(seed, TINY);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let eta = random_scheduler(&mdp, &mut rng);
        let chain = restrict(&mdp, &eta, &Scheduler::empty(&mdp)).unwrap();
        let unique = chain.unique_scheduler();
        for start in 0..mdp.num_states() {
            for path in paths(&mdp, start, 4) {
                let in_mdp = path_probability(&mdp, &eta, start, &path);
                let follows = path.transitions().iter().zip(path.states()).all(|(&mu, &s)| eta.choice(s) == Some(mu));
                let in_chain = if follows {
                    let mapped = FinitePath::new(chain.as_mdp(), path.states().to_vec(), path.states()[..path.len()].to_vec()).unwrap();
                    path_probability(chain.as_mdp(), &unique, start, &mapped)
                } else {
                    Rational::zero()
                };
                prop_assert_eq!(in_mdp, in_chain);
            }
        }
    }

    #[test]
    fn zero_sets_match_oracle_and_partition(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        for analysis in analyses(&mdp, &targets) {
            let mut all: Vec<usize> = analysis.zero_states().iter().copied()
                .chain(analysis.target_states().iter().copied())
                .chain(analysis.maybe_states().iter().copied())
                .collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..mdp.num_states()).collect::<Vec<_>>());

            let oracle = brute_force_optimal(&mdp, &targets, analysis.objective()).unwrap();
            for s in 0..mdp.num_states() {
                let zero = oracle.values[s].is_zero();
                prop_assert_eq!(zero, analysis.zero_states().contains(&s), "state {}", s);
            }
        }
    }

    #[test]
    fn zero_sets_shrink_as_targets_grow(seed in any::<u64>(), extra in 0usize..6) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        let mut bigger = targets.clone();
        bigger.insert(extra % mdp.num_states());
        prop_assert!(prob0_max(&mdp, &bigger).is_subset(&prob0_max(&mdp, &targets)));
        prop_assert!(prob0_min(&mdp, &bigger).is_subset(&prob0_min(&mdp, &targets)));
    }

    #[test]
    fn optimal_max_scheduler_is_apt(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        let analysis = maybe_states(&mdp, &targets, Objective::Max);
        let oracle = brute_force_optimal(&mdp, &targets, Objective::Max).unwrap();
        prop_assert!(is_apt(&mdp, &analysis, &oracle.argopt));
    }

    #[test]
    fn value_iteration_is_monotone_and_greedy(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        for analysis in analyses(&mdp, &targets) {
            let coarse = value_iterate(&mdp, &analysis, 1e-2).unwrap();
            let fine = value_iterate(&mdp, &analysis, 1e-8).unwrap();
            prop_assert!(coarse.iterations <= fine.iterations);
            if analysis.objective() == Objective::Max {
                for (c, f) in coarse.values.iter().zip(&fine.values) {
                    prop_assert!(c <= f);
                }
            }
            for v in &fine.values {
                prop_assert!((0.0..=1.0).contains(v));
            }
            // the chosen transition attains the optimal backup
            for (j, &s) in analysis.maybe_states().iter().enumerate() {
                let backup = |mu: usize| -> f64 {
                    mdp.transition(mu).distribution().iter().map(|(t, p)| {
                        let p = exactreach_core::rational::to_f64(p);
                        if analysis.is_target(*t) { p }
                        else { analysis.maybe_position(*t).map_or(0.0, |k| p * fine.values[k]) }
                    }).sum()
                };
                let chosen = backup(fine.scheduler.choice(s).unwrap());
                let values: Vec<f64> = mdp.enabled(s).map(backup).collect();
                let best = match analysis.objective() {
                    Objective::Max => values.iter().cloned().fold(f64::MIN, f64::max),
                    Objective::Min => values.iter().cloned().fold(f64::MAX, f64::min),
                };
                prop_assert!((chosen - best).abs() <= 1e-12, "state {} position {}", s, j);
            }
        }
    }

    #[test]
    fn apt_scheduler_bases_are_dual_feasible_and_exact(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
        for analysis in analyses(&mdp, &targets) {
            if analysis.num_maybe() == 0 { continue; }
            let problem = build_lp(&mdp, &analysis).unwrap();
            let completion = zero_completion(&mdp, &analysis);
            for _ in 0..4 {
                let eta = random_scheduler(&mdp, &mut rng).restricted_to(analysis.maybe_states());
                if !is_apt(&mdp, &analysis, &eta) { continue; }
                let basis = basis_from_scheduler(&problem, &eta).unwrap();
                let fact = factorize_basis(&problem, &basis).expect("apt bases are non-singular");
                prop_assert!(reduced_costs(&problem, &fact).iter().all(|(_, rc)| !rc.is_negative()));
                let x = basic_solution(&problem, &fact);
                let chain = restrict(&mdp, &eta, &completion).unwrap();
                let exact = chain_reach_exact(&chain, analysis.target_states());
                for (j, &s) in analysis.maybe_states().iter().enumerate() {
                    prop_assert_eq!(&x[j], &exact[s]);
                }
            }
        }
    }

    #[test]
    fn solvers_agree_from_any_start(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(13));
        for analysis in analyses(&mdp, &targets) {
            if analysis.num_maybe() == 0 { continue; }
            let problem = build_lp(&mdp, &analysis).unwrap();
            let oracle = brute_force_optimal(&mdp, &targets, analysis.objective()).unwrap();
            let mut starts = vec![default_basis(&problem)];
            let eta = random_scheduler(&mdp, &mut rng).restricted_to(analysis.maybe_states());
            if let Ok(b) = basis_from_scheduler(&problem, &eta) {
                if factorize_basis(&problem, &b).is_ok() { starts.push(b); }
            }
            let optimal = basis_from_scheduler(&problem, &oracle.argopt).unwrap();
            for start in starts.iter().chain(std::iter::once(&optimal)) {
                let p = primal_simplex(&problem, start, None).unwrap();
                let d = dual_simplex(&problem, start, None).unwrap();
                assert_optimal_certificate(&problem, &p);
                assert_optimal_certificate(&problem, &d);
                prop_assert_eq!(&p.objective, &d.objective);
                for (j, &s) in analysis.maybe_states().iter().enumerate() {
                    prop_assert_eq!(&p.solution[j], &oracle.values[s]);
                    prop_assert_eq!(&d.solution[j], &oracle.values[s]);
                }
                // determinism
                prop_assert_eq!(&dual_simplex(&problem, start, None).unwrap().phase_log, &d.phase_log);
            }
            let p = primal_simplex(&problem, &optimal, None).unwrap();
            let d = dual_simplex(&problem, &optimal, None).unwrap();
            prop_assert_eq!(p.pivots, 0);
            prop_assert_eq!(d.pivots, 0);
        }
    }

    #[test]
    fn optimal_basis_is_feasible(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        for analysis in analyses(&mdp, &targets) {
            if analysis.num_maybe() == 0 { continue; }
            let problem = build_lp(&mdp, &analysis).unwrap();
            let oracle = brute_force_optimal(&mdp, &targets, analysis.objective()).unwrap();
            let fact = factorize_basis(&problem, &basis_from_scheduler(&problem, &oracle.argopt).unwrap()).unwrap();
            let x = basic_solution(&problem, &fact);
            prop_assert!(x.iter().all(|v| !v.is_negative()));
        }
    }

    #[test]
    fn oracles_agree(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, SMALL);
        for analysis in analyses(&mdp, &targets) {
            let brute = brute_force_optimal(&mdp, &targets, analysis.objective()).unwrap();
            let start = if analysis.objective() == Objective::Max {
                brute_force_optimal(&mdp, &targets, Objective::Max).unwrap().argopt
            } else {
                Scheduler::first_enabled(&mdp)
            };
            // start policy iteration from a poorer but apt scheduler when possible
            let start = if analysis.objective() == Objective::Max {
                let vi = value_iterate_with(&mdp, &analysis, &ValueIterationOptions::with_epsilon(0.5)).unwrap();
                if is_apt(&mdp, &analysis, &vi.scheduler) { vi.scheduler } else { start }
            } else {
                start
            };
            let pi = exact_policy_iteration(&mdp, &analysis, &start).unwrap();
            prop_assert_eq!(&pi.values, &brute.values);
            prop_assert!(pi.schedulers_examined as u128 <= mdp.scheduler_count());
        }
    }

    #[test]
    fn brute_force_dominates_every_scheduler(seed in any::<u64>()) {
        let (mdp, targets) = random_mdp(seed, TINY);
        let max = brute_force_optimal(&mdp, &targets, Objective::Max).unwrap();
        let min = brute_force_optimal(&mdp, &targets, Objective::Min).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let eta = random_scheduler(&mdp, &mut rng);
            let v = chain_reach_exact(&restrict(&mdp, &eta, &eta).unwrap(), &targets);
            for ((vs, hi), lo) in v.iter().zip(&max.values).zip(&min.values) {
                prop_assert!(vs <= hi && vs >= lo);
            }
        }
        let at_argopt = chain_reach_exact(&restrict(&mdp, &max.argopt, &max.argopt).unwrap(), &targets);
        prop_assert_eq!(at_argopt, max.values);
    }

    #[test]
    fn raw_models_survive_reordering(seed in any::<u64>()) {
        let (raw, _) = random_raw(seed, SMALL);
        let mut reversed = raw.clone();
        reversed.transitions.reverse();
        let a = raw.validate().unwrap();
        let b = reversed.validate().unwrap();
        for s in 0..a.num_states() {
            let mut left: Vec<_> = a.enabled(s).map(|t| a.transition(t).clone()).collect();
            let mut right: Vec<_> = b.enabled(s).map(|t| b.transition(t).clone()).collect();
            left.reverse();
            prop_assert_eq!(left.len(), right.len());
            right.iter_mut().zip(&left).for_each(|(r, l)| assert_eq!(r, l));
        }
    }
}

#[test]
fn constructed_singular_witness() {
    let mdp = exactreach_core::fixtures::m5();
    let targets: StateSet = [1].into_iter().collect();
    let analysis = maybe_states(&mdp, &targets, Objective::Max);
    let problem = build_lp(&mdp, &analysis).unwrap();
    let eta = Scheduler::new(&mdp, [(0, 2)]).unwrap();
    assert!(!is_apt(&mdp, &analysis, &eta));
    assert!(factorize_basis(&problem, &basis_from_scheduler(&problem, &eta).unwrap()).is_err());
}
