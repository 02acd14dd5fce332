use super::*;
use crate::fixtures::{m2, m5};
use crate::lp::{basis_from_scheduler, build_lp, default_basis, Column};
use crate::mdp::{Mdp, Scheduler};
use crate::qualitative::{maybe_states, Objective, StateSet};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn lp(mdp: &Mdp, objective: Objective) -> LpProblem {
    let target: StateSet = [1].into_iter().collect();
    build_lp(mdp, &maybe_states(mdp, &target, objective)).unwrap()
}

fn scheduler_basis(mdp: &Mdp, problem: &LpProblem, mu: usize) -> Basis {
    basis_from_scheduler(problem, &Scheduler::new(mdp, [(0, mu)]).unwrap()).unwrap()
}

#[test]
fn identity_basis_factorizes() {
    let p = lp(&m5(), Objective::Max);
    let fact = factorize_basis(&p, &default_basis(&p)).unwrap();
    assert_eq!(
        fact.reconstruct(),
        vec![vec![q(1, 1), q(0, 1), q(0, 1)], vec![q(0, 1), q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1), q(1, 1)]]
    );
}

#[test]
fn m2_scheduler_basis_matrix() {
    let mdp = m2();
    let p = lp(&mdp, Objective::Max);
    let fact = factorize_basis(&p, &scheduler_basis(&mdp, &p, 0)).unwrap();
    assert_eq!(fact.reconstruct(), vec![vec![q(-1, 1), q(0, 1)], vec![q(-1, 1), q(1, 1)]]);
}

#[test]
fn self_loop_basis_is_singular() {
    let mdp = m5();
    let p = lp(&mdp, Objective::Max);
    let basis = scheduler_basis(&mdp, &p, 2);
    let ids: Vec<_> = basis.identities(&p).collect();
    assert_eq!(ids, [Column::State(0), Column::Slack(0), Column::Slack(1)]);
    assert!(matches!(factorize_basis(&p, &basis), Err(SimplexError::SingularBasis { .. })));
}

#[test]
fn basic_solutions_of_m2() {
    let mdp = m2();
    let p = lp(&mdp, Objective::Max);
    let sol = |b: &Basis| basic_solution(&p, &factorize_basis(&p, b).unwrap());
    assert_eq!(sol(&scheduler_basis(&mdp, &p, 0)), [q(1, 2), q(0, 1), q(1, 6)]);
    assert_eq!(sol(&scheduler_basis(&mdp, &p, 1)), [q(1, 3), q(-1, 6), q(0, 1)]);
    assert_eq!(sol(&default_basis(&p)), [q(0, 1), q(-1, 2), q(-1, 3)]);
}

#[test]
fn reduced_costs_of_m2() {
    let mdp = m2();
    let p = lp(&mdp, Objective::Max);
    let rc = |b: &Basis| reduced_costs(&p, &factorize_basis(&p, b).unwrap());
    assert_eq!(rc(&scheduler_basis(&mdp, &p, 0)), [(1, q(1, 1))]);
    assert_eq!(rc(&scheduler_basis(&mdp, &p, 1)), [(2, q(1, 1))]);
    assert_eq!(rc(&default_basis(&p)), [(0, q(1, 1))]);
}

#[test]
fn primal_examples() {
    let mdp = m2();
    let max = lp(&mdp, Objective::Max);
    let warm = primal_simplex(&max, &scheduler_basis(&mdp, &max, 0), None).unwrap();
    assert_eq!(warm.status, SimplexStatus::Optimal);
    assert_eq!(warm.pivots, 0);
    assert_eq!(warm.objective, q(1, 2));

    let cold = primal_simplex(&max, &default_basis(&max), None).unwrap();
    assert_eq!(cold.status, SimplexStatus::Optimal);
    assert_eq!(cold.objective, q(1, 2));
    assert!(cold.pivots >= 1);

    let min = lp(&mdp, Objective::Min);
    let warm = primal_simplex(&min, &scheduler_basis(&mdp, &min, 1), None).unwrap();
    assert_eq!(warm.status, SimplexStatus::Optimal);
    assert_eq!(warm.pivots, 0);
    assert_eq!(warm.solution[0], q(1, 3));
}

#[test]
fn dual_examples() {
    let mdp = m2();
    let p = lp(&mdp, Objective::Max);
    let optimal_basis = scheduler_basis(&mdp, &p, 0);

    let warm = dual_simplex(&p, &optimal_basis, None).unwrap();
    assert_eq!((warm.status, warm.pivots), (SimplexStatus::Optimal, 0));

    let near = dual_simplex(&p, &scheduler_basis(&mdp, &p, 1), None).unwrap();
    assert_eq!(near.status, SimplexStatus::Optimal);
    assert_eq!(near.objective, q(1, 2));
    assert_eq!(near.pivots, 1);
    assert_eq!(near.phase_one_pivots, 0);
    assert_eq!(near.basis, optimal_basis);
    assert_eq!(near.pivot_log_text(), "1 phase2 enter slack[t1] leave slack[t0]\n");

    let cold = dual_simplex(&p, &default_basis(&p), None).unwrap();
    assert_eq!(cold.status, SimplexStatus::Optimal);
    assert_eq!(cold.objective, q(1, 2));
    assert_eq!(cold.phase_one_pivots, 0);
    assert!(cold.pivots >= 1);
}

#[test]
fn dual_phase_one_for_min_from_slack_basis() {
    // c = -1 on the state column: the slack basis is not dual feasible
    let mdp = m2();
    let p = lp(&mdp, Objective::Min);
    let fact = factorize_basis(&p, &default_basis(&p)).unwrap();
    assert!(!is_dual_feasible(&p, &fact));
    let out = dual_simplex(&p, &default_basis(&p), None).unwrap();
    assert_eq!(out.status, SimplexStatus::Optimal);
    assert_eq!(out.solution[0], q(1, 3));
    assert!(out.phase_one_pivots >= 1);
}

#[test]
fn iteration_limit_is_reported() {
    let mdp = m2();
    let p = lp(&mdp, Objective::Max);
    let out = primal_simplex(&p, &default_basis(&p), Some(0)).unwrap();
    assert_eq!(out.status, SimplexStatus::IterationLimit);
    assert_eq!(out.pivots, 0);
}

#[test]
fn wrong_basis_size_is_rejected() {
    let p = lp(&m2(), Objective::Max);
    let other = lp(&m5(), Objective::Max);
    assert_eq!(
        factorize_basis(&p, &default_basis(&other)).unwrap_err(),
        SimplexError::BasisSize { expected: 2, actual: 3 }
    );
}

#[test]
fn updates_match_fresh_factorization() {
    // after a pivot, the eta-updated solves agree with a fresh factorization
    let mdp = m5();
    let p = lp(&mdp, Objective::Max);
    let mut fact = factorize_basis(&p, &default_basis(&p)).unwrap();
    let alpha = fact.solve(&dense_column(&p, 0));
    fact.replace(1, 0, &alpha);
    let fresh = BasisFactorization::new(&p, fact.header().to_vec()).unwrap();
    // positions differ between the two; compare by column
    let by_column = |f: &BasisFactorization, v: Vec<Rational>| {
        let mut pairs: Vec<(usize, Rational)> = f.header().iter().copied().zip(v).collect();
        pairs.sort_by_key(|(c, _)| *c);
        pairs
    };
    let rhs = [q(1, 2), q(-3, 7), q(5, 1)];
    assert_eq!(by_column(&fact, fact.solve(&rhs)), by_column(&fresh, fresh.solve(&rhs)));
    let position_rhs = |f: &BasisFactorization| -> Vec<Rational> { f.header().iter().map(|&c| q(c as i64 + 1, 3)).collect() };
    assert_eq!(fact.solve_transposed(&position_rhs(&fact)), fresh.solve_transposed(&position_rhs(&fresh)));
}
