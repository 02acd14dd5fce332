//! Exact maximal and minimal reachability probabilities for Markov decision
//! processes.
//!
//! The pipeline: [`qualitative`] removes states whose optimum is trivially
//! zero, [`value_iteration`] proposes a scheduler in floating point,
//! [`lp`] builds the reachability LP and the basis that scheduler induces,
//! and [`simplex`] finishes in exact rational arithmetic from that basis.
//! When the proposed scheduler is optimal the simplex stops without a
//! single pivot. [`oracle`] holds independent exact solvers used to check
//! all of this.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod fixtures;
pub mod lp;
pub mod mdp;
pub mod oracle;
pub mod qualitative;
pub mod rational;
pub mod simplex;
pub mod value_iteration;

pub use lp::{basis_from_scheduler, build_lp, default_basis, Basis, Column, LpProblem};
pub use mdp::{path_probability, restrict, validate_mdp, FinitePath, MarkovChain, Mdp, RawModel, Scheduler, StateId, TransitionId};
pub use qualitative::{is_apt, maybe_states, prob0_max, prob0_min, MaybeAnalysis, Objective, StateSet};
pub use rational::Rational;
pub use simplex::{dual_simplex, factorize_basis, primal_simplex, SimplexOutcome, SimplexStatus, Variant};
pub use value_iteration::{value_iterate, ApproxResult};
