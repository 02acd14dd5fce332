//! Small hand-checkable models shared by tests and documentation.

use crate::mdp::{Mdp, RawModel};

/// Three states: `0` chooses between `a = {1: 1/2, 2: 1/2}` and
/// `b = {1: 1/3, 2: 2/3}`; `1` (the usual target) and `2` (a sink) loop.
pub fn m2_raw() -> RawModel {
    RawModel::new(3)
        .transition(0, "a", &[(1, 1, 2), (2, 1, 2)])
        .transition(0, "b", &[(1, 1, 3), (2, 2, 3)])
        .transition(1, "-", &[(1, 1, 1)])
        .transition(2, "-", &[(2, 1, 1)])
}

pub fn m2() -> Mdp {
    m2_raw().validate().expect("m2 is well formed")
}

/// [`m2`] with a third choice `c` in state `0`: a certain self-loop.
pub fn m5() -> Mdp {
    RawModel::new(3)
        .transition(0, "a", &[(1, 1, 2), (2, 1, 2)])
        .transition(0, "b", &[(1, 1, 3), (2, 2, 3)])
        .transition(0, "c", &[(0, 1, 1)])
        .transition(1, "-", &[(1, 1, 1)])
        .transition(2, "-", &[(2, 1, 1)])
        .validate()
        .expect("m5 is well formed")
}
