#![allow(dead_code)]

use exactreach_core::{Mdp, RawModel, Rational, StateSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape limits for random models.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_states: usize,
    pub max_choices: usize,
    pub max_support: usize,
    pub max_denominator: u32,
}

pub const SMALL: Shape = Shape {
    max_states: 6,
    max_choices: 3,
    max_support: 3,
    max_denominator: 10,
};

/// `k` positive integers summing to `d`.
fn split(rng: &mut ChaCha8Rng, d: u32, k: usize) -> Vec<u32> {
    let mut cuts: Vec<u32> = (1..d).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<u32> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(d)) {
        parts.push(c - prev);
        prev = c;
    }
    parts
}

pub fn random_raw(seed: u64, shape: Shape) -> (RawModel, StateSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=shape.max_states);
    let mut raw = RawModel::new(n);
    for s in 0..n {
        for c in 0..rng.gen_range(1..=shape.max_choices) {
            let d = rng.gen_range(1..=shape.max_denominator);
            let k = rng.gen_range(1..=shape.max_support.min(n)).min(d as usize);
            let mut targets: Vec<usize> = (0..n).collect();
            targets.shuffle(&mut rng);
            let parts = split(&mut rng, d, k);
            raw.transitions.push(exactreach_core::mdp::RawTransition {
                source: s,
                action: format!("a{c}"),
                targets: targets
                    .into_iter()
                    .zip(parts)
                    .map(|(t, p)| (t, Rational::new(p.into(), d.into())))
                    .collect(),
            });
        }
    }
    // shuffle input order so canonical sorting has work to do
    raw.transitions.shuffle(&mut rng);
    let targets: StateSet = (0..n).filter(|_| rng.gen_bool(0.25)).collect();
    (raw, targets)
}

pub fn random_mdp(seed: u64, shape: Shape) -> (Mdp, StateSet) {
    let (raw, targets) = random_raw(seed, shape);
    (raw.validate().expect("generator produces valid models"), targets)
}
