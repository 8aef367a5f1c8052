#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use whichway::bounds::{FilterPair, PreparationPair};
use whichway::channels::Preparation;
use whichway::linalg::random::random_pure_state;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_preps(d: usize, n: usize, rng: &mut ChaCha20Rng) -> Vec<PreparationPair> {
    (0..n)
        .map(|m| {
            PreparationPair::new(
                format!("m{m}"),
                random_pure_state(d, rng),
                random_pure_state(d, rng),
            )
            .unwrap()
        })
        .collect()
}

pub fn random_filters(d: usize, n: usize, rng: &mut ChaCha20Rng) -> Vec<FilterPair> {
    (0..n)
        .map(|k| {
            FilterPair::new(
                format!("n{k}"),
                random_pure_state(d, rng),
                random_pure_state(d, rng),
            )
            .unwrap()
        })
        .collect()
}

/// Ensemble over the pure pairs of `preps` with the given weights.
pub fn ensemble(preps: &[PreparationPair], weights: &[f64]) -> Preparation {
    Preparation::ensemble(
        weights.to_vec(),
        preps
            .iter()
            .map(|p| (p.psi0.clone(), p.psi1.clone()))
            .collect(),
    )
    .unwrap()
}

pub fn filters(labels: &[&str]) -> Vec<FilterPair> {
    labels
        .iter()
        .map(|l| FilterPair::polarization(l).unwrap())
        .collect()
}
