//! Seeded synthetic data used by the benches, the self-check and the examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sequences::Dataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian-ish random walk: cumulative sum of uniform(-1, 1) steps.
pub fn random_walk<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (0..len)
        .map(|_| {
            acc += rng.gen_range(-1.0..1.0);
            acc
        })
        .collect()
}

pub fn random_walk_dataset<R: Rng>(rng: &mut R, count: usize, len: usize) -> Dataset {
    Dataset::from_values((0..count).map(|_| random_walk(rng, len)).collect())
        .expect("random walks are non-empty and finite")
}

/// Uniform white noise in `[-1, 1)`.
pub fn noise<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
