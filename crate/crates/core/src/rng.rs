//! Seeded randomness.
//!
//! Every random decision in the crate draws from ChaCha8 seeded with a
//! 64-bit integer, so splits, folds and tuner proposals are reproducible
//! across platforms. Shuffling is an explicit Fisher-Yates over
//! `random_range` so the permutation does not depend on `rand`'s slice
//! helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// In-place Fisher-Yates shuffle, swapping from the back.
pub fn shuffle<T>(items: &mut [T], rng: &mut SeededRng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

/// Uniform random subset of `items` of size `m` (partial Fisher-Yates from
/// the front); the chosen elements are returned in draw order.
pub fn sample_without_replacement<T: Copy>(items: &[T], m: usize, rng: &mut SeededRng) -> Vec<T> {
    let mut pool = items.to_vec();
    let m = m.min(pool.len());
    for i in 0..m {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(m);
    pool
}
