//! Seed splitting.
//!
//! Every random decision in the crate is drawn from a [`ChaCha8Rng`] seeded
//! through [`split_seed`], so any trial can be replayed in isolation:
//!
//! ```text
//! instance_seed = split_seed(master_seed, instance_index)
//! trial_seed    = split_seed(instance_seed, trial_index)
//! ```
//!
//! `split_seed(a, b) = mix(a ^ mix(b + 0x9E3779B97F4A7C15))`, where `mix` is the
//! SplitMix64 finalizer. The function is frozen: changing it changes every
//! report.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child `index` from `parent`.
pub fn split_seed(parent: u64, index: u64) -> u64 {
    mix(parent ^ mix(index.wrapping_add(GOLDEN)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the half-open interval `(0, 1]`.
pub fn unit_open_closed<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}
