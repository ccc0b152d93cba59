//! Seeded randomness.
//!
//! Everything random in the crate flows through a `ChaCha20Rng` seeded
//! from a `u64`, so any run is reproducible from its seed across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Seeded = ChaCha20Rng;

pub fn seeded(seed: u64) -> Seeded {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Derive an independent stream for trial `index` from a base seed.
/// Keeps per-trial results stable when the trial count changes.
pub fn trial_rng(base_seed: u64, index: u64) -> Seeded {
    seeded(base_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index))
}
