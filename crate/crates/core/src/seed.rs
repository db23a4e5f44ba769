//! Deterministic seed derivation.
//!
//! Every stochastic component takes a 64-bit seed and derives per-item
//! sub-seeds by hashing, so results never depend on worker scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for item `index` of a stream seeded with `seed`.
#[inline]
pub fn derive(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
