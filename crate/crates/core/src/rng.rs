//! Seed derivation.
//!
//! Every random draw in the crate comes from a ChaCha8 stream selected by a
//! `(seed, tag)` pair. The seed picks the key and the tag picks the ChaCha
//! stream, so adding a new consumer never shifts the draws of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used across the crate. One per random variable or stage.
pub mod tag {
    pub const SENSITIVE: u64 = 1;
    pub const COVARIATE_C: u64 = 2;
    pub const NOISE_L: u64 = 3;
    pub const OUTCOME: u64 = 4;
    pub const SPLIT: u64 = 10;
    pub const PROPORTION: u64 = 11;
    pub const BALANCE: u64 = 12;
    pub const MODEL_INIT: u64 = 20;
    pub const EXPLAIN_SELECT: u64 = 30;
    pub const LIME: u64 = 31;
    pub const BOOTSTRAP: u64 = 40;
    pub const POPULATION: u64 = 50;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine a seed with a tag or index into a new seed.
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix64(seed ^ mix64(tag.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// A generator for stream `tag` under `seed`.
pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}
