//! Deterministic sub-seed derivation.
//!
//! Every random stream in a run is keyed by `(base_seed, tag, index)` so that
//! results never depend on scheduling order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TAG_AFS1: u64 = 0x4146_5331;
pub(crate) const TAG_TREE: u64 = 0x5452_4545;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a list of stream coordinates.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(base: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, parts))
}
