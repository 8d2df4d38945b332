//! Seed derivation. Every random stream in the arena is a ChaCha8 generator
//! keyed by a 64-bit seed; sub-streams are split off with SplitMix64 so that
//! adding a consumer never perturbs the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ArenaRng = ChaCha8Rng;

/// One SplitMix64 output step.
pub const fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives an independent seed for sub-stream `tag` of `seed`.
pub const fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// Hashes a label into a tag usable with [`derive`] (FNV-1a).
pub fn tag_of(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn rng(seed: u64) -> ArenaRng {
    ChaCha8Rng::seed_from_u64(seed)
}
