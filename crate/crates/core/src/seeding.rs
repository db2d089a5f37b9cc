//! Derivation of independent, reproducible RNG streams.
//!
//! Every random quantity in the crate flows from a single master seed.
//! Streams are keyed by purpose and indices rather than by thread, so a
//! parallel run draws exactly the same numbers as a sequential one.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags, one per independent consumer of randomness.
pub(crate) mod tag {
    pub const CONSTRUCTION: u64 = 0x636f6e7374;
    pub const PERMUTATION: u64 = 0x7065726d;
    pub const TRIAL: u64 = 0x747269616c;
}

/// Builds an RNG whose stream is fully determined by `(master, tag, a, b)`.
pub(crate) fn derive_rng(master: u64, tag: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&tag.to_le_bytes());
    seed[16..24].copy_from_slice(&a.to_le_bytes());
    seed[24..32].copy_from_slice(&b.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// Collapses `(master, tag)` to a single u64, used where a seed (not a
/// stream) must be stored, e.g. the permutation seed kept in a code file.
pub(crate) fn derive_seed(master: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ tag.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
