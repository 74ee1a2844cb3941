//! Deterministic random-stream derivation.
//!
//! Every stochastic decision in a run draws from a `ChaCha8Rng` whose seed is
//! a pure function of the run seed and a structural path (generation, event
//! slot, child index, ...). Streams are independent by construction: drawing
//! from one never advances another, so a parallel schedule sees exactly the
//! randomness a serial schedule would.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
fn mix(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a structural `path`.
///
/// Equivalent to iterating the SplitMix64 step once for the base and once per
/// path component, folding each component into the state before mixing, so
/// `derive_seed(s, &[])` reproduces the first SplitMix64 output for seed `s`.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut acc = mix(base.wrapping_add(GOLDEN));
    for &component in path {
        acc = mix(acc.wrapping_add(component).wrapping_add(GOLDEN));
    }
    acc
}

/// A fresh stream for the decision identified by `path` under `base`.
pub fn stream(base: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, path))
}

/// FNV-1a, used to fold names (problem, method label) into seed paths.
pub fn hash_str(s: &str) -> u64 {
    let mut acc: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in s.as_bytes() {
        acc ^= b as u64;
        acc = acc.wrapping_mul(0x0000_0100_0000_01b3);
    }
    acc
}

/// Path tags. Keeping them distinct guarantees that streams drawn for
/// different purposes in the same generation never collide.
pub mod tag {
    pub const INIT: u64 = 0x01;
    pub const SURVIVAL: u64 = 0x02;
    pub const DEDUP: u64 = 0x03;
    pub const EVENT: u64 = 0x04;
    pub const CHILD: u64 = 0x05;
    pub const PROBLEM: u64 = 0x06;
    pub const CELL: u64 = 0x07;
}
