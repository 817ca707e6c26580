//! Deterministic RNG stream derivation.
//!
//! Every randomized stage derives its own stream from the run seed plus a
//! list of integer tags (repetition index, flight index, tree index, ...).
//! Streams are independent of thread scheduling, so parallel runs reproduce
//! serial ones bit for bit.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; good avalanche, cheap, stable across platforms.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Mix a seed with a tag path into a single 64-bit stream key.
pub fn derive_key(seed: u64, tags: &[u64]) -> u64 {
    let mut state = seed ^ 0xa076_1d64_78bd_642f;
    let mut key = splitmix64(&mut state);
    for &t in tags {
        state ^= t.wrapping_mul(0xe703_7ed1_a0b4_28db);
        key ^= splitmix64(&mut state);
    }
    key
}

/// A seeded ChaCha stream for the given tag path.
pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_key(seed, tags))
}
