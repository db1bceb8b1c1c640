//! Seeded random streams.
//!
//! Every random consumer draws from a ChaCha8 generator seeded with the user
//! seed and placed on its own stream, so instance generation and annealing
//! never overlap even when they share a seed:
//!
//! | stream        | consumer                         |
//! |---------------|----------------------------------|
//! | `0`           | instance generation              |
//! | `1 + c`       | simulated annealing chain `c`    |
//!
//! ChaCha output is specified bit-for-bit, so results are portable across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const INSTANCE_STREAM: u64 = 0;
const ANNEAL_STREAM_BASE: u64 = 1;

/// Generator used to draw instance heights.
pub fn instance_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INSTANCE_STREAM);
    rng
}

/// Generator owned by annealing chain `chain`.
pub fn anneal_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ANNEAL_STREAM_BASE + chain);
    rng
}

/// Mixes a base seed with a list of coordinates into a new seed (SplitMix64 finalizer).
///
/// Used by the benchmark runner to derive one instance seed per
/// `(base_seed, size, index)` without any shared generator state.
pub fn derive_seed(base: u64, coords: &[u64]) -> u64 {
    let mut state = mix(base);
    for &c in coords {
        state = mix(state ^ mix(c.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
