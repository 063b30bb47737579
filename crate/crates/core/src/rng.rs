//! Seeded, stream-split random number generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

/// RNG for work item `stream` under master `seed`. Distinct streams of the
/// same seed are independent, so replicate `i` draws the same numbers no
/// matter which thread runs it or in what order.
pub fn stream_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a tuple of indices into a single 64-bit seed (SplitMix64 finalizer).
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut h = master ^ 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h = splitmix(h ^ splitmix(p.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
