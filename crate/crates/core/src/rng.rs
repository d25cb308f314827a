//! Seed discipline.
//!
//! Every random quantity is drawn from a ChaCha stream selected by
//! `(seed, stream index)`, so a replicate or a Monte Carlo draw sees the
//! same numbers regardless of evaluation order or sharding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives an independent child seed, used for nesting streams (e.g. a
/// replicate that itself runs a seeded estimator).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `n` standard normal draws from stream `(seed, index)`.
pub fn standard_normals(seed: u64, index: u64, n: usize) -> Vec<f64> {
    let mut rng = stream(seed, index);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}
