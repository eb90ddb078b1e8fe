//! Counter-based seed derivation.
//!
//! Every Monte Carlo sample `k` of an experiment draws from its own generator,
//! seeded by a pure function of `(master_seed, k)`. Results therefore do not
//! depend on how samples are scheduled across worker threads.
//!
//! The derivation is fixed bit-for-bit:
//!
//! ```text
//! mix64(z):
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     z ^ (z >> 31)
//!
//! sample_seed(master, k) = mix64(master + 0x9E3779B97F4A7C15 * (k + 1))
//! ```
//!
//! (all arithmetic wrapping mod 2^64). A 64-bit seed is expanded into the
//! 32-byte ChaCha8 key as four consecutive outputs of the SplitMix64 stream
//! started at that seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` under `master`.
#[inline]
pub fn sample_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// The generator used by every sampler in this crate.
pub type SampleRng = ChaCha8Rng;

/// Build a generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SampleRng {
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        let word = mix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(i as u64 + 1)));
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Generator for sample `index` of an experiment seeded with `master`.
pub fn sample_rng(master: u64, index: u64) -> SampleRng {
    rng_from_seed(sample_seed(master, index))
}
