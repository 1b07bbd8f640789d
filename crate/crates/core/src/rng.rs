//! Seeding and reproducibility helpers.
//!
//! All stochastic entry points take a caller-supplied RNG so that a single
//! `u64` seed pins every draw. [`RngStream`] is a ChaCha stream cipher RNG:
//! portable across platforms and rust versions, unlike `StdRng` whose
//! algorithm is allowed to change.

use rand::SeedableRng;

/// The RNG used throughout the crate.
pub type RngStream = rand_chacha::ChaCha12Rng;

pub fn rng_from_seed(seed: u64) -> RngStream {
    RngStream::seed_from_u64(seed)
}

/// SplitMix64 finalizer, the standard 64-bit avalanche mix.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for one replica of one sweep cell.
///
/// The formula is fixed so that result files are reproducible across runs
/// and machines:
///
/// ```text
/// s1 = splitmix64(master ^ (0x9E3779B97F4A7C15 * (cell + 1)))
/// replica_seed = splitmix64(s1 ^ (0xD1B54A32D192ED03 * (replica + 1)))
/// ```
///
/// (multiplications wrap). Distinct `(cell, replica)` pairs therefore get
/// decorrelated streams from the same master seed.
pub fn replica_seed(master: u64, cell: u64, replica: u64) -> u64 {
    let s1 = splitmix64(master ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(cell.wrapping_add(1)));
    splitmix64(s1 ^ 0xD1B5_4A32_D192_ED03u64.wrapping_mul(replica.wrapping_add(1)))
}
