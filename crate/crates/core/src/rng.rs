//! Seeding rules.
//!
//! All randomness comes from ChaCha8 streams. Independent replicas, CFTP
//! segments and per-draw sub-seeds are derived from a base seed by
//! [`split_seed`], a SplitMix64 hash of `(seed, index)`, so that the same
//! base seed always reproduces the same set of streams regardless of how
//! work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `index` from `seed`.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D))
}

pub fn rng_from_seed(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The generator for replica (or segment) `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> ChainRng {
    rng_from_seed(split_seed(seed, index))
}

/// Uniform integer in `[0, bound)` for a big-integer bound.
pub(crate) fn uniform_below<R: rand::Rng + ?Sized>(rng: &mut R, bound: &num_bigint::BigUint) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    assert!(bound.bits() > 0, "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let top_bits = bits - 64 * (words as u64 - 1);
    let mask = if top_bits == 64 { u64::MAX } else { (1u64 << top_bits) - 1 };
    loop {
        let mut digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        *digits.last_mut().unwrap() &= mask;
        let candidate = BigUint::from_slice(&digits.iter().flat_map(|d| [*d as u32, (*d >> 32) as u32]).collect::<Vec<u32>>());
        if &candidate < bound {
            return candidate;
        }
    }
}
