//! Deterministic pseudo-random Gaussian-rational data.
//!
//! Each stream index gets its own ChaCha stream derived from the seed, so a
//! sample can be regenerated from `(seed, index)` alone, independent of the
//! order (or thread) in which samples are drawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{Scalar, Vector};

/// Bound on numerators and denominators of random entries.
pub const DEFAULT_ENTRY_BOUND: i64 = 7;

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `a/b + (c/d)·i` with `|a|, |c| ≤ bound` and `1 ≤ b, d ≤ bound`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Scalar {
    let re_num = rng.random_range(-bound..=bound);
    let re_den = rng.random_range(1..=bound);
    let im_num = rng.random_range(-bound..=bound);
    let im_den = rng.random_range(1..=bound);
    Scalar::from_fractions(re_num, re_den, im_num, im_den)
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, bound: i64) -> Vector {
    (0..len).map(|_| random_scalar(rng, bound)).collect()
}
