//! Counter-based sampling: the generator for sample `i` depends only on
//! `(seed, tag, i)`, so Monte Carlo loops give identical results in any
//! execution order.

use crate::exactangle::Angle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream tags keep the draws of different experiments independent under a
/// shared user seed.
pub mod tag {
    pub const PARSEVAL: u64 = 1;
    pub const TAIL: u64 = 2;
    pub const U_MEASURE: u64 = 3;
    pub const B_LEVEL: u64 = 4;
    pub const GAP: u64 = 5;
    pub const CANDIDATES: u64 = 6;
    pub const BOX: u64 = 7;
    pub const DENSITY: u64 = 8;
    pub const APPROX: u64 = 9;
    pub const FE_SWEEP: u64 = 10;
    pub const SCHEDULED: u64 = 11;
    pub const ACCEPT: u64 = 12;
    pub const DERIVATIVE: u64 = 13;
}

pub fn sample_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

pub fn uniform_angle<R: Rng>(rng: &mut R) -> Angle {
    Angle(crate::exactangle::wide::U256(rng.gen()))
}

/// Uniform on `[lo, hi)`.
pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

/// Log-uniform integer in `[lo, hi]`.
pub fn log_uniform_int<R: Rng>(rng: &mut R, lo: u64, hi: u64) -> u64 {
    let (a, b) = ((lo as f64).ln(), ((hi + 1) as f64).ln());
    let v = uniform(rng, a, b).exp().floor() as u64;
    v.clamp(lo, hi)
}
