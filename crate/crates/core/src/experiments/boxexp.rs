//! Monte Carlo over the box `[x₀−r, x₀+r] × J` around a resume witness.

use super::resume::ResumeWitness;
use crate::error::{Error, Result};
use crate::exactangle::Angle;
use crate::rng::{sample_rng, tag, uniform};
use crate::stats::Estimate;
use crate::weylsum::{skew_shift_n, weyl_sum, OffsetExpansion, SkewPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_J: (f64, f64) = (0.25, 0.75);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxReport {
    pub x0: Angle,
    pub radius: f64,
    pub j_lo: f64,
    pub j_hi: f64,
    pub big_m: u64,
    /// `2·λ(Δ \ T^{M}Δ)/λ(Δ)`, estimated from points whose `T^{−M}` image leaves Δ
    pub symdiff_ratio: Estimate,
    /// fraction of Δ with `||a(x,M)| − 1/2| ≤ ν`
    pub modulus_fraction: Estimate,
    pub nu: f64,
    pub samples: u64,
    pub seed: u64,
    /// order of the offset expansion, `None` for direct sums
    pub expansion_order: Option<usize>,
}

/// Box around `x0` of half-width `radius` (at least 1/2 covers the circle)
/// times `J = [lo, hi]` (length at least 1 covers the circle).
#[allow(clippy::too_many_arguments)]
pub fn box_sample(theta: Angle, x0: Angle, radius: f64, j: (f64, f64), big_m: u64, nu: f64, samples: u64, seed: u64) -> Result<BoxReport> {
    let (lo, hi) = j;
    if !(radius > 0.0 && hi > lo && samples > 0) {
        return Err(Error::Domain("box needs radius > 0, J nonempty and samples ≥ 1".into()));
    }
    let full_x = radius >= 0.5;
    let full_y = hi - lo >= 1.0;
    let half = radius.min(0.5);
    let lo_angle = Angle::from_f64(lo);
    let expansion = OffsetExpansion::new(theta, x0, big_m, half);
    let outcomes: Vec<(bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, tag::BOX, i);
            let offset = half * uniform(&mut rng, -1.0, 1.0);
            let y = Angle::from_f64(lo + (hi - lo) * uniform(&mut rng, 0.0, 1.0));
            let x = x0 + Angle::from_f64(offset);
            let img = skew_shift_n(theta, SkewPoint::new(x, y), -(big_m as i64));
            let inside_x = full_x || (img.x - x0).to_signed_f64().abs() <= radius;
            let inside_y = full_y || (img.y - lo_angle).to_f64() <= hi - lo;
            let modulus = match &expansion {
                Some(e) => e.eval(offset).norm(),
                None => weyl_sum(theta, x, Angle::ZERO, big_m).norm(),
            };
            (!(inside_x && inside_y), (modulus - 0.5).abs() <= nu)
        })
        .collect();
    let leaves = outcomes.iter().filter(|o| o.0).count() as u64;
    let close = outcomes.iter().filter(|o| o.1).count() as u64;
    Ok(BoxReport {
        x0,
        radius,
        j_lo: lo,
        j_hi: hi,
        big_m,
        symdiff_ratio: Estimate::proportion(leaves, samples).scale(2.0),
        modulus_fraction: Estimate::proportion(close, samples),
        nu,
        samples,
        seed,
        expansion_order: expansion.map(|e| e.order()),
    })
}

/// Box of half-width `r_n` around the witness point at `M_n`.
pub fn box_experiment(theta: Angle, witness: &ResumeWitness, j: (f64, f64), nu: f64, samples: u64, seed: u64) -> Result<BoxReport> {
    if !witness.valid() {
        return Err(Error::Domain("box experiment needs a witness passing checks (i)-(iii)".into()));
    }
    box_sample(theta, witness.x, witness.radius, j, witness.big_m, nu, samples, seed)
}
