//! Renormalization of the half-quadratic sums ψ under the Gauss map:
//! `√θ·ψ(θ,x,k) = ψ(Sθ, x', [kθ]) + O(1)` and its iterates.
//!
//! The image point is `x' = {−x/θ + a/2}` with `a = ⌊1/θ⌋`. The half turn
//! for odd `a` comes from `e(j²a/2) = e(j·a/2)`: without it the residual
//! grows like √k whenever `a` is odd.

use crate::error::{Error, Result};
use crate::exactangle::{Angle, ANGLE_BITS};
use crate::rng::{sample_rng, tag, uniform_angle};
use crate::stats::Estimate;
use crate::weylsum::{dirichlet_b_abs, psi};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormStep {
    /// `{1/θ}`
    pub theta_next: Angle,
    pub x_next: Angle,
    /// `[kθ]`
    pub k_next: u64,
    /// `√θ`
    pub sigma_factor: f64,
    /// `⌊1/θ⌋`
    #[serde(with = "crate::report::decimal")]
    pub quotient: BigUint,
}

impl RenormStep {
    /// The Gauss image is zero: θ was the last convergent of its expansion.
    pub fn terminated(&self) -> bool {
        self.theta_next.is_zero()
    }
}

/// `(⌊1/θ⌋, {1/θ})` in exact integer arithmetic over the grid numerator.
pub fn gauss_map(theta: Angle) -> Result<(BigUint, Angle)> {
    if theta.is_zero() {
        return Err(Error::Domain("Gauss map undefined at θ = 0".into()));
    }
    let t = theta.numerator();
    let (a, r) = (BigUint::one() << ANGLE_BITS).div_rem(&t);
    Ok((a, Angle::from_unit_fraction(&r, &t)))
}

fn image_point(theta_num: &BigUint, quotient: &BigUint, x: Angle) -> Angle {
    // {−x/θ} = ((−X) mod T)/T, so x = 0 maps to 0
    let r = (theta_num - x.numerator() % theta_num) % theta_num;
    let base = Angle::from_unit_fraction(&r, theta_num);
    if quotient.is_odd() {
        base + Angle::HALF
    } else {
        base
    }
}

pub fn renorm_step(theta: Angle, x: Angle, k: u64) -> Result<RenormStep> {
    let (quotient, theta_next) = gauss_map(theta)?;
    let x_next = image_point(&theta.numerator(), &quotient, x);
    Ok(RenormStep {
        theta_next,
        x_next,
        k_next: theta.floor_mul(k as u128).0 as u64,
        sigma_factor: theta.to_f64().sqrt(),
        quotient,
    })
}

/// `|√θ·ψ(θ,x,k) − ψ(Sθ, x', [kθ])|`, both sides summed directly.
pub fn fe_residual(theta: Angle, x: Angle, k: u64) -> Result<f64> {
    let step = renorm_step(theta, x, k)?;
    Ok((step.sigma_factor * psi(theta, x, k) - psi(step.theta_next, step.x_next, step.k_next)).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLevel {
    pub level: usize,
    pub theta: Angle,
    pub x: Angle,
    pub k: u64,
    /// `σ_l(θ) = ∏_{j<l} √(S^jθ)`
    pub sigma: f64,
    pub psi: f64,
    /// `|σ_l ψ(θ,x,k) − ψ(S^lθ, x_l, k_l)|`
    pub residual: f64,
    /// Residual of the single step from level `l−1`; zero at level 0.
    pub step_residual: f64,
    /// `∑_{j≤l} (σ_l/σ_j)·step_residual_j`, which bounds `residual`.
    pub triangle_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormChain {
    pub requested_depth: usize,
    pub levels: Vec<ChainLevel>,
    /// The Gauss orbit hit zero before the requested depth.
    pub truncated: bool,
}

impl RenormChain {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn sigma(&self) -> f64 {
        self.levels.last().unwrap().sigma
    }

    pub fn max_residual(&self) -> f64 {
        self.levels.iter().map(|l| l.residual).fold(0.0, f64::max)
    }
}

pub fn renorm_chain(theta: Angle, x: Angle, k: u64, m: usize) -> Result<RenormChain> {
    let psi0 = psi(theta, x, k);
    let mut levels = vec![ChainLevel {
        level: 0,
        theta,
        x,
        k,
        sigma: 1.0,
        psi: psi0,
        residual: 0.0,
        step_residual: 0.0,
        triangle_bound: 0.0,
    }];
    let mut truncated = false;
    while levels.len() <= m {
        let prev = levels.last().unwrap();
        if prev.theta.is_zero() {
            truncated = true;
            break;
        }
        let step = renorm_step(prev.theta, prev.x, prev.k)?;
        let sigma = prev.sigma * step.sigma_factor;
        let psi_l = psi(step.theta_next, step.x_next, step.k_next);
        let step_residual = (step.sigma_factor * prev.psi - psi_l).abs();
        levels.push(ChainLevel {
            level: prev.level + 1,
            theta: step.theta_next,
            x: step.x_next,
            k: step.k_next,
            sigma,
            psi: psi_l,
            residual: (sigma * psi0 - psi_l).abs(),
            step_residual,
            triangle_bound: step.sigma_factor * prev.triangle_bound + step_residual,
        });
    }
    Ok(RenormChain {
        requested_depth: m,
        levels,
        truncated,
    })
}

/// `S⁰θ, …, S^{m−1}θ`, shorter if the orbit reaches zero.
pub fn gauss_orbit(theta: Angle, m: usize) -> Vec<Angle> {
    let mut out = Vec::with_capacity(m);
    let mut t = theta;
    while out.len() < m && !t.is_zero() {
        out.push(t);
        t = gauss_map(t).expect("nonzero").1;
    }
    out
}

fn k_at_depth(orbit: &[Angle], k: u64) -> u64 {
    orbit.iter().fold(k, |k, t| t.floor_mul(k as u128).0 as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmInversion {
    pub k: u64,
    pub achieved: u64,
}

/// Smallest `k` with `k(m) ≥ K`, by binary search on the nondecreasing map
/// `k ↦ k(m)`.
pub fn invert_km(theta: Angle, m: usize, target: u64) -> Result<KmInversion> {
    let orbit = gauss_orbit(theta, m);
    if orbit.len() < m {
        if target == 0 {
            return Ok(KmInversion { k: 0, achieved: 0 });
        }
        return Err(Error::SearchFailed(format!(
            "Gauss orbit ends at depth {} < {m}: k({m}) = 0 for every k, K = {target} unreachable",
            orbit.len()
        )));
    }
    let limit = 1u64 << 62;
    let mut hi = target.max(1);
    while k_at_depth(&orbit, hi) < target {
        if hi >= limit {
            return Err(Error::SearchFailed(format!("k({m}) < {target} for all k ≤ 2^62")));
        }
        hi = hi.saturating_mul(2).min(limit);
    }
    let mut lo = 0u64;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if k_at_depth(&orbit, mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(KmInversion {
        k: lo,
        achieved: k_at_depth(&orbit, lo),
    })
}

/// `U_θ^{(m)}x`: the x-component after `m` renormalization steps, or `None`
/// if the orbit of θ ends first.
pub fn u_iterate(theta: Angle, x: Angle, m: usize) -> Option<Angle> {
    let orbit = gauss_orbit(theta, m);
    (orbit.len() == m).then(|| iterate_on_orbit(&orbit_data(&orbit), x))
}

fn orbit_data(orbit: &[Angle]) -> Vec<(BigUint, BigUint)> {
    orbit
        .iter()
        .map(|t| {
            let (a, _) = gauss_map(*t).expect("nonzero");
            (t.numerator(), a)
        })
        .collect()
}

fn iterate_on_orbit(data: &[(BigUint, BigUint)], x: Angle) -> Angle {
    data.iter().fold(x, |x, (t, a)| image_point(t, a, x))
}

fn u_samples(theta: Angle, m: usize, samples: u64, seed: u64, stream_tag: u64) -> Result<Vec<Angle>> {
    let orbit = gauss_orbit(theta, m);
    if orbit.len() < m {
        return Err(Error::Domain(format!("Gauss orbit of θ ends at depth {} < {m}", orbit.len())));
    }
    let data = orbit_data(&orbit);
    Ok((0..samples)
        .into_par_iter()
        .map(|i| iterate_on_orbit(&data, uniform_angle(&mut sample_rng(seed, stream_tag, i))))
        .collect())
}

/// Monte Carlo `λ{x : ‖U^{(m)}x‖ < η}/η` with standard error.
pub fn u_measure_lower(theta: Angle, m: usize, eta: f64, samples: u64, seed: u64) -> Result<Estimate> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::Domain("eta must lie in (0, 1/2)".into()));
    }
    if m == 0 {
        return Ok(Estimate {
            mean: 2.0,
            std_err: 0.0,
            samples: 0,
        });
    }
    if samples == 0 {
        return Err(Error::Domain("samples must be >= 1".into()));
    }
    let pts = u_samples(theta, m, samples, seed, tag::U_MEASURE)?;
    let hits = pts.iter().filter(|u| u.dist_to_int() < eta).count() as u64;
    Ok(Estimate::proportion(hits, samples).scale(1.0 / eta))
}

/// `[2πC₀] + 1`
pub fn level_length(c0: f64) -> u64 {
    (std::f64::consts::TAU * c0).floor() as u64 + 1
}

/// Monte Carlo `λ{x : |b(U^{(m)}x, [2πC₀]+1)| ≥ C₀}`.
pub fn b_level_measure(theta: Angle, m: usize, c0: f64, samples: u64, seed: u64) -> Result<Estimate> {
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::Domain("C0 must be positive".into()));
    }
    if samples == 0 {
        return Err(Error::Domain("samples must be >= 1".into()));
    }
    let len = level_length(c0);
    let pts = u_samples(theta, m, samples, seed, tag::B_LEVEL)?;
    let hits = pts.iter().filter(|u| dirichlet_b_abs(**u, len) >= c0).count() as u64;
    Ok(Estimate::proportion(hits, samples))
}

/// `log σ_m = ½∑_{l<m} log S^lθ`, the second route to σ_m.
pub fn log_sigma(theta: Angle, m: usize) -> f64 {
    gauss_orbit(theta, m).iter().map(|t| 0.5 * t.to_f64().ln()).sum()
}

/// `∏_{l<m} S^lθ` as a real, for the bound `k(m) ≤ k·∏ S^lθ + m`.
pub fn orbit_product(theta: Angle, m: usize) -> f64 {
    gauss_orbit(theta, m).iter().map(|t| t.to_f64()).product()
}
