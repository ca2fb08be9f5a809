//! `a(x₀+δ, y, n)` for many small offsets `δ` from one pass over the terms:
//! `a(x₀+δ, n) = ∑_j (4πiδn)^j / j! · S_j` with `S_j = ∑_k (k/n)^j e(φ_k)`.

use super::engine::moments_stream;
use crate::exactangle::{quad_phase_stream, Angle};
use num_complex::Complex64;

const MAX_ORDER: usize = 40;
const TARGET_ERROR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct OffsetExpansion {
    n: u64,
    radius: f64,
    moments: Vec<Complex64>,
}

impl OffsetExpansion {
    /// Expansion valid for `|δ| ≤ radius`, or `None` when `4π·radius·n > 2`
    /// and a truncated series would converge too slowly.
    pub fn new(theta: Angle, x0: Angle, n: u64, radius: f64) -> Option<Self> {
        let z = 4.0 * std::f64::consts::PI * radius * n as f64;
        if z > 2.0 {
            return None;
        }
        // tail ≤ n·z^{J+1}/(J+1)!·e^z
        let mut order = 0;
        let mut term = n as f64 * z * z.exp();
        while term > TARGET_ERROR && order < MAX_ORDER {
            order += 1;
            term *= z / (order + 1) as f64;
        }
        Some(OffsetExpansion {
            n,
            radius,
            moments: moments_stream(quad_phase_stream(theta, x0, Angle::ZERO), n, order),
        })
    }

    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `a(x₀+δ, 0, n)`.
    pub fn eval(&self, delta: f64) -> Complex64 {
        let c = Complex64::new(0.0, 4.0 * std::f64::consts::PI * delta * self.n as f64);
        let mut p = Complex64::new(1.0, 0.0);
        let mut out = Complex64::new(0.0, 0.0);
        for (j, s) in self.moments.iter().enumerate() {
            out += p * s;
            p = p * c / (j + 1) as f64;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactangle::{angle_from_rational, golden};
    use crate::weylsum::weyl_sum;

    #[test]
    fn matches_direct_sums() {
        let theta = golden();
        let x0 = angle_from_rational(3, 17).unwrap();
        let n = 20_000;
        let r = 1e-6;
        let e = OffsetExpansion::new(theta, x0, n, r).unwrap();
        assert!(e.order() > 2);
        for d in [-1e-6, -3.3e-7, 0.0, 5e-7, 1e-6] {
            let x = x0 + Angle::from_f64(d);
            let direct = weyl_sum(theta, x, Angle::ZERO, n);
            assert!((e.eval(d) - direct).norm() < 1e-9, "{d}");
        }
        assert!(OffsetExpansion::new(theta, x0, n, 1e-3).is_none());
    }
}
