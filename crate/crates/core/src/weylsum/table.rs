//! Fast evaluation of `a(x, 0, n)` at many `x` for fixed `(θ, n)`.
//!
//! `a(x, 0, n) = ∑_k c_k u^k` with `c_k = e(k²θ)` and `u = e(2x)`, so each
//! point costs one Horner pass over a shared coefficient table. Phases of the
//! coefficients are exact; the powers of `u` accumulate about `n·2⁻⁵³` of
//! phase error, which is why the precise engine is used wherever sums enter
//! an identity check.

use crate::exactangle::{Angle, PhaseStream};
use num_complex::Complex64;
use rayon::prelude::*;

const LANES: usize = 8;

#[derive(Clone, Debug)]
pub struct QuadTable {
    coeffs: Vec<Complex64>,
}

impl QuadTable {
    pub fn new(theta: Angle, n: u64) -> Self {
        let stream = PhaseStream::new(Angle::ZERO, theta, theta.scale_u64(2));
        QuadTable {
            coeffs: stream.take(n as usize).map(|p| p.expi()).collect(),
        }
    }

    pub fn len(&self) -> u64 {
        self.coeffs.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: Angle) -> Complex64 {
        self.eval_lanes(&[x])[0]
    }

    fn eval_lanes(&self, xs: &[Angle]) -> [Complex64; LANES] {
        debug_assert!(xs.len() <= LANES);
        let mut ur = [1.0; LANES];
        let mut ui = [0.0; LANES];
        for (l, x) in xs.iter().enumerate() {
            let u = x.scale_u64(2).expi();
            ur[l] = u.re;
            ui[l] = u.im;
        }
        let mut re = [0.0f64; LANES];
        let mut im = [0.0f64; LANES];
        for c in self.coeffs.iter().rev() {
            for l in 0..LANES {
                let (ar, ai) = (re[l], im[l]);
                re[l] = ar * ur[l] - ai * ui[l] + c.re;
                im[l] = ar * ui[l] + ai * ur[l] + c.im;
            }
        }
        let mut out = [Complex64::new(0.0, 0.0); LANES];
        for l in 0..LANES {
            out[l] = Complex64::new(re[l], im[l]);
        }
        out
    }

    /// Values at every point, in input order; parallel over chunks.
    pub fn eval_many(&self, xs: &[Angle]) -> Vec<Complex64> {
        let chunks: Vec<Vec<Complex64>> = xs
            .par_chunks(LANES * 4)
            .map(|chunk| {
                let mut out = Vec::with_capacity(chunk.len());
                for group in chunk.chunks(LANES) {
                    let v = self.eval_lanes(group);
                    out.extend_from_slice(&v[..group.len()]);
                }
                out
            })
            .collect();
        chunks.concat()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactangle::{angle_from_rational, golden};
    use crate::weylsum::weyl_sum;

    #[test]
    fn matches_precise_engine() {
        let theta = golden();
        let table = QuadTable::new(theta, 3001);
        let xs: Vec<Angle> = (1..20).map(|i| angle_from_rational(i * 7919, 100_003).unwrap()).collect();
        let fast = table.eval_many(&xs);
        for (x, f) in xs.iter().zip(&fast) {
            let exact = weyl_sum(theta, *x, Angle::ZERO, 3001);
            assert!((exact - f).norm() < 1e-9, "{exact} vs {f}");
        }
        assert_eq!(QuadTable::new(theta, 0).eval(xs[0]), Complex64::new(0.0, 0.0));
    }
}
