use super::schedule::m_range;
use crate::error::{Error, Result};
use crate::exactangle::Angle;
use crate::weylsum::{dirichlet_b, dirichlet_b_abs, weyl_sum};
use serde::{Deserialize, Serialize};

/// Distance from target above which a choice of `m` is flagged.
pub const MN_WARNING: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MnChoice {
    pub m: u64,
    pub m_max: u64,
    /// `|a(x,q)|·|b(2qx,m)|`
    pub product: f64,
    pub a_modulus: f64,
    pub deviation: f64,
    pub warning: bool,
}

/// Scan `0..=m_max` for the `m` bringing `a_modulus·|b(t,m)|` closest to
/// `target`; ties go to the smallest `m`.
pub fn best_m(a_modulus: f64, t: Angle, m_max: u64, target: f64) -> MnChoice {
    let mut best = (0u64, 0.0f64, f64::INFINITY);
    for m in 0..=m_max {
        let product = a_modulus * dirichlet_b_abs(t, m);
        let dev = (product - target).abs();
        if dev < best.2 {
            best = (m, product, dev);
        }
    }
    MnChoice {
        m: best.0,
        m_max,
        product: best.1,
        a_modulus,
        deviation: best.2,
        warning: best.2 > MN_WARNING,
    }
}

/// `m ≤ ⌈q^{1/2+ε/4}⌉` minimizing `| |a(x,q)|·|b(2qx,m)| − target |`.
/// Callers are expected to have `‖2qx‖` in `[δ/2, δ]`.
pub fn find_mn(theta: Angle, q: u64, x: Angle, eps: f64, target: f64) -> MnChoice {
    let a = weyl_sum(theta, x, Angle::ZERO, q).norm();
    best_m(a, x.scale_u64(2 * q), m_range(q, eps), target)
}

/// `|a(x,ml) − a(x,l)·b(2lx,m)| / (|a(x,l)|·m³·l·‖lθ‖)`.
pub fn approx_ratio(theta: Angle, l: u64, m: u64, x: Angle) -> Result<f64> {
    let ml = m.checked_mul(l).ok_or_else(|| Error::Domain("m·l overflows".into()))?;
    let a_l = weyl_sum(theta, x, Angle::ZERO, l);
    let den = a_l.norm() * (m as f64).powi(3) * l as f64 * theta.scale_u64(l).dist_to_int();
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Domain(format!("zero denominator at l={l}, m={m}")));
    }
    let num = (weyl_sum(theta, x, Angle::ZERO, ml) - a_l * dirichlet_b(x.scale_u64(2 * l), m)).norm();
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub step: f64,
    pub derivative: f64,
    /// `(5π/δ)·q^{5/2+ε/4}`
    pub bound: f64,
    /// `|derivative| / bound`
    pub ratio: f64,
}

/// Allowance over the bound for finite-difference error.
pub const DERIVATIVE_SLACK: f64 = 1.1;

impl DerivativeCheck {
    pub fn holds(&self) -> bool {
        self.ratio <= DERIVATIVE_SLACK
    }
}

/// Central difference of `x ↦ |a(x,q)|·|b(2qx,m)|` with step `10⁻³·q^{−5/2}`.
pub fn derivative_check(theta: Angle, q: u64, m: u64, x: Angle, delta: f64, eps: f64) -> Result<DerivativeCheck> {
    let d = x.scale_u64(2 * q).dist_to_int();
    if !(delta / 4.0..=2.0 * delta).contains(&d) {
        return Err(Error::Domain(format!("‖2qx‖ = {d} outside [δ/4, 2δ]")));
    }
    if m as f64 > (q as f64).powf(0.5 + eps / 4.0) {
        return Err(Error::Domain(format!("m = {m} above q^{{1/2+ε/4}}")));
    }
    let qf = q as f64;
    let step = 1e-3 * qf.powf(-2.5);
    let f = |x: Angle| weyl_sum(theta, x, Angle::ZERO, q).norm() * dirichlet_b_abs(x.scale_u64(2 * q), m);
    let h = Angle::from_f64(step);
    let derivative = (f(x + h) - f(x - h)) / (2.0 * step);
    let bound = 5.0 * std::f64::consts::PI / delta * qf.powf(2.5 + eps / 4.0);
    Ok(DerivativeCheck {
        step,
        derivative,
        bound,
        ratio: derivative.abs() / bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::{key, limit};
    use crate::contfrac::{angle_from_cf, construct_f_member};
    use crate::exactangle::{angle_from_rational, golden};
    use crate::rng::{sample_rng, tag, uniform_angle};

    fn constructed() -> Angle {
        angle_from_cf(&construct_f_member(0.5, 4, &[2]).unwrap().0)
    }

    #[test]
    fn mn_examples() {
        let theta = constructed();
        let x = angle_from_rational(1, 3).unwrap();
        let c = find_mn(theta, 17, x, 0.5, 0.0);
        assert_eq!(c.m, 0);
        assert_eq!(c.product, 0.0);
        // vanishing a: every product is 0, first m wins and is flagged
        let c = best_m(0.0, x, 20, 0.5);
        assert_eq!((c.m, c.product), (0, 0.0));
        assert!(c.warning);
        // scanned minimum against brute force
        let c = find_mn(theta, 17, x, 0.5, 0.5);
        let a = weyl_sum(theta, x, Angle::ZERO, 17).norm();
        let t = x.scale_u64(34);
        for m in 0..=c.m_max {
            assert!((a * dirichlet_b(t, m).norm() - 0.5).abs() >= c.deviation - 1e-9);
        }
    }

    #[test]
    fn ratio_examples() {
        let g = golden();
        let x = angle_from_rational(2, 11).unwrap();
        assert!(approx_ratio(g, 5, 1, x).unwrap() < 1e-12);
        assert!(approx_ratio(g, 1, 3, x).unwrap().is_finite());
        assert!(approx_ratio(g, 5, 0, x).is_err());
        // ‖lθ‖ = 0
        assert!(approx_ratio(angle_from_rational(1, 4).unwrap(), 4, 2, x).is_err());
    }

    #[test]
    fn ratio_bounded_on_random_instances() {
        let theta = constructed();
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            let mut r = sample_rng(5, tag::APPROX, i);
            let x = uniform_angle(&mut r);
            let l = [17u64, 83523][(i % 2) as usize];
            let m = 1 + i % 25;
            worst = worst.max(approx_ratio(theta, l, m, x).unwrap());
        }
        assert!(worst <= limit(key::APPROX_RATIO).unwrap(), "worst {worst}");
    }

    #[test]
    fn derivative_examples() {
        let theta = constructed();
        let x = angle_from_rational(1, 340).unwrap();
        assert_eq!(derivative_check(theta, 17, 0, x, 0.2, 0.5).unwrap().ratio, 0.0);
        let x1 = angle_from_rational(1, 13).unwrap();
        assert!(derivative_check(golden(), 1, 1, x1, 0.2, 0.5).unwrap().derivative.abs() < 1e-3);
        for i in 0..50 {
            let x = uniform_angle(&mut sample_rng(8, tag::DERIVATIVE, i));
            let d = x.scale_u64(34).dist_to_int();
            if (0.05..=0.4).contains(&d) {
                let c = derivative_check(theta, 17, 4, x, 0.2, 0.5).unwrap();
                assert!(c.holds(), "{c:?}");
            }
        }
        let q = 83523u64;
        let mut checked = 0;
        for i in 0..200 {
            let x = uniform_angle(&mut sample_rng(9, tag::DERIVATIVE, i));
            let d = x.scale_u64(2 * q).dist_to_int();
            if !(0.05..=0.4).contains(&d) {
                continue;
            }
            let c = derivative_check(theta, q, 100, x, 0.2, 0.5).unwrap();
            assert!(c.holds(), "{c:?}");
            checked += 1;
            if checked == 5 {
                break;
            }
        }
        assert_eq!(checked, 5);
        let x = Angle::ZERO;
        assert!(derivative_check(theta, q, 100, x, 0.2, 0.5).is_err());
    }
}
