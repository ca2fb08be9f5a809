//! Continued fractions of grid angles, their convergents, and finite-depth
//! witnesses of membership in the class 𝓕 (∑ 1/a_l < ∞ and
//! liminf q^{3+ε}‖qθ‖ = 0).

use crate::error::{Error, Result};
use crate::exactangle::{Angle, ANGLE_BITS};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Denominators beyond this size are refused by [`construct_f_member`].
pub const MAX_DENOMINATOR_BITS: u32 = 100;

/// Partial quotients `[a_1, a_2, …, a_L]` of `1/(a_1 + 1/(a_2 + …))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    #[serde(with = "crate::report::decimal_vec")]
    quotients: Vec<BigUint>,
}

impl ContinuedFraction {
    pub fn new(quotients: Vec<BigUint>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::Domain("continued fraction needs at least one quotient".into()));
        }
        if quotients.iter().any(|a| a.is_zero()) {
            return Err(Error::Domain("partial quotients must be >= 1".into()));
        }
        Ok(ContinuedFraction { quotients })
    }

    pub fn from_u64s(q: &[u64]) -> Result<Self> {
        Self::new(q.iter().map(|&a| BigUint::from(a)).collect())
    }

    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// Merges a trailing quotient 1 into its predecessor, so that every
    /// rational has exactly one representation.
    pub fn canonical(mut self) -> Self {
        if self.quotients.len() >= 2 && self.quotients.last().is_some_and(|a| a.is_one()) {
            self.quotients.pop();
            *self.quotients.last_mut().unwrap() += 1u32;
        }
        self
    }

    pub fn reciprocal_sum(&self) -> f64 {
        self.quotients
            .iter()
            .map(|a| 1.0 / a.to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.quotients.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let quotients = s
            .split(',')
            .map(|t| BigUint::from_str(t.trim()).map_err(|e| Error::Parse(format!("quotient {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        ContinuedFraction::new(quotients)
    }
}

/// Convergent `p_l/q_l = [a_1, …, a_l]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub index: usize,
    #[serde(with = "crate::report::decimal")]
    pub p: BigUint,
    #[serde(with = "crate::report::decimal")]
    pub q: BigUint,
}

/// The recurrence `p_l = a_l p_{l−1} + p_{l−2}`, `q_l = a_l q_{l−1} + q_{l−2}`
/// from `(p₀, q₀) = (0, 1)`, `(p₋₁, q₋₁) = (1, 0)`.
pub fn convergents(cf: &ContinuedFraction) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(cf.len());
    let (mut p_prev, mut q_prev) = (BigUint::one(), BigUint::zero());
    let (mut p, mut q) = (BigUint::zero(), BigUint::one());
    for (i, a) in cf.quotients.iter().enumerate() {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent {
            index: i + 1,
            p: p.clone(),
            q: q.clone(),
        });
    }
    out
}

/// Result of expanding a grid angle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub cf: ContinuedFraction,
    /// The angle equals the value of `cf` to grid resolution: no further
    /// quotients are determined.
    pub exhausted: bool,
}

/// Gauss-map expansion `a = ⌊1/θ⌋, θ ← {1/θ}` of `num/den` in exact integer
/// arithmetic. Stops at `max_depth`, at a zero remainder, or once the current
/// convergent lies within half a grid step `1/(2·den)` of `num/den`.
pub(crate) fn expand_ratio(num: &BigUint, den: &BigUint, max_depth: usize) -> (Vec<BigUint>, bool) {
    let mut quotients = Vec::new();
    let (mut n, mut d) = (num.clone(), den.clone());
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (BigInt::zero(), BigInt::one());
    let num_i = BigInt::from(num.clone());
    let den_i = BigInt::from(den.clone());
    while quotients.len() < max_depth {
        if n.is_zero() {
            return (quotients, true);
        }
        let (a, r) = d.div_rem(&n);
        let a_i = BigInt::from(a.clone());
        let p_next = &a_i * &p + &p_prev;
        let q_next = &a_i * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        quotients.push(a);
        d = std::mem::replace(&mut n, r);
        // |num/den − p/q| ≤ 1/(2 den)  ⇔  2|num·q − p·den| ≤ q
        let gap = (&num_i * &q - &p * &den_i).magnitude() << 1u32;
        if n.is_zero() || gap <= *q.magnitude() {
            return (quotients, true);
        }
    }
    (quotients, false)
}

/// Expansion of a nonzero angle, with the exhaustion flag.
pub fn expand_angle(theta: Angle, max_depth: usize) -> Result<Expansion> {
    if theta.is_zero() {
        return Err(Error::Domain("cannot expand θ = 0".into()));
    }
    let den = BigUint::one() << ANGLE_BITS;
    let (quotients, exhausted) = expand_ratio(&theta.numerator(), &den, max_depth);
    let mut cf = ContinuedFraction { quotients };
    if exhausted {
        cf = cf.canonical();
    }
    Ok(Expansion { cf, exhausted })
}

pub fn cf_expand(theta: Angle, max_depth: usize) -> Result<ContinuedFraction> {
    expand_angle(theta, max_depth).map(|e| e.cf)
}

/// Value `p_L/q_L` of a finite continued fraction, snapped to the grid.
pub fn angle_from_cf(cf: &ContinuedFraction) -> Angle {
    let last = convergents(cf).pop().expect("nonempty by construction");
    let (_, r) = last.p.div_rem(&last.q);
    Angle::from_unit_fraction(&r, &last.q)
}

/// One witness value `q_l^{3+ε}·‖q_l θ‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    #[serde(with = "crate::report::decimal")]
    pub q: BigUint,
    pub dist: f64,
    pub value: f64,
}

/// Finite-depth certificate of 𝓕-like behaviour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FClassCert {
    pub eps: f64,
    pub depth: usize,
    #[serde(with = "crate::report::decimal_vec")]
    pub quotients: Vec<BigUint>,
    /// ∑_{l ≤ L} 1/a_l
    pub partial_sum: f64,
    pub witnesses: Vec<Witness>,
    pub min_witness: f64,
    pub min_level: Option<usize>,
    /// θ is the value of the whole expansion (grid rational); the last level
    /// carries no witness since ‖q_L θ‖ vanishes there.
    pub finite_expansion: bool,
}

impl FClassCert {
    /// Witnesses strictly decrease from `from_level` on.
    pub fn decreasing_from(&self, from_level: usize) -> bool {
        let v: Vec<f64> = self.witnesses.iter().filter(|w| w.level >= from_level).map(|w| w.value).collect();
        v.windows(2).all(|w| w[1] < w[0])
    }
}

fn witness_value(q: &BigUint, dist: f64, eps: f64) -> f64 {
    if dist == 0.0 {
        return 0.0;
    }
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    // log domain keeps q^{3+ε} finite for large q
    ((3.0 + eps) * qf.ln() + dist.ln()).exp()
}

/// Certificate for `cf` against the angle `theta`: partial sums of 1/a_l and
/// witnesses `q_l^{3+ε}‖q_lθ‖` with ‖·‖ computed exactly on the grid.
pub fn f_witness(cf: &ContinuedFraction, eps: f64, theta: Angle) -> Result<FClassCert> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let expansion = expand_angle(theta, cf.len() + 1)?;
    let expanded = expansion.cf.quotients();
    let consistent = if expanded.len() > cf.len() {
        &expanded[..cf.len()] == cf.quotients()
    } else {
        expanded == cf.quotients() && expansion.exhausted
    };
    if !consistent {
        return Err(Error::Consistency(format!(
            "quotients [{cf}] are not a prefix of the expansion [{}] of θ",
            expansion.cf
        )));
    }
    let finite_expansion = expansion.exhausted && expanded.len() == cf.len();
    let convs = convergents(cf);
    let upto = if finite_expansion { convs.len() - 1 } else { convs.len() };
    let witnesses: Vec<Witness> = convs[..upto]
        .iter()
        .map(|c| {
            let dist = theta.scale_big(&BigInt::from(c.q.clone())).dist_to_int();
            Witness {
                level: c.index,
                q: c.q.clone(),
                dist,
                value: witness_value(&c.q, dist, eps),
            }
        })
        .collect();
    let (min_witness, min_level) = witnesses
        .iter()
        .fold((f64::INFINITY, None), |(m, l), w| if w.value < m { (w.value, Some(w.level)) } else { (m, l) });
    Ok(FClassCert {
        eps,
        depth: cf.len(),
        quotients: cf.quotients().to_vec(),
        partial_sum: cf.reciprocal_sum(),
        witnesses,
        min_witness,
        min_level,
        finite_expansion,
    })
}

fn ceil_pow(q: &BigUint, exponent: f64) -> BigUint {
    let rounded = exponent.round();
    if (exponent - rounded).abs() < 1e-12 && rounded >= 0.0 {
        return num_traits::pow(q.clone(), rounded as usize);
    }
    // Non-integral exponents go through f64: relative accuracy 2^-52.
    let v = (exponent * q.to_f64().unwrap_or(f64::INFINITY).ln()).exp().ceil();
    BigUint::from_f64(v).unwrap_or_else(|| BigUint::one() << 1100u32)
}

/// Extends `seed_quotients` by `a_{l+1} = ⌈q_l^{2+2ε}⌉` up to `levels`
/// quotients and certifies the result against its own angle.
pub fn construct_f_member(eps: f64, levels: usize, seed_quotients: &[u64]) -> Result<(ContinuedFraction, FClassCert)> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if levels < 2 {
        return Err(Error::Domain("levels must be at least 2".into()));
    }
    if seed_quotients.is_empty() {
        return Err(Error::Domain("seed quotients must be nonempty".into()));
    }
    let limit = BigUint::one() << MAX_DENOMINATOR_BITS;
    let mut cf = ContinuedFraction::from_u64s(seed_quotients)?;
    if convergents(&cf).last().unwrap().q > limit {
        return Err(Error::Truncated {
            requested: levels,
            achieved: 0,
            limit_bits: MAX_DENOMINATOR_BITS,
        });
    }
    while cf.len() < levels {
        let convs = convergents(&cf);
        let q = &convs.last().unwrap().q;
        let q_prev = if convs.len() >= 2 { convs[convs.len() - 2].q.clone() } else { BigUint::one() };
        let a = ceil_pow(q, 2.0 + 2.0 * eps);
        let q_next = &a * q + q_prev;
        if q_next > limit {
            return Err(Error::Truncated {
                requested: levels,
                achieved: cf.len(),
                limit_bits: MAX_DENOMINATOR_BITS,
            });
        }
        cf.quotients.push(a);
    }
    let theta = angle_from_cf(&cf);
    let cert = f_witness(&cf, eps, theta)?;
    Ok((cf, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactangle::{angle_from_rational, golden};
    use num_traits::Signed;
    use proptest::prelude::*;

    fn u(v: &[u64]) -> ContinuedFraction {
        ContinuedFraction::from_u64s(v).unwrap()
    }

    #[test]
    fn expand_examples() {
        let third = angle_from_rational(1, 3).unwrap();
        let e = expand_angle(third, 50).unwrap();
        assert_eq!(e.cf, u(&[3]));
        assert!(e.exhausted);
        assert_eq!(cf_expand(angle_from_rational(5, 13).unwrap(), 50).unwrap(), u(&[2, 1, 1, 2]));
        let g = cf_expand(golden(), 1000).unwrap();
        assert!(g.len() >= 100);
        assert!(g.quotients()[..100].iter().all(|a| a.is_one()));
        assert!(cf_expand(Angle::ZERO, 10).is_err());
        // a dyadic terminates through a zero remainder
        assert_eq!(cf_expand(Angle::HALF, 10).unwrap(), u(&[2]));
    }

    #[test]
    fn convergent_examples() {
        let qs: Vec<u64> = convergents(&u(&[1, 1, 1, 1, 1])).iter().map(|c| c.q.to_u64().unwrap()).collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8]);
        let c = convergents(&u(&[2]));
        assert_eq!((c[0].p.to_u64(), c[0].q.to_u64()), (Some(1), Some(2)));
        let qs: Vec<u64> = convergents(&u(&[2, 6, 610])).iter().map(|c| c.q.to_u64().unwrap()).collect();
        assert_eq!(qs, vec![2, 13, 7932]);
    }

    #[test]
    fn angle_from_cf_examples() {
        assert_eq!(angle_from_cf(&u(&[2])), Angle::HALF);
        assert_eq!(angle_from_cf(&u(&[1, 1])), Angle::HALF);
        let last = convergents(&u(&[2, 6, 610])).pop().unwrap();
        assert_eq!(last.q.to_u64(), Some(7932));
        let expect = angle_from_rational(BigInt::from(last.p), BigInt::from(last.q)).unwrap();
        assert_eq!(angle_from_cf(&u(&[2, 6, 610])), expect);
    }

    #[test]
    fn construct_examples() {
        let (cf, cert) = construct_f_member(0.5, 3, &[2]).unwrap();
        assert_eq!(cf, u(&[2, 8, 4913]));
        let qs: Vec<u64> = convergents(&cf).iter().map(|c| c.q.to_u64().unwrap()).collect();
        assert_eq!(qs, vec![2, 17, 83523]);
        // l = 2: 17^3.5 · (1/83523); ‖q₂θ‖ = 1/q₃ for θ = p₃/q₃
        let w2 = cert.witnesses.iter().find(|w| w.level == 2).unwrap();
        let expect = 17f64.powf(3.5) / 83523.0;
        assert!((w2.value - expect).abs() < 1e-12 * expect);
        assert!((w2.value - 0.2425).abs() < 1e-3);
        assert!(cert.finite_expansion);
        assert_eq!(cert.min_level, Some(2));

        let (cf4, cert4) = construct_f_member(0.5, 4, &[2]).unwrap();
        assert_eq!(cf4.quotients()[3], BigUint::from(83523u64).pow(3));
        let w3 = cert4.witnesses.iter().find(|w| w.level == 3).unwrap();
        assert!(w3.value < 0.01);
        assert!(cert4.decreasing_from(2));
    }

    #[test]
    fn construct_truncates_beyond_limit() {
        match construct_f_member(0.5, 5, &[2]) {
            Err(Error::Truncated { achieved, .. }) => assert_eq!(achieved, 4),
            other => panic!("expected truncation, got {other:?}"),
        }
        assert!(construct_f_member(0.5, 1, &[2]).is_err());
    }

    #[test]
    fn witness_examples() {
        let g = golden();
        let cf = cf_expand(g, 20).unwrap();
        let cert = f_witness(&cf, 0.5, g).unwrap();
        assert!((cert.partial_sum - 20.0).abs() < 1e-12);
        assert!(!cert.finite_expansion);
        assert_eq!(cert.witnesses.len(), 20);
        // q^{3.5}·1/(√5 q) up to bounded factor: grows like q^{2.5}
        let last = cert.witnesses.last().unwrap();
        let q = last.q.to_f64().unwrap();
        let ratio = last.value / q.powf(2.5);
        assert!(ratio > 0.3 && ratio < 0.6, "{ratio}");

        let cf = u(&[2, 8, 4913]);
        let cert = f_witness(&cf, 0.5, angle_from_cf(&cf)).unwrap();
        assert!((cert.min_witness - 0.2425).abs() < 1e-3);

        let third = angle_from_rational(1, 3).unwrap();
        let cert = f_witness(&u(&[3]), 0.5, third).unwrap();
        assert!(cert.finite_expansion);
        assert!(cert.witnesses.is_empty());

        assert!(matches!(f_witness(&u(&[2, 5]), 0.5, third), Err(Error::Consistency(_))));
    }

    #[test]
    fn text_format() {
        let cf: ContinuedFraction = "2,8,4913".parse().unwrap();
        assert_eq!(cf.to_string(), "2,8,4913");
        assert!("2,0".parse::<ContinuedFraction>().is_err());
        assert!("".parse::<ContinuedFraction>().is_err());
    }

    /// ‖kθ‖ ≥ ‖q_{l−1}θ‖ for 1 ≤ k < q_l, by brute force.
    #[test]
    fn best_approximation_property() {
        let g = golden();
        let convs = convergents(&cf_expand(g, 14).unwrap());
        for w in convs.windows(2) {
            let base = g.scale_big(&BigInt::from(w[0].q.clone())).dist_to_int();
            let ql = w[1].q.to_i64().unwrap();
            for k in 1..ql {
                assert!(g.scale_mod1(k as i128).dist_to_int() >= base - 1e-300);
            }
        }
    }

    fn arb_cf() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(1u64..60, 1..12)
    }

    proptest! {
        #[test]
        fn unimodular(v in arb_cf()) {
            let convs = convergents(&u(&v));
            let mut prev = (BigInt::zero(), BigInt::one());
            for c in &convs {
                let (p, q) = (BigInt::from(c.p.clone()), BigInt::from(c.q.clone()));
                let det = &p * &prev.1 - &prev.0 * &q;
                let sign = if c.index % 2 == 0 { -1 } else { 1 };
                prop_assert_eq!(det, BigInt::from(sign));
                prop_assert!(c.p.gcd(&c.q).is_one());
                prev = (p, q);
            }
        }

        #[test]
        fn roundtrip_canonical(v in arb_cf()) {
            let cf = u(&v).canonical();
            if cf.quotients() != [BigUint::one()] {
                prop_assert_eq!(cf_expand(angle_from_cf(&cf), 100).unwrap(), cf);
            }
        }

        /// 1/(q_{l+1}+q_l) ≤ ‖q_l θ‖ ≤ 1/q_{l+1} with θ = p_L/q_L, in exact rationals.
        #[test]
        fn distance_brackets(v in prop::collection::vec(1u64..60, 2..12)) {
            let convs = convergents(&u(&v));
            let last = convs.last().unwrap();
            let (pl, ql) = (BigInt::from(last.p.clone()), BigInt::from(last.q.clone()));
            for w in convs.windows(2) {
                let q = BigInt::from(w[0].q.clone());
                let p = BigInt::from(w[0].p.clone());
                // ‖qθ‖ = |q p_L − p q_L| / q_L  (nearest integer to qθ is p)
                let dist_num = (&q * &pl - &p * &ql).abs();
                let qn = BigInt::from(w[1].q.clone());
                prop_assert!(&dist_num * &qn <= ql);
                prop_assert!(&dist_num * (&qn + &q) >= ql);
            }
        }

        /// Convergents with q ≤ 2^100 agree with a 400-bit reference snapping.
        #[test]
        fn snapping_preserves_small_convergents(v in prop::collection::vec(1u64..1000, 2..40)) {
            let cf = u(&v);
            let last = convergents(&cf).pop().unwrap();
            let (_, r) = last.p.div_rem(&last.q);
            let grid256 = angle_from_cf(&cf).numerator();
            let den400 = BigUint::one() << 400u32;
            let num400 = ((&r << 400u32) + (&last.q >> 1u32)) / &last.q;
            let (a256, _) = expand_ratio(&grid256, &(BigUint::one() << 256u32), 200);
            let (a400, _) = expand_ratio(&num400, &den400, 200);
            let c256 = convergents(&ContinuedFraction::new(a256).unwrap().canonical());
            let c400 = convergents(&ContinuedFraction::new(a400).unwrap().canonical());
            let limit = BigUint::one() << 100u32;
            for c in c400.iter().filter(|c| c.q <= limit) {
                prop_assert_eq!(Some(c), c256.get(c.index - 1));
            }
        }
    }
}
