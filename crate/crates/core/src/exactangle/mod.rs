//! Exact arithmetic on the circle ℝ/ℤ at a resolution of 2⁻²⁵⁶ turns.
//!
//! Every phase `k²θ + 2kx + y` handled by the crate is an [`Angle`], so the
//! reduction mod 1 never drifts no matter how large `k` gets: additions wrap
//! exactly and integer multiples are computed with a widened multiply.
//! Conversion to `f64` happens only when a term `e(φ)` is evaluated.

mod stream;
pub(crate) mod wide;

pub use stream::{quad_phase_stream, PhaseStream};

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use wide::U256;

/// Number of fractional bits of an [`Angle`].
pub const ANGLE_BITS: u32 = 256;

/// A point of ℝ/ℤ stored as `numerator / 2²⁵⁶`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Angle(pub(crate) U256);

impl Angle {
    pub const ZERO: Angle = Angle(U256::ZERO);
    pub const HALF: Angle = Angle(U256::HALF);

    /// Nearest grid point to `(p mod q)/q`; exact ties round toward zero.
    pub fn from_rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Angle> {
        let p = p.into();
        let q = q.into();
        if q.is_zero() {
            return Err(Error::Domain("denominator must be nonzero".into()));
        }
        let (p, q) = if q.is_negative() { (-p, -q) } else { (p, q) };
        let r = p.mod_floor(&q);
        let r = r.to_biguint().expect("mod_floor of positive modulus");
        let q = q.to_biguint().expect("positive");
        Ok(Angle::from_unit_fraction(&r, &q))
    }

    /// Nearest grid point to `r/q` with `0 <= r < q`.
    pub(crate) fn from_unit_fraction(r: &BigUint, q: &BigUint) -> Angle {
        let scaled: BigUint = r << ANGLE_BITS;
        let (mut num, rem) = scaled.div_rem(q);
        if (rem << 1u32) > *q {
            num += 1u32;
        }
        Angle(U256::from_biguint(&num))
    }

    /// The grid point with the given numerator (reduced mod 2²⁵⁶).
    pub fn from_numerator(n: &BigUint) -> Angle {
        Angle(U256::from_biguint(n))
    }

    pub fn numerator(&self) -> BigUint {
        self.0.to_biguint()
    }

    /// Exact conversion of an `f64` reduced mod 1. Values with bits finer than
    /// 2⁻²⁵⁶ are rounded to nearest.
    pub fn from_f64(v: f64) -> Angle {
        if !v.is_finite() || v == 0.0 {
            return Angle::ZERO;
        }
        let bits = v.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        // |v| = mant * 2^e; numerator = mant * 2^(e + 256).
        let shift = e + ANGLE_BITS as i32;
        let num = if shift >= 0 {
            U256::from_u64(mant).shl(shift as u32)
        } else if shift > -64 {
            let s = (-shift) as u32;
            let q = mant >> s;
            let rem = mant & ((1u64 << s) - 1);
            let half = 1u64 << (s - 1);
            let round_up = rem > half || (rem == half && q & 1 == 1);
            U256::from_u64(q + round_up as u64)
        } else {
            U256::ZERO
        };
        let a = Angle(num);
        if v < 0.0 {
            -a
        } else {
            a
        }
    }

    /// `(a + b) mod 1`, exact.
    #[inline]
    pub fn wrap_add(self, other: Angle) -> Angle {
        Angle(self.0.wrapping_add(other.0))
    }

    #[inline]
    pub fn wrap_sub(self, other: Angle) -> Angle {
        Angle(self.0.wrapping_sub(other.0))
    }

    /// `(n·a) mod 1`, exact.
    #[inline]
    pub fn scale_mod1(self, n: i128) -> Angle {
        let m = Angle(self.0.wrapping_mul_u128(n.unsigned_abs()));
        if n < 0 {
            -m
        } else {
            m
        }
    }

    #[inline]
    pub fn scale_u64(self, n: u64) -> Angle {
        Angle(self.0.wrapping_mul_u64(n))
    }

    #[inline]
    pub fn scale_u128(self, n: u128) -> Angle {
        Angle(self.0.wrapping_mul_u128(n))
    }

    /// `(n·a) mod 1` for an arbitrary-size integer.
    pub fn scale_big(self, n: &BigInt) -> Angle {
        let modulus = BigUint::one() << ANGLE_BITS;
        let (sign, mag) = n.clone().into_parts();
        let prod = (self.0.to_biguint() * (mag % &modulus)) % modulus;
        let a = Angle(U256::from_biguint(&prod));
        if sign == Sign::Minus {
            -a
        } else {
            a
        }
    }

    /// `⌊n·a⌋` where `a` is read as a real in `[0, 1)`, with the fractional part.
    pub fn floor_mul(self, n: u128) -> (u128, Angle) {
        let (int, frac) = self.0.mul_u128_split(n);
        (int, Angle(frac))
    }

    /// Half of the value in `[0, 1)`, rounded down to the grid.
    pub fn halve(self) -> Angle {
        Angle(self.0.shr1())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Value in `[0, 1)` as the nearest `f64`, accurate also for tiny values.
    pub fn to_f64(&self) -> f64 {
        let lz = self.0.leading_zeros();
        if lz == 256 {
            return 0.0;
        }
        let top = 256 - lz;
        let bits = self.0.bits_below(top);
        // bits holds the 64 most significant bits; bits' leading one sits at 2^(top-1-256).
        let v = (bits as f64) * 2f64.powi(top as i32 - 64 - ANGLE_BITS as i32);
        v.min(1.0 - f64::EPSILON / 2.0)
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn to_signed_f64(&self) -> f64 {
        if self.0 >= U256::HALF {
            -(-*self).to_f64()
        } else {
            self.to_f64()
        }
    }

    /// Fast representative in `[-1/2, 1/2)` from the top 64 bits only: the
    /// truncation costs at most 2⁻⁶⁴ on top of one `f64` rounding. Used for
    /// evaluating `e(φ)`.
    #[inline]
    pub fn to_signed_f64_fast(&self) -> f64 {
        (self.0 .0[3] as i64) as f64 * (1.0 / 18446744073709551616.0)
    }

    /// `‖a‖`, the distance to the nearest integer.
    pub fn dist_to_int(&self) -> f64 {
        self.to_signed_f64().abs()
    }

    /// `e(a) = exp(2πi·a)`.
    #[inline]
    pub fn expi(&self) -> num_complex::Complex64 {
        let (s, c) = (std::f64::consts::TAU * self.to_signed_f64_fast()).sin_cos();
        num_complex::Complex64::new(c, s)
    }

    /// Lowercase hex of the numerator, 64 digits.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(64);
        for limb in self.0 .0.iter().rev() {
            s.push_str(&format!("{limb:016x}"));
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<Angle> {
        if s.len() != 64 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Parse(format!("angle hex must be 64 hex digits: {s:?}")));
        }
        let mut limbs = [0u64; 4];
        for (i, limb) in limbs.iter_mut().rev().enumerate() {
            *limb = u64::from_str_radix(&s[i * 16..(i + 1) * 16], 16)
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(Angle(U256(limbs)))
    }
}

impl std::ops::Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle(self.0.wrapping_neg())
    }
}

impl std::ops::Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        self.wrap_add(rhs)
    }
}

impl std::ops::Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self.wrap_sub(rhs)
    }
}

pub fn angle_from_rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Angle> {
    Angle::from_rational(p, q)
}

pub fn wrap_add(a: Angle, b: Angle) -> Angle {
    a.wrap_add(b)
}

pub fn scale_mod1(a: Angle, n: i128) -> Angle {
    a.scale_mod1(n)
}

pub fn dist_to_int(a: Angle) -> f64 {
    a.dist_to_int()
}

/// The grid point nearest to the golden mean conjugate (√5 − 1)/2.
pub fn golden() -> Angle {
    // floor(2^256 * (sqrt 5 - 1)/2) = (isqrt(5 * 2^512) - 2^256) / 2, then round.
    let scale = BigUint::one() << (2 * ANGLE_BITS + 2);
    let root = (scale * 5u32).sqrt(); // 2^257 * sqrt5, floored
    let two_pow = BigUint::one() << (ANGLE_BITS + 1);
    // (root - 2^257) / 4 is 2^256 * (sqrt5-1)/2 with two guard bits.
    let guarded = root - two_pow;
    let num = (&guarded + 2u32) >> 2u32;
    Angle::from_numerator(&num)
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({:.17})", self.to_f64())
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

/// Parses `p/q`, a decimal such as `0.125`, or a 64-digit hex numerator
/// prefixed with `0x`.
impl FromStr for Angle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Angle> {
        let s = s.trim();
        if let Some(hex) = s.strip_prefix("0x") {
            return Angle::from_hex(hex);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(e.to_string()))?;
            let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(e.to_string()))?;
            return Angle::from_rational(p, q);
        }
        parse_decimal(s)
    }
}

fn parse_decimal(s: &str) -> Result<Angle> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let mut p = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    if neg {
        p = -p;
    }
    let q = num_traits::pow(BigInt::from(10u32), frac.len());
    Angle::from_rational(p, q)
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Angle, D::Error> {
        let s = String::deserialize(d)?;
        Angle::from_hex(&s).map_err(serde::de::Error::custom)
    }
}
