//! Fixed 256-bit unsigned integers with wrapping arithmetic, little-endian limbs.

use num_bigint::BigUint;
use std::cmp::Ordering;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Debug)]
pub(crate) struct U256(pub(crate) [u64; 4]);

impl U256 {
    pub(crate) const ZERO: U256 = U256([0; 4]);
    pub(crate) const HALF: U256 = U256([0, 0, 0, 1 << 63]);

    pub(crate) fn from_u64(v: u64) -> Self {
        U256([v, 0, 0, 0])
    }

    #[inline]
    pub(crate) fn wrapping_add(self, rhs: Self) -> Self {
        let mut out = [0u64; 4];
        let mut carry = false;
        for ((o, &a), &b) in out.iter_mut().zip(&self.0).zip(&rhs.0) {
            let (s1, c1) = a.overflowing_add(b);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *o = s2;
            carry = c1 | c2;
        }
        U256(out)
    }

    #[inline]
    pub(crate) fn wrapping_sub(self, rhs: Self) -> Self {
        let mut out = [0u64; 4];
        let mut borrow = false;
        for ((o, &a), &b) in out.iter_mut().zip(&self.0).zip(&rhs.0) {
            let (d1, b1) = a.overflowing_sub(b);
            let (d2, b2) = d1.overflowing_sub(borrow as u64);
            *o = d2;
            borrow = b1 | b2;
        }
        U256(out)
    }

    #[inline]
    pub(crate) fn wrapping_neg(self) -> Self {
        U256::ZERO.wrapping_sub(self)
    }

    /// Full product with a 64-bit factor: returns (low 256 bits, overflow limb).
    #[inline]
    pub(crate) fn mul_u64_full(self, k: u64) -> (Self, u64) {
        let mut out = [0u64; 4];
        let mut carry: u128 = 0;
        for (o, &a) in out.iter_mut().zip(&self.0) {
            let t = (a as u128) * (k as u128) + carry;
            *o = t as u64;
            carry = t >> 64;
        }
        (U256(out), carry as u64)
    }

    #[inline]
    pub(crate) fn wrapping_mul_u64(self, k: u64) -> Self {
        self.mul_u64_full(k).0
    }

    pub(crate) fn wrapping_mul_u128(self, k: u128) -> Self {
        let lo = k as u64;
        let hi = (k >> 64) as u64;
        let a = self.wrapping_mul_u64(lo);
        let b = self.wrapping_mul_u64(hi).shl_limbs(1);
        a.wrapping_add(b)
    }

    /// Integer part of `self * k / 2^256` together with the fractional part.
    pub(crate) fn mul_u128_split(self, k: u128) -> (u128, Self) {
        let lo = k as u64;
        let hi = (k >> 64) as u64;
        let (a, a_over) = self.mul_u64_full(lo);
        let (b, b_over) = self.mul_u64_full(hi);
        // b is shifted up one limb: its top limb and overflow go to the integer part.
        let b_shift = b.shl_limbs(1);
        let b_int = (b_over as u128) << 64 | b.0[3] as u128;
        let (frac, carry) = a.overflowing_add(b_shift);
        let int = (a_over as u128) + b_int + carry as u128;
        (int, frac)
    }

    fn overflowing_add(self, rhs: Self) -> (Self, bool) {
        let s = self.wrapping_add(rhs);
        (s, s.cmp(&self) == Ordering::Less)
    }

    fn shl_limbs(self, n: usize) -> Self {
        let mut out = [0u64; 4];
        out[n..4].copy_from_slice(&self.0[..4 - n]);
        U256(out)
    }

    #[allow(clippy::needless_range_loop)]
    pub(crate) fn shr1(self) -> Self {
        let mut out = [0u64; 4];
        for i in 0..4 {
            let hi = if i < 3 { self.0[i + 1] << 63 } else { 0 };
            out[i] = (self.0[i] >> 1) | hi;
        }
        U256(out)
    }

    #[allow(clippy::needless_range_loop)]
    pub(crate) fn shl(self, n: u32) -> Self {
        if n >= 256 {
            return U256::ZERO;
        }
        let limbs = (n / 64) as usize;
        let bits = n % 64;
        let mut out = [0u64; 4];
        for i in limbs..4 {
            let src = i - limbs;
            out[i] = self.0[src] << bits;
            if bits > 0 && src > 0 {
                out[i] |= self.0[src - 1] >> (64 - bits);
            }
        }
        U256(out)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }

    pub(crate) fn leading_zeros(&self) -> u32 {
        for i in (0..4).rev() {
            if self.0[i] != 0 {
                return (3 - i as u32) * 64 + self.0[i].leading_zeros();
            }
        }
        256
    }

    /// The 64 bits starting at bit position `top` (exclusive) going down, i.e.
    /// bits `top-64 .. top`, with zeros shifted in below bit 0.
    pub(crate) fn bits_below(&self, top: u32) -> u64 {
        debug_assert!((1..=256).contains(&top));
        let shift = 256 - top;
        let v = self.shl(shift);
        v.0[3]
    }

    pub(crate) fn to_biguint(self) -> BigUint {
        let mut digits = Vec::with_capacity(8);
        for limb in self.0 {
            digits.push(limb as u32);
            digits.push((limb >> 32) as u32);
        }
        BigUint::new(digits)
    }

    /// Reduces modulo 2^256.
    pub(crate) fn from_biguint(v: &BigUint) -> Self {
        let digits = v.to_u64_digits();
        let mut out = [0u64; 4];
        for (o, d) in out.iter_mut().zip(digits) {
            *o = d;
        }
        U256(out)
    }
}

impl PartialOrd for U256 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for U256 {
    fn cmp(&self, other: &Self) -> Ordering {
        for i in (0..4).rev() {
            match self.0[i].cmp(&other.0[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn modulus() -> BigUint {
        BigUint::one() << 256
    }

    fn arb_u256() -> impl Strategy<Value = U256> {
        prop::array::uniform4(any::<u64>()).prop_map(U256)
    }

    proptest! {
        #[test]
        fn add_matches_bigint(a in arb_u256(), b in arb_u256()) {
            let expect = (a.to_biguint() + b.to_biguint()) % modulus();
            prop_assert_eq!(a.wrapping_add(b).to_biguint(), expect);
        }

        #[test]
        fn mul_u128_matches_bigint(a in arb_u256(), k in any::<u128>()) {
            let full = a.to_biguint() * BigUint::from(k);
            prop_assert_eq!(a.wrapping_mul_u128(k).to_biguint(), &full % modulus());
            let (int, frac) = a.mul_u128_split(k);
            prop_assert_eq!(BigUint::from(int), &full >> 256);
            prop_assert_eq!(frac.to_biguint(), &full % modulus());
        }

        #[test]
        fn sub_inverts_add(a in arb_u256(), b in arb_u256()) {
            prop_assert_eq!(a.wrapping_add(b).wrapping_sub(b), a);
        }
    }

    #[test]
    fn shifts() {
        let one = U256::from_u64(1);
        assert_eq!(one.shl(255), U256::HALF);
        assert_eq!(U256::HALF.shr1().shl(1), U256::HALF);
        assert_eq!(one.leading_zeros(), 255);
        assert_eq!(U256::HALF.bits_below(256), 1 << 63);
    }
}
