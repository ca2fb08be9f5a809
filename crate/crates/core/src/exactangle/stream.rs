use super::Angle;

/// Streaming quadratic phases driven by exact second differences.
///
/// State after yielding index `k-1`: `phase = φ_k`, `diff = φ_{k+1} − φ_k`,
/// `second = φ_{k+2} − 2φ_{k+1} + φ_k` (constant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseStream {
    phase: Angle,
    diff: Angle,
    second: Angle,
    index: u64,
}

impl PhaseStream {
    /// Quadratic phases `φ_k = φ₀ + k·d₀ + k(k−1)/2·s`.
    pub fn new(phase0: Angle, diff0: Angle, second: Angle) -> Self {
        PhaseStream {
            phase: phase0,
            diff: diff0,
            second,
            index: 0,
        }
    }

    /// Repositions the stream so the next yielded phase is `φ_k`, computed
    /// in closed form from the initial data.
    pub fn starting_at(phase0: Angle, diff0: Angle, second: Angle, k: u64) -> Self {
        let k128 = k as u128;
        let tri = if k == 0 { 0 } else { k128 * (k128 - 1) / 2 };
        PhaseStream {
            phase: phase0 + diff0.scale_u128(k128) + second.scale_u128(tri),
            diff: diff0 + second.scale_u128(k128),
            second,
            index: k,
        }
    }

    #[inline]
    pub fn phase(&self) -> Angle {
        self.phase
    }

    #[inline]
    pub fn diff(&self) -> Angle {
        self.diff
    }

    #[inline]
    pub fn second(&self) -> Angle {
        self.second
    }

    /// Index of the next phase to be yielded.
    #[inline]
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Advances by `n` steps without yielding, exactly.
    pub fn advance(&mut self, n: u64) {
        let n128 = n as u128;
        let tri = if n == 0 { 0 } else { n128 * (n128 - 1) / 2 };
        self.phase = self.phase + self.diff.scale_u128(n128) + self.second.scale_u128(tri);
        self.diff = self.diff + self.second.scale_u128(n128);
        self.index += n;
    }

    /// Advances by a fixed block length using precomputed `len·s` and
    /// `len(len−1)/2·s`.
    #[inline]
    pub(crate) fn advance_block(&mut self, len: u64, second_len: Angle, second_tri: Angle) {
        self.phase = self.phase + self.diff.scale_u64(len) + second_tri;
        self.diff = self.diff + second_len;
        self.index += len;
    }
}

impl Iterator for PhaseStream {
    type Item = Angle;

    #[inline]
    fn next(&mut self) -> Option<Angle> {
        let out = self.phase;
        self.phase = self.phase + self.diff;
        self.diff = self.diff + self.second;
        self.index += 1;
        Some(out)
    }
}

/// Phases `k²θ + 2kx + y`, k = 0, 1, 2, …
pub fn quad_phase_stream(theta: Angle, x: Angle, y: Angle) -> PhaseStream {
    PhaseStream::new(y, theta + x.scale_u64(2), theta.scale_u64(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactangle::angle_from_rational;
    use num_bigint::BigUint;
    use num_traits::One;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(p: i64, d: i64) -> Angle {
        angle_from_rational(p, d).unwrap()
    }

    #[test]
    fn small_examples() {
        let mut s = quad_phase_stream(q(1, 4), q(1, 8), Angle::ZERO);
        let v: Vec<Angle> = s.by_ref().take(3).collect();
        assert_eq!(v[2], q(1, 2));
        let s = quad_phase_stream(Angle::ZERO, Angle::ZERO, q(3, 10));
        assert!(s.take(50).all(|p| p == q(3, 10)));
    }

    #[test]
    fn second_difference_at_one_million() {
        let theta = crate::exactangle::golden();
        let x = q(2, 7);
        let s = PhaseStream::starting_at(Angle::ZERO, theta + x.scale_u64(2), theta.scale_u64(2), 999_999);
        let v: Vec<Angle> = s.take(3).collect();
        assert_eq!(v[2] - v[1] - v[1] + v[0], theta.scale_u64(2));
    }

    fn random_angle(rng: &mut ChaCha8Rng) -> Angle {
        let limbs: [u64; 4] = rng.gen();
        Angle(crate::exactangle::wide::U256(limbs))
    }

    #[test]
    fn matches_direct_big_integer_evaluation() {
        let modulus = BigUint::one() << 256u32;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (t, x, y) = (random_angle(&mut rng), random_angle(&mut rng), random_angle(&mut rng));
            let k: u64 = rng.gen_range(0..=1_000_000);
            let mut s = quad_phase_stream(t, x, y);
            s.advance(k);
            let kb = BigUint::from(k);
            let direct = (&kb * &kb * t.numerator() + 2u32 * &kb * x.numerator() + y.numerator()) % &modulus;
            assert_eq!(s.next().unwrap().numerator(), direct);
        }
    }

    #[test]
    fn block_advance_matches_stepping() {
        let theta = q(3, 11);
        let mut a = quad_phase_stream(theta, q(1, 5), q(1, 9));
        let mut b = a;
        let len = 32;
        let sl = a.second().scale_u64(len);
        let st = a.second().scale_u64(len * (len - 1) / 2);
        for _ in 0..10 {
            a.advance_block(len, sl, st);
            for _ in 0..len {
                b.next();
            }
            assert_eq!(a, b);
        }
    }
}
