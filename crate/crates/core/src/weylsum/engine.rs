//! Blocked summation kernel for `∑ e(φ_k)` over an exact phase stream.
//!
//! Each block of [`BLOCK`] terms restarts from exact phases and then runs
//! the recurrence `z ← z·w, w ← w·e(s)`, so rounding never accumulates over
//! more than one block. Block sums go through a pairwise accumulator.

use crate::exactangle::{Angle, PhaseStream};
use num_complex::Complex64;
use std::ops::Add;

pub(crate) const BLOCK: u64 = 16;

/// Binary-counter pairwise summation; the association order depends only on
/// the number of pushed values.
pub(crate) struct Pairwise<T> {
    stack: Vec<(T, u32)>,
}

impl<T: Add<Output = T> + Clone> Pairwise<T> {
    pub(crate) fn new() -> Self {
        Pairwise { stack: Vec::new() }
    }

    pub(crate) fn push(&mut self, v: T) {
        let mut v = v;
        let mut level = 0;
        while let Some((_, l)) = self.stack.last() {
            if *l != level {
                break;
            }
            let (top, _) = self.stack.pop().unwrap();
            v = top + v;
            level += 1;
        }
        self.stack.push((v, level));
    }

    pub(crate) fn total(self, zero: T) -> T {
        self.stack.into_iter().rev().fold(zero, |acc, (v, _)| v + acc)
    }
}

struct BlockSteps {
    step: Complex64,
    second_len: Angle,
    second_tri: Angle,
}

impl BlockSteps {
    fn new(s: &PhaseStream) -> Self {
        BlockSteps {
            step: s.second().expi(),
            second_len: s.second().scale_u64(BLOCK),
            second_tri: s.second().scale_u64(BLOCK * (BLOCK - 1) / 2),
        }
    }
}

/// `∑_{i<n} e(φ_i)` for the next `n` phases of `s`.
pub(crate) fn sum_stream(mut s: PhaseStream, n: u64) -> Complex64 {
    let steps = BlockSteps::new(&s);
    let mut acc = Pairwise::new();
    let mut left = n;
    while left > 0 {
        let len = left.min(BLOCK);
        let mut z = s.phase().expi();
        let mut w = s.diff().expi();
        let mut block = Complex64::new(0.0, 0.0);
        for _ in 0..len {
            block += z;
            z *= w;
            w *= steps.step;
        }
        acc.push(block);
        s.advance_block(BLOCK, steps.second_len, steps.second_tri);
        left -= len;
    }
    acc.total(Complex64::new(0.0, 0.0))
}

#[derive(Clone)]
pub(crate) struct Moments(pub(crate) Vec<Complex64>);

impl Add for Moments {
    type Output = Moments;
    fn add(mut self, rhs: Moments) -> Moments {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

/// Weighted sums `S_j = ∑_{i<n} (i/n)^j e(φ_i)` for `j ≤ order`, with `i`
/// counted from the current stream position.
pub(crate) fn moments_stream(mut s: PhaseStream, n: u64, order: usize) -> Vec<Complex64> {
    let steps = BlockSteps::new(&s);
    let zero = Moments(vec![Complex64::new(0.0, 0.0); order + 1]);
    let mut acc = Pairwise::new();
    let inv = if n > 0 { 1.0 / n as f64 } else { 0.0 };
    let mut i0 = 0u64;
    while i0 < n {
        let len = (n - i0).min(BLOCK);
        let mut z = s.phase().expi();
        let mut w = s.diff().expi();
        let mut block = zero.clone();
        for i in 0..len {
            let t = (i0 + i) as f64 * inv;
            let mut p = z;
            for m in block.0.iter_mut() {
                *m += p;
                p *= t;
            }
            z *= w;
            w *= steps.step;
        }
        acc.push(block);
        s.advance_block(BLOCK, steps.second_len, steps.second_tri);
        i0 += len;
    }
    acc.total(zero).0
}

/// Successive terms `e(φ_k)`, unbounded.
pub(crate) struct Terms {
    stream: PhaseStream,
    steps: BlockSteps,
    z: Complex64,
    w: Complex64,
    left: u64,
}

impl Terms {
    pub(crate) fn new(stream: PhaseStream) -> Self {
        let steps = BlockSteps::new(&stream);
        Terms {
            z: stream.phase().expi(),
            w: stream.diff().expi(),
            stream,
            steps,
            left: BLOCK,
        }
    }
}

impl Iterator for Terms {
    type Item = Complex64;

    #[inline]
    fn next(&mut self) -> Option<Complex64> {
        if self.left == 0 {
            self.stream.advance_block(BLOCK, self.steps.second_len, self.steps.second_tri);
            self.z = self.stream.phase().expi();
            self.w = self.stream.diff().expi();
            self.left = BLOCK;
        }
        let out = self.z;
        self.z *= self.w;
        self.w *= self.steps.step;
        self.left -= 1;
        Some(out)
    }
}

/// Compensated running sum (Neumaier), for partial-sum sequences.
#[derive(Clone, Copy, Default)]
pub(crate) struct RunningSum {
    sum: Complex64,
    comp: Complex64,
}

impl RunningSum {
    #[inline]
    fn add1(s: f64, c: f64, v: f64) -> (f64, f64) {
        let t = s + v;
        let c = if s.abs() >= v.abs() { c + ((s - t) + v) } else { c + ((v - t) + s) };
        (t, c)
    }

    #[inline]
    pub(crate) fn add(&mut self, v: Complex64) {
        let (re, cre) = Self::add1(self.sum.re, self.comp.re, v.re);
        let (im, cim) = Self::add1(self.sum.im, self.comp.im, v.im);
        self.sum = Complex64::new(re, im);
        self.comp = Complex64::new(cre, cim);
    }

    #[inline]
    pub(crate) fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactangle::{angle_from_rational, golden, quad_phase_stream};

    fn naive(s: PhaseStream, n: usize) -> Complex64 {
        s.take(n).map(|p| p.expi()).sum()
    }

    #[test]
    fn blocked_matches_termwise() {
        let s = quad_phase_stream(golden(), angle_from_rational(1, 7).unwrap(), angle_from_rational(1, 5).unwrap());
        for n in [0usize, 1, 15, 16, 17, 100, 5000] {
            let d = sum_stream(s, n as u64) - naive(s, n);
            assert!(d.norm() < 1e-11, "n={n}: {d}");
            let t: Complex64 = Terms::new(s).take(n).sum();
            assert!((t - naive(s, n)).norm() < 1e-11);
        }
    }

    #[test]
    fn moments_zeroth_is_sum() {
        let s = quad_phase_stream(golden(), angle_from_rational(2, 9).unwrap(), Angle::ZERO);
        let m = moments_stream(s, 1000, 3);
        assert!((m[0] - sum_stream(s, 1000)).norm() < 1e-12);
        let first: Complex64 = s.take(1000).enumerate().map(|(i, p)| p.expi() * (i as f64 / 1000.0)).sum();
        assert!((m[1] - first).norm() < 1e-11);
    }

    #[test]
    fn pairwise_order() {
        let mut p = Pairwise::new();
        for v in 1..=7 {
            p.push(v as f64);
        }
        assert_eq!(p.total(0.0), 28.0);
    }
}
