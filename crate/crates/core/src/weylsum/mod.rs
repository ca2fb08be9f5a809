//! Weyl sums `a(x,y,n) = ∑_{k<n} e(k²θ+2kx+y)`, Dirichlet sums `b(x,m)`, the
//! half-quadratic modulus ψ, and the skew shift `T_θ(x,y) = (x+θ, y+2x+θ)`.

pub(crate) mod engine;
mod expansion;
mod table;

pub use expansion::OffsetExpansion;
pub use table::QuadTable;

use crate::error::{Error, Result};
use crate::exactangle::{quad_phase_stream, Angle, PhaseStream};
use crate::report::{Table, Tabular};
use crate::rng::{sample_rng, tag, uniform_angle};
use crate::stats::Estimate;
pub(crate) use engine::{RunningSum, Terms};
use engine::sum_stream;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Below this distance to the integers the Dirichlet closed form is replaced
/// by the series.
pub const B_SINGULAR_THRESHOLD: f64 = 1.0 / 1048576.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewPoint {
    pub x: Angle,
    pub y: Angle,
}

impl SkewPoint {
    pub fn new(x: Angle, y: Angle) -> Self {
        SkewPoint { x, y }
    }
}

/// `a(x, y, n)`.
pub fn weyl_sum(theta: Angle, x: Angle, y: Angle, n: u64) -> Complex64 {
    sum_stream(quad_phase_stream(theta, x, y), n)
}

/// `a(x, y, n)` at a skew point.
pub fn cocycle(theta: Angle, p: SkewPoint, n: u64) -> Complex64 {
    weyl_sum(theta, p.x, p.y, n)
}

/// `b(x, m) = ∑_{k<m} e(kx)`, summed directly.
pub fn dirichlet_b(x: Angle, m: u64) -> Complex64 {
    sum_stream(PhaseStream::new(Angle::ZERO, x, Angle::ZERO), m)
}

/// `e((m−1)x/2)·sin(πmx)/sin(πx)` with `x` read in `[0,1)`; `m` at `x = 0`.
pub fn dirichlet_b_ratio(x: Angle, m: u64) -> Complex64 {
    if m == 0 {
        return Complex64::new(0.0, 0.0);
    }
    if x.is_zero() {
        return Complex64::new(m as f64, 0.0);
    }
    let pi = std::f64::consts::PI;
    // m·x = int + frac, so sin(πmx) = (−1)^int · sin(π‖frac‖)
    let (int, frac) = x.floor_mul(m as u128);
    let sign = if int % 2 == 0 { 1.0 } else { -1.0 };
    let num = sign * (pi * frac.dist_to_int()).sin();
    let den = (pi * x.dist_to_int()).sin();
    let (int2, frac2) = x.floor_mul((m - 1) as u128);
    let half_turns = 0.5 * ((int2 % 2) as f64 + frac2.to_f64());
    let (s, c) = (std::f64::consts::TAU * half_turns).sin_cos();
    Complex64::new(c, s) * (num / den)
}

/// Closed-form `b(x, m)`, falling back to the series when `‖x‖ < 2⁻²⁰`.
pub fn dirichlet_b_closed(x: Angle, m: u64) -> Complex64 {
    if x.dist_to_int() < B_SINGULAR_THRESHOLD {
        dirichlet_b(x, m)
    } else {
        dirichlet_b_ratio(x, m)
    }
}

/// `|b(x, m)| = |sin(πmx)/sin(πx)|`.
pub fn dirichlet_b_abs(x: Angle, m: u64) -> f64 {
    dirichlet_b_closed(x, m).norm()
}

/// Phases `j²θ/2 + jx`, θ read in `[0,1)`.
pub fn psi_stream(theta: Angle, x: Angle) -> PhaseStream {
    PhaseStream::new(Angle::ZERO, theta.halve() + x, theta)
}

/// `ψ(θ,x,k) = |∑_{j<k} e(j²θ/2 + jx)|`.
pub fn psi(theta: Angle, x: Angle, k: u64) -> f64 {
    sum_stream(psi_stream(theta, x), k).norm()
}

/// Phases `k²θ + kx` of the half-angle sums, which equal `a(x/2, 0, n)`
/// without having to halve `x`.
pub fn half_angle_stream(theta: Angle, x: Angle) -> PhaseStream {
    PhaseStream::new(Angle::ZERO, theta + x, theta.scale_u64(2))
}

/// Terms `e(k²θ + kx)`, `k = 0, 1, …`.
pub(crate) fn half_angle_terms(theta: Angle, x: Angle) -> Terms {
    Terms::new(half_angle_stream(theta, x))
}

/// `T_θⁿ(x,y) = (x+nθ, y+2nx+n²θ)`, exact; negative `n` inverts.
pub fn skew_shift_n(theta: Angle, p: SkewPoint, n: i64) -> SkewPoint {
    let n2 = (n as i128 * n as i128) as u128;
    SkewPoint {
        x: p.x + theta.scale_mod1(n as i128),
        y: p.y + p.x.scale_mod1(2 * n as i128) + theta.scale_u128(n2),
    }
}

pub fn skew_shift(theta: Angle, p: SkewPoint) -> SkewPoint {
    SkewPoint {
        x: p.x + theta,
        y: p.y + p.x.scale_u64(2) + theta,
    }
}

/// Uniform sample points for `(seed, tag)`, indices `0..n`.
pub(crate) fn sample_angles(seed: u64, stream_tag: u64, n: u64) -> Vec<Angle> {
    (0..n).map(|i| uniform_angle(&mut sample_rng(seed, stream_tag, i))).collect()
}

/// Monte Carlo mean of `|a(x,q)|²` over uniform `x`, with standard error.
pub fn parseval_estimate(theta: Angle, q: u64, samples: u64, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::Domain("samples must be >= 1".into()));
    }
    let xs = sample_angles(seed, tag::PARSEVAL, samples);
    let table = QuadTable::new(theta, q);
    let values: Vec<f64> = table.eval_many(&xs).iter().map(|a| a.norm_sqr()).collect();
    Ok(Estimate::from_values(&values))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub theta: Angle,
    pub start: SkewPoint,
    pub length: u64,
    pub stride: u64,
    /// `(n, z_n)` for `n = 0, stride, 2·stride, …, ≤ length`.
    pub points: Vec<(u64, Complex64)>,
}

impl Trajectory {
    /// `max |z_n|/√n` over recorded `n` in `[from, to]`.
    pub fn max_normalized(&self, from: u64, to: u64) -> f64 {
        self.points
            .iter()
            .filter(|(n, _)| *n >= from.max(1) && *n <= to)
            .map(|(n, z)| z.norm() / (*n as f64).sqrt())
            .fold(0.0, f64::max)
    }
}

impl Tabular for Trajectory {
    fn table(&self) -> Table {
        let mut t = Table::new(&["n", "re", "im"]);
        for (n, z) in &self.points {
            t.push(vec![json!(n), json!(z.re), json!(z.im)]);
        }
        t
    }
}

/// Partial sums `z_n = a(x,y,n)`, recording every `stride`-th.
pub fn trajectory(theta: Angle, x: Angle, y: Angle, n: u64, stride: u64) -> Result<Trajectory> {
    if stride == 0 {
        return Err(Error::Domain("stride must be >= 1".into()));
    }
    let mut points = vec![(0, Complex64::new(0.0, 0.0))];
    let mut acc = RunningSum::default();
    for (i, term) in Terms::new(quad_phase_stream(theta, x, y)).take(n as usize).enumerate() {
        acc.add(term);
        let k = i as u64 + 1;
        if k.is_multiple_of(stride) {
            points.push((k, acc.value()));
        }
    }
    Ok(Trajectory {
        theta,
        start: SkewPoint { x, y },
        length: n,
        stride,
        points,
    })
}
