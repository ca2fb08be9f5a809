use crate::contfrac::{f_witness, ContinuedFraction};
use crate::error::{Error, Result};
use crate::exactangle::Angle;
use crate::rng::tag;
use crate::stats::Estimate;
use crate::weylsum::{dirichlet_b_abs, sample_angles, QuadTable};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduledLevel {
    pub level: usize,
    #[serde(with = "crate::report::decimal")]
    pub q: BigUint,
    /// `q^{3+ε}‖qθ‖`
    pub witness: f64,
}

impl ScheduledLevel {
    pub fn q_u64(&self) -> Option<u64> {
        self.q.to_u64()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QnSchedule {
    pub theta: Angle,
    pub eps: f64,
    pub threshold: f64,
    pub levels: Vec<ScheduledLevel>,
}

/// Convergent denominators `q > 1` whose witness is below `threshold` and
/// below every witness retained before it.
pub fn select_qn(cf: &ContinuedFraction, theta: Angle, eps: f64, threshold: f64) -> Result<QnSchedule> {
    let cert = f_witness(cf, eps, theta)?;
    let mut levels: Vec<ScheduledLevel> = Vec::new();
    for w in &cert.witnesses {
        if w.q.is_one() || w.value >= threshold {
            continue;
        }
        if levels.last().is_some_and(|l| w.value >= l.witness) {
            continue;
        }
        levels.push(ScheduledLevel {
            level: w.level,
            q: w.q.clone(),
            witness: w.value,
        });
    }
    if levels.is_empty() {
        return Err(Error::EmptySchedule(format!(
            "theta not F-like at this depth: no witness q^{{3+ε}}‖qθ‖ < {threshold} among {} levels",
            cert.witnesses.len()
        )));
    }
    Ok(QnSchedule {
        theta,
        eps,
        threshold,
        levels,
    })
}

/// `(estimate of λ{|a(x,q)| ≥ q^{exponent}}, threshold)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub q: u64,
    pub threshold: f64,
    pub estimate: Estimate,
    /// `q^{−ε/5}`
    pub bound: f64,
}

/// Tail measure at an arbitrary threshold exponent.
pub fn tail_measure_at(theta: Angle, q: u64, exponent: f64, eps: f64, samples: u64, seed: u64) -> Result<TailEstimate> {
    if samples < 1000 {
        return Err(Error::Domain("tail measure needs at least 1000 samples".into()));
    }
    let threshold = (q as f64).powf(exponent);
    let xs = sample_angles(seed, tag::TAIL, samples);
    let hits = QuadTable::new(theta, q).eval_many(&xs).iter().filter(|a| a.norm() >= threshold).count() as u64;
    Ok(TailEstimate {
        q,
        threshold,
        estimate: Estimate::proportion(hits, samples),
        bound: (q as f64).powf(-eps / 5.0),
    })
}

/// `λ{x : |a(x,q)| ≥ q^{1/2+ε/10}}` against the Chebyshev bound `q^{−ε/5}`.
pub fn tail_measure(theta: Angle, q: u64, eps: f64, samples: u64, seed: u64) -> Result<TailEstimate> {
    tail_measure_at(theta, q, 0.5 + eps / 10.0, eps, samples, seed)
}

/// `⌈q^{1/2+ε/4}⌉`
pub fn m_range(q: u64, eps: f64) -> u64 {
    (q as f64).powf(0.5 + eps / 4.0).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub q: u64,
    pub m_max: u64,
    /// `‖2qx‖`
    pub dist: f64,
    pub gap: f64,
    /// `1/(q^{1/2+ε/8}‖2qx‖)`
    pub target: f64,
    /// `‖2qx‖ = 1/2` (to 1e-12): |b| only takes values near 0 and 1.
    pub degenerate: bool,
}

impl GapReport {
    pub fn meets_target(&self) -> bool {
        self.gap <= self.target
    }
}

/// Largest gap in the sorted values `min(|b(2qx,m)|, 1)`, `0 ≤ m ≤ ⌈q^{1/2+ε/4}⌉`.
pub fn b_density_gap(_theta: Angle, q: u64, x: Angle, eps: f64) -> Result<GapReport> {
    let t = x.scale_u64(2 * q);
    let dist = t.dist_to_int();
    if dist == 0.0 {
        return Err(Error::Domain("‖2qx‖ must be positive".into()));
    }
    let m_max = m_range(q, eps);
    let mut values: Vec<f64> = (0..=m_max).map(|m| dirichlet_b_abs(t, m).min(1.0)).collect();
    values.sort_by(f64::total_cmp);
    let gap = values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(GapReport {
        q,
        m_max,
        dist,
        gap,
        target: 1.0 / ((q as f64).powf(0.5 + eps / 8.0) * dist),
        degenerate: 0.5 - dist < 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{angle_from_cf, cf_expand, construct_f_member};
    use crate::exactangle::{angle_from_rational, golden};
    use crate::rng::{sample_rng, uniform_angle};
    use crate::weylsum::dirichlet_b;

    fn constructed() -> (ContinuedFraction, Angle) {
        let (cf, _) = construct_f_member(0.5, 4, &[2]).unwrap();
        let theta = angle_from_cf(&cf);
        (cf, theta)
    }

    #[test]
    fn schedule_examples() {
        let (cf, theta) = constructed();
        let s = select_qn(&cf, theta, 0.5, 0.5).unwrap();
        let qs: Vec<u64> = s.levels.iter().map(|l| l.q_u64().unwrap()).collect();
        assert_eq!(qs, vec![17, 83523]);
        assert!((s.levels[0].witness - 0.2425).abs() < 1e-3);
        assert!(s.levels[1].witness < 0.01);

        let g = golden();
        let gcf = cf_expand(g, 30).unwrap();
        assert!(matches!(select_qn(&gcf, g, 0.5, 0.5), Err(Error::EmptySchedule(_))));

        let third = angle_from_rational(1, 3).unwrap();
        let tcf = cf_expand(third, 10).unwrap();
        assert!(select_qn(&tcf, third, 0.5, 0.5).is_err());
    }

    #[test]
    fn tail_examples() {
        let t = tail_measure_at(golden(), 1, 0.55, 0.5, 1000, 1).unwrap();
        assert_eq!(t.estimate.mean, 1.0);
        let (_, theta) = constructed();
        let t = tail_measure(theta, 17, 0.5, 100_000, 2).unwrap();
        assert!(t.estimate.mean <= t.bound + 5.0 * t.estimate.std_err, "{t:?}");
        let mut prev = 1.0;
        for e in [0.3, 0.4, 0.5, 0.55, 0.6, 0.7] {
            let v = tail_measure_at(theta, 17, e, 0.5, 5000, 3).unwrap().estimate.mean;
            assert!(v <= prev);
            prev = v;
        }
        assert!(tail_measure(theta, 17, 0.5, 999, 1).is_err());
    }

    #[test]
    fn gap_examples() {
        let g = golden();
        let r = b_density_gap(g, 1, angle_from_rational(1, 8).unwrap(), 0.5).unwrap();
        assert_eq!(r.m_max, 1);
        assert_eq!(r.gap, 1.0);
        // 2qx = 1/2: |b| alternates 1, 0
        let r = b_density_gap(g, 5, angle_from_rational(1, 20).unwrap(), 0.5).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.gap, 1.0);
        assert!(b_density_gap(g, 4, Angle::ZERO, 0.5).is_err());
    }

    /// Brute-force check of the gap at the deep level against the series
    /// for `b`; the success rate over 100 seeded draws was fixed by running
    /// this oracle once.
    #[test]
    fn gap_success_rate_at_deep_level() {
        let (_, theta) = constructed();
        let q = 83523u64;
        let mut hits = 0;
        let mut draws = 0;
        let mut i = 0;
        while draws < 100 {
            let x = uniform_angle(&mut sample_rng(41, tag::GAP, i));
            i += 1;
            let d = x.scale_u64(2 * q).dist_to_int();
            if !(0.1..=0.2).contains(&d) {
                continue;
            }
            draws += 1;
            let r = b_density_gap(theta, q, x, 0.5).unwrap();
            let t = x.scale_u64(2 * q);
            let mut vals: Vec<f64> = (0..=r.m_max).map(|m| dirichlet_b(t, m).norm().min(1.0)).collect();
            vals.sort_by(f64::total_cmp);
            let gap = vals.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            assert!((gap - r.gap).abs() < 1e-9);
            if r.meets_target() {
                hits += 1;
            }
        }
        assert_eq!(hits, GAP_ORACLE_HITS, "success rate {hits}/100");
    }

    const GAP_ORACLE_HITS: usize = 80;
}
