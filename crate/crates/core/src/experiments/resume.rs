//! Seeded search for a point `x` and multiplier `m` at one scheduled level,
//! with the three closeness checks evaluated at `M = m·q`.

use super::approx::{best_m, MnChoice};
use super::schedule::{m_range, select_qn};
use crate::contfrac::ContinuedFraction;
use crate::error::{Error, Result};
use crate::exactangle::Angle;
use crate::rng::{sample_rng, tag, uniform_angle};
use crate::weylsum::{weyl_sum, OffsetExpansion, QuadTable};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResumeConfig {
    pub eps: f64,
    pub delta: f64,
    pub u_min: f64,
    /// witness threshold passed to `select_qn`
    pub threshold: f64,
    pub target: f64,
    /// accepted `|product − target|`
    pub tolerance: f64,
    /// accepted `eps_n`
    pub eps_n_max: f64,
    pub grid_points: usize,
    pub x_candidates: u64,
    /// candidates allowed to reach the grid evaluation, per level
    pub max_full_checks: usize,
    /// levels with `q·m_max` above this are skipped
    pub max_terms: u64,
    /// restrict the search to this continued-fraction level
    pub level: Option<usize>,
    pub seed: u64,
}

impl Default for ResumeConfig {
    fn default() -> Self {
        ResumeConfig {
            eps: 0.5,
            delta: 0.2,
            u_min: 5.0,
            threshold: 0.5,
            target: 0.5,
            tolerance: 0.05,
            eps_n_max: 0.1,
            grid_points: 33,
            x_candidates: 4096,
            max_full_checks: 8,
            max_terms: 1 << 28,
            level: None,
            seed: 7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

impl Check {
    fn at_most(value: f64, bound: f64) -> Check {
        Check {
            value,
            bound,
            ok: value <= bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelAttempt {
    pub level: usize,
    pub q: String,
    pub scanned: u64,
    pub in_band: u64,
    pub product_hits: u64,
    pub full_checks: usize,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResumeWitness {
    pub level: usize,
    pub q: u64,
    pub x: Angle,
    pub candidate: u64,
    pub delta: f64,
    /// `‖2qx‖`
    pub dist: f64,
    pub a_modulus: f64,
    pub m: u64,
    pub big_m: u64,
    pub product_value: f64,
    pub eps_n: f64,
    /// `q^{−(5/2+ε/2)}`
    pub radius: f64,
    /// `|a(x̃,M)| − target` across the grid
    pub grid_deviation: Vec<f64>,
    /// `‖Mθ‖ ≤ q^{−(5/2+3ε/4)}`
    pub check_i: Check,
    /// `eps_n ≤ eps_n_max`
    pub check_ii: Check,
    /// `‖M²θ + 2Mx‖ ≤ eps_n`
    pub check_iii: Check,
    pub attempts: Vec<LevelAttempt>,
}

impl ResumeWitness {
    pub fn valid(&self) -> bool {
        self.check_i.ok && self.check_ii.ok && self.check_iii.ok
    }
}

/// `‖M²θ + 2Mx‖`
pub fn phase_check(theta: Angle, x: Angle, big_m: u64) -> f64 {
    let m = big_m as u128;
    theta.scale_u128(m * m).wrap_add(x.scale_u128(2 * m)).dist_to_int()
}

/// `|a(x + s_j, M)|` on `points` equally spaced offsets `s_j ∈ [−r, r]`.
pub fn grid_modulus(theta: Angle, x: Angle, big_m: u64, radius: f64, points: usize) -> Vec<f64> {
    let offsets: Vec<f64> = (0..points)
        .map(|j| {
            if points == 1 {
                0.0
            } else {
                radius * (2.0 * j as f64 / (points - 1) as f64 - 1.0)
            }
        })
        .collect();
    match OffsetExpansion::new(theta, x, big_m, radius) {
        Some(e) => offsets.iter().map(|&s| e.eval(s).norm()).collect(),
        None => offsets
            .par_iter()
            .map(|&s| weyl_sum(theta, x + Angle::from_f64(s), Angle::ZERO, big_m).norm())
            .collect(),
    }
}

/// Search one level with denominator `q`.
pub fn resume_at_level(theta: Angle, level: usize, q: u64, cfg: &ResumeConfig) -> std::result::Result<ResumeWitness, LevelAttempt> {
    let qf = q as f64;
    let mut attempt = LevelAttempt {
        level,
        q: q.to_string(),
        scanned: 0,
        in_band: 0,
        product_hits: 0,
        full_checks: 0,
        outcome: String::new(),
    };
    let m_max = m_range(q, cfg.eps);
    let m_cap = qf.powf(0.5 + cfg.eps / 4.0);
    if q.saturating_mul(m_max) > cfg.max_terms {
        attempt.outcome = format!("level unusable: q·m_max = {} terms exceeds budget", q as u128 * m_max as u128);
        return Err(attempt);
    }
    let a_cap = qf.powf(0.5 + cfg.eps / 10.0);
    let bound_i = qf.powf(-(2.5 + 0.75 * cfg.eps));
    let radius = qf.powf(-(2.5 + cfg.eps / 2.0));
    let table = QuadTable::new(theta, q);
    const BATCH: u64 = 256;
    let mut start = 0;
    while start < cfg.x_candidates {
        let end = (start + BATCH).min(cfg.x_candidates);
        let band: Vec<(u64, Angle)> = (start..end)
            .map(|i| (i, uniform_angle(&mut sample_rng(cfg.seed, tag::CANDIDATES, i))))
            .filter(|(_, x)| {
                let d = x.scale_u64(2 * q).dist_to_int();
                d >= cfg.delta / 2.0 && d <= cfg.delta
            })
            .collect();
        attempt.scanned = end;
        attempt.in_band += band.len() as u64;
        let xs: Vec<Angle> = band.iter().map(|(_, x)| *x).collect();
        let moduli = table.eval_many(&xs);
        for ((i, x), a) in band.into_iter().zip(moduli) {
            let a = a.norm();
            if a < cfg.u_min || a > a_cap {
                continue;
            }
            let t = x.scale_u64(2 * q);
            let MnChoice { m, product, deviation, .. } = best_m(a, t, m_max, cfg.target);
            if deviation > cfg.tolerance || m == 0 || m as f64 > m_cap {
                continue;
            }
            attempt.product_hits += 1;
            let big_m = m * q;
            let check_i = Check::at_most(theta.scale_u64(big_m).dist_to_int(), bound_i);
            let iii = phase_check(theta, x, big_m);
            if !check_i.ok || iii > cfg.eps_n_max {
                continue;
            }
            attempt.full_checks += 1;
            let grid_deviation: Vec<f64> = grid_modulus(theta, x, big_m, radius, cfg.grid_points)
                .into_iter()
                .map(|v| v - cfg.target)
                .collect();
            let eps_n = grid_deviation.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
            let check_ii = Check::at_most(eps_n, cfg.eps_n_max);
            let check_iii = Check::at_most(iii, eps_n);
            if check_ii.ok && check_iii.ok {
                attempt.outcome = "witness".into();
                return Ok(ResumeWitness {
                    level,
                    q,
                    x,
                    candidate: i,
                    delta: cfg.delta,
                    dist: t.dist_to_int(),
                    a_modulus: a,
                    m,
                    big_m,
                    product_value: product,
                    eps_n,
                    radius,
                    grid_deviation,
                    check_i,
                    check_ii,
                    check_iii,
                    attempts: vec![attempt],
                });
            }
            if attempt.full_checks >= cfg.max_full_checks {
                attempt.outcome = "level unusable: grid checks failed".into();
                return Err(attempt);
            }
        }
        start = end;
    }
    attempt.outcome = "level unusable: no candidate passed".into();
    Err(attempt)
}

/// Try scheduled levels deepest first; the first level yielding a full
/// witness wins.
pub fn resume_witness(theta: Angle, cf: &ContinuedFraction, cfg: &ResumeConfig) -> Result<ResumeWitness> {
    if cfg.x_candidates == 0 {
        return Err(Error::Domain("x_candidates must be at least 1".into()));
    }
    if cfg.grid_points == 0 {
        return Err(Error::Domain("grid_points must be at least 1".into()));
    }
    let schedule = select_qn(cf, theta, cfg.eps, cfg.threshold)?;
    let mut attempts = Vec::new();
    for lvl in schedule.levels.iter().rev() {
        if cfg.level.is_some_and(|l| l != lvl.level) {
            continue;
        }
        let Some(q) = lvl.q_u64().filter(|&q| q < (1 << 40)) else {
            attempts.push(LevelAttempt {
                level: lvl.level,
                q: lvl.q.to_string(),
                scanned: 0,
                in_band: 0,
                product_hits: 0,
                full_checks: 0,
                outcome: "level unusable: q too large".into(),
            });
            continue;
        };
        match resume_at_level(theta, lvl.level, q, cfg) {
            Ok(mut w) => {
                attempts.append(&mut w.attempts);
                w.attempts = attempts;
                return Ok(w);
            }
            Err(a) => attempts.push(a),
        }
    }
    let summary: Vec<String> = attempts.iter().map(|a| format!("level {} (q={}): {}", a.level, a.q, a.outcome)).collect();
    Err(Error::Unusable(if summary.is_empty() {
        "no scheduled level matches the requested level".into()
    } else {
        summary.join("; ")
    }))
}
