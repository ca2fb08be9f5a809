//! Recorded maxima of the empirical constants, from seeded sweeps that use
//! seeds disjoint from the ones the tests run with.

use crate::error::{Error, Result};
use crate::exactangle::{golden, Angle};
use crate::experiments::{approx_ratio, growth_report};
use crate::renorm::{fe_residual, u_measure_lower};
use crate::report::to_json;
use crate::rng::{log_uniform_int, sample_rng, tag, uniform, uniform_angle};
use crate::weylsum::{dirichlet_b_abs, psi};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Multiplier applied to recorded maxima before asserting against them.
pub const SLACK: f64 = 1.5;

pub mod key {
    pub const FE_RESIDUAL: &str = "fe_residual theta~U(0.05,0.95) x~U k~logU[10,1e5]";
    pub const APPROX_RATIO: &str = "approx_ratio theta~U x~U l~logU[1,1e3] m~U[1,30]";
    pub const GROWTH: &str = "growth_sup_over_sqrt_n theta=golden grid=4096 n=1e2,1e3,1e4,1e5";
    pub const PSI_B: &str = "psi_b_link theta~U(1e-9,1e-5) x~U k~U[1,300]";
    /// a measured lower-bound constant rather than a residual maximum
    pub const U_MEASURE: &str = "u_measure theta=golden m=1 eta=0.1";
    pub const ALL: [&str; 5] = [FE_RESIDUAL, APPROX_RATIO, GROWTH, PSI_B, U_MEASURE];
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub max_residual: f64,
    pub samples: u64,
    pub seed: u64,
}

pub type CalibrationFile = BTreeMap<String, CalibrationEntry>;

const COMMITTED: &str = include_str!("../calibration.json");

pub fn committed() -> &'static CalibrationFile {
    static FILE: OnceLock<CalibrationFile> = OnceLock::new();
    FILE.get_or_init(|| serde_json::from_str(COMMITTED).unwrap_or_default())
}

pub fn get(descriptor: &str) -> Result<CalibrationEntry> {
    committed()
        .get(descriptor)
        .copied()
        .ok_or_else(|| Error::Calibration(format!("no calibration entry for {descriptor:?}; run `weyl-lab calibrate`")))
}

/// Recorded value times [`SLACK`].
pub fn limit(descriptor: &str) -> Result<f64> {
    Ok(get(descriptor)?.max_residual * SLACK)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeSample {
    pub theta: f64,
    pub k: u64,
    pub residual: f64,
}

pub fn fe_sweep(samples: u64, seed: u64) -> Result<Vec<FeSample>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = sample_rng(seed, tag::FE_SWEEP, i);
            let theta = Angle::from_f64(uniform(&mut r, 0.05, 0.95));
            let x = uniform_angle(&mut r);
            let k = log_uniform_int(&mut r, 10, 100_000);
            Ok(FeSample {
                theta: theta.to_f64(),
                k,
                residual: fe_residual(theta, x, k)?,
            })
        })
        .collect()
}

/// Ratios of the sweep, skipping flagged zero-denominator instances.
pub fn approx_sweep(samples: u64, seed: u64) -> Vec<f64> {
    (0..samples)
        .into_par_iter()
        .filter_map(|i| {
            let mut r = sample_rng(seed, tag::APPROX, i);
            let theta = uniform_angle(&mut r);
            let x = uniform_angle(&mut r);
            let l = log_uniform_int(&mut r, 1, 1000);
            let m = r.gen_range(1..=30u64);
            approx_ratio(theta, l, m, x).ok()
        })
        .collect()
}

pub fn psi_b_sweep(samples: u64, seed: u64) -> Vec<f64> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = sample_rng(seed, tag::FE_SWEEP + 100, i);
            let theta = Angle::from_f64(uniform(&mut r, 1e-9, 1e-5));
            let x = uniform_angle(&mut r);
            let k = r.gen_range(1..=300u64);
            let gap = (psi(theta, x, k) - dirichlet_b_abs(x, k)).abs();
            gap / ((k as f64).powi(3) * theta.dist_to_int())
        })
        .collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// Default (samples, seed) for each descriptor.
pub fn default_plan(descriptor: &str) -> Option<(u64, u64)> {
    Some(match descriptor {
        key::FE_RESIDUAL => (4000, 900_001),
        key::APPROX_RATIO => (10_000, 900_002),
        key::GROWTH => (1, 0),
        key::PSI_B => (2000, 900_004),
        key::U_MEASURE => (100_000, 900_005),
        _ => return None,
    })
}

pub fn run(descriptor: &str, samples: u64, seed: u64) -> Result<CalibrationEntry> {
    let value = match descriptor {
        key::FE_RESIDUAL => max_of(fe_sweep(samples, seed)?.into_iter().map(|s| s.residual)),
        key::APPROX_RATIO => max_of(approx_sweep(samples, seed)),
        key::GROWTH => growth_report(golden(), &[100, 1000, 10_000, 100_000], 4096)?.max_sup_over_sqrt_n(),
        key::PSI_B => max_of(psi_b_sweep(samples, seed)),
        key::U_MEASURE => u_measure_lower(golden(), 1, 0.1, samples, seed)?.mean,
        other => return Err(Error::Calibration(format!("unknown sweep {other:?}"))),
    };
    Ok(CalibrationEntry {
        max_residual: value,
        samples,
        seed,
    })
}

pub fn calibrate_all() -> Result<CalibrationFile> {
    key::ALL
        .iter()
        .map(|k| {
            let (samples, seed) = default_plan(k).expect("plan for every key");
            Ok((k.to_string(), run(k, samples, seed)?))
        })
        .collect()
}

/// Canonical text of a calibration file.
pub fn to_text(file: &CalibrationFile) -> Result<String> {
    to_json(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn committed_file_has_every_key() {
        for k in key::ALL {
            let e = get(k).unwrap();
            assert!(e.max_residual.is_finite() && e.max_residual > 0.0, "{k}");
            assert_eq!(default_plan(k).unwrap(), (e.samples, e.seed));
        }
        assert!(get("nope").is_err());
    }

    #[test]
    fn psi_b_constant_well_below_fifty() {
        assert!(get(key::PSI_B).unwrap().max_residual <= 50.0);
    }
}
