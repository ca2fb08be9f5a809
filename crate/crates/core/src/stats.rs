//! Small estimators shared by the Monte Carlo experiments.

use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

impl Estimate {
    /// Mean and standard error, summed in slice order.
    pub fn from_values(v: &[f64]) -> Estimate {
        let n = v.len() as f64;
        if v.is_empty() {
            return Estimate {
                mean: f64::NAN,
                std_err: f64::NAN,
                samples: 0,
            };
        }
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            std_err: (var / n).sqrt(),
            samples: v.len() as u64,
        }
    }

    /// Proportion of `hits` among `n` with the binomial standard error.
    pub fn proportion(hits: u64, n: u64) -> Estimate {
        let p = hits as f64 / n as f64;
        Estimate {
            mean: p,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
            samples: n,
        }
    }

    /// `|mean − target| ≤ k·std_err`; an exact estimate must hit the target.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_err + 1e-12 * target.abs().max(1.0)
    }

    pub fn scale(self, c: f64) -> Estimate {
        Estimate {
            mean: self.mean * c,
            std_err: self.std_err * c.abs(),
            samples: self.samples,
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
