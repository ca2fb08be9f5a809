use crate::error::{Error, Result};
use crate::exactangle::Angle;
use crate::report::{Table, Tabular};
use crate::weylsum::{weyl_sum, QuadTable};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u64,
    pub sup: f64,
    pub sup_over_n: f64,
    pub sup_over_sqrt_n: f64,
    /// `|a(0,n)|/√n`
    pub origin_over_sqrt_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub theta: Angle,
    pub grid: usize,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn max_sup_over_sqrt_n(&self) -> f64 {
        self.rows.iter().map(|r| r.sup_over_sqrt_n).fold(0.0, f64::max)
    }

    pub fn sup_over_n_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_over_n < w[0].sup_over_n)
    }
}

impl Tabular for GrowthReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["n", "sup", "sup_over_n", "sup_over_sqrt_n", "origin_over_sqrt_n"]);
        for r in &self.rows {
            t.push(vec![json!(r.n), json!(r.sup), json!(r.sup_over_n), json!(r.sup_over_sqrt_n), json!(r.origin_over_sqrt_n)]);
        }
        t
    }
}

/// Sup of `|a(x,n)|` over the grid `x = i/G`, and `|a(0,n)|`, along a
/// strictly increasing schedule of `n`.
pub fn growth_report(theta: Angle, schedule: &[u64], grid: usize) -> Result<GrowthReport> {
    if grid == 0 {
        return Err(Error::Domain("x grid must be nonempty".into()));
    }
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("n schedule must be positive and strictly increasing".into()));
    }
    let xs: Vec<Angle> = (0..grid).map(|i| Angle::from_rational(i as u64, grid as u64)).collect::<Result<_>>()?;
    let rows = schedule
        .iter()
        .map(|&n| {
            let sup = QuadTable::new(theta, n).eval_many(&xs).iter().map(|a| a.norm()).fold(0.0, f64::max);
            let nf = n as f64;
            GrowthRow {
                n,
                sup,
                sup_over_n: sup / nf,
                sup_over_sqrt_n: sup / nf.sqrt(),
                origin_over_sqrt_n: weyl_sum(theta, Angle::ZERO, Angle::ZERO, n).norm() / nf.sqrt(),
            }
        })
        .collect();
    Ok(GrowthReport { theta, grid, rows })
}
