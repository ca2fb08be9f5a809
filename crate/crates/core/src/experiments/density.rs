//! Coverage of a disk by the partial sums `∑_{k<n} e(k²θ + kx)`.

use crate::error::{Error, Result};
use crate::exactangle::Angle;
use crate::report::{Table, Tabular};
use crate::weylsum::{half_angle_terms, RunningSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellHit {
    pub i: i64,
    pub j: i64,
    /// first `n` with the partial sum of `n` terms in the cell
    pub first_hit: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub theta: Angle,
    pub x: Angle,
    pub terms: u64,
    pub radius: f64,
    pub cell: f64,
    pub cells: usize,
    pub covered: usize,
    pub covered_fraction: f64,
    /// cells `[ih, (i+1)h) × [jh, (j+1)h)` whose center lies in the disk
    pub hits: Vec<CellHit>,
}

impl Tabular for DensityReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["i", "j", "center_re", "center_im", "first_hit"]);
        for c in &self.hits {
            t.push(vec![
                json!(c.i),
                json!(c.j),
                json!((c.i as f64 + 0.5) * self.cell),
                json!((c.j as f64 + 0.5) * self.cell),
                json!(c.first_hit),
            ]);
        }
        t
    }
}

/// Marks disk cells visited by the partial sums `z_0 = 0, z_1, …, z_N`.
pub fn density_probe(theta: Angle, x: Angle, terms: u64, radius: f64, cell: f64) -> Result<DensityReport> {
    if !(radius > 0.0 && cell > 0.0) || !radius.is_finite() {
        return Err(Error::Domain("density probe needs R > 0 and h > 0".into()));
    }
    let span = (radius / cell).ceil() as i64;
    let side = (2 * span) as usize;
    if side.checked_mul(side).is_none_or(|c| c > 1 << 26) {
        return Err(Error::Domain("too many cells".into()));
    }
    let mut slot = vec![usize::MAX; side * side];
    let mut hits = Vec::new();
    for j in -span..span {
        for i in -span..span {
            let c = Complex64::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
            if c.norm() <= radius {
                slot[((j + span) as usize) * side + (i + span) as usize] = hits.len();
                hits.push(CellHit { i, j, first_hit: None });
            }
        }
    }
    let mut covered = 0;
    let mut mark = |z: Complex64, n: u64, hits: &mut Vec<CellHit>| {
        let i = (z.re / cell).floor() as i64 + span;
        let j = (z.im / cell).floor() as i64 + span;
        if (0..side as i64).contains(&i) && (0..side as i64).contains(&j) {
            let s = slot[j as usize * side + i as usize];
            if s != usize::MAX && hits[s].first_hit.is_none() {
                hits[s].first_hit = Some(n);
                covered += 1;
            }
        }
    };
    mark(Complex64::new(0.0, 0.0), 0, &mut hits);
    let mut sum = RunningSum::default();
    for (k, term) in half_angle_terms(theta, x).take(terms as usize).enumerate() {
        sum.add(term);
        mark(sum.value(), k as u64 + 1, &mut hits);
    }
    let cells = hits.len();
    Ok(DensityReport {
        theta,
        x,
        terms,
        radius,
        cell,
        cells,
        covered,
        covered_fraction: covered as f64 / cells as f64,
        hits,
    })
}
