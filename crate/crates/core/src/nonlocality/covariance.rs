//! Covariance form of CHSH: `Cov00 + Cov01 + Cov10 - Cov11 <= 16/7` on local
//! correlations, written cell by cell as `f↓ ≺ (4/7)·[1,1,1,1]`.

use serde::Serialize;

use super::table::CorrelationTable;
use crate::error::{Error, Result};
use crate::majorization::{BoundVector, MajorizationCheck, DEFAULT_TOL};

/// Local bound on the covariance sum.
pub const COVARIANCE_BOUND: f64 = 16.0 / 7.0;

/// Outcome values of the two parties; outcome 0 maps to the first entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutcomeValues {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

impl Default for OutcomeValues {
    fn default() -> Self {
        Self {
            alice: [1.0, -1.0],
            bob: [1.0, -1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceReport {
    /// `[Cov(A0,B0), Cov(A0,B1), Cov(A1,B0), Cov(A1,B1)]`
    pub covariances: [f64; 4],
    pub covariance_sum: f64,
    /// Cells `f(a,b) = Σ_xy (-1)^{xy} [P(ab|xy) - p(a|x) q(b|y)] v_a w_b`,
    /// sorted descending. For binary outcomes every cell is a quarter of
    /// the covariance sum.
    pub f_desc: BoundVector,
    pub bound: BoundVector,
    pub check: MajorizationCheck,
    /// Some local observable has zero variance.
    pub degenerate: bool,
}

impl CovarianceReport {
    pub fn holds(&self) -> bool {
        self.check.holds
    }
}

/// `(4/7)·[1, 1, 1, 1]`
pub fn covariance_bound_vector() -> BoundVector {
    BoundVector::constant(COVARIANCE_BOUND / 4.0, 4)
}

pub fn covariance_chsh(table: &CorrelationTable, values: &OutcomeValues) -> Result<CovarianceReport> {
    table.require_shape(2, 2, 2)?;
    let mut covariances = [0.0; 4];
    let mut cells = [0.0; 4];
    let mut degenerate = false;
    for x in 0..2 {
        for y in 0..2 {
            let pa = table.marginal(&[0], &[x, y]);
            let pb = table.marginal(&[1], &[x, y]);
            let mean_a: f64 = pa.iter().zip(values.alice).map(|(p, v)| p * v).sum();
            let mean_b: f64 = pb.iter().zip(values.bob).map(|(p, v)| p * v).sum();
            let var_a: f64 = pa.iter().zip(values.alice).map(|(p, v)| p * (v - mean_a).powi(2)).sum();
            let var_b: f64 = pb.iter().zip(values.bob).map(|(p, v)| p * (v - mean_b).powi(2)).sum();
            degenerate |= var_a < 1e-12 || var_b < 1e-12;
            let sign = if x * y == 1 { -1.0 } else { 1.0 };
            let mut cov = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let term = (table.get(&[a, b], &[x, y]) - pa[a] * pb[b])
                        * values.alice[a]
                        * values.bob[b];
                    cov += term;
                    cells[2 * a + b] += sign * term;
                }
            }
            covariances[2 * x + y] = cov;
        }
    }
    if cells.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    let covariance_sum = covariances[0] + covariances[1] + covariances[2] - covariances[3];
    let f_desc = BoundVector::raw(cells.to_vec()).sort_desc();
    let bound = covariance_bound_vector();
    Ok(CovarianceReport {
        covariances,
        covariance_sum,
        check: MajorizationCheck::evaluate(&f_desc, &bound, DEFAULT_TOL)?,
        f_desc,
        bound,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlocality::chsh::tsirelson_box;
    use crate::nonlocality::table::deterministic_boxes;
    use std::f64::consts::SQRT_2;

    #[test]
    fn deterministic_boxes_have_zero_covariance() {
        for b in deterministic_boxes(2) {
            let r = covariance_chsh(&b, &OutcomeValues::default()).unwrap();
            assert!(r.covariance_sum.abs() < 1e-15);
            assert!(r.degenerate);
            assert!(r.holds());
        }
    }

    #[test]
    fn tsirelson_box_violates() {
        let r = covariance_chsh(&tsirelson_box(), &OutcomeValues::default()).unwrap();
        assert!((r.covariance_sum - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(!r.holds());
        assert!(!r.degenerate);
    }

    #[test]
    fn cells_are_quarter_sums() {
        let r = covariance_chsh(&tsirelson_box(), &OutcomeValues::default()).unwrap();
        for c in r.f_desc.components() {
            assert!((c - r.covariance_sum / 4.0).abs() < 1e-12);
        }
    }
}
