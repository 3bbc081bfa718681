//! Fixture-driven reproductions: entropy totals, coherence scans and CHSH
//! statistics with Poisson error bars.

use serde::Serialize;

use super::counts::{table_from_counts, CountTable};
use super::fixtures::{Basis, MarginalRecord, ScanRecord};
use super::resample::{resample_with, PValue, ResampleStats};
use crate::coherence::{d_h_from_marginals, relative_entropy_coherence, CoherenceRow};
use crate::entropy::EntropyKind;
use crate::error::{Error, Result};
use crate::majorization::BoundVector;
use crate::measurement::born_probabilities;
use crate::nonlocality::{
    check_chsh_relation_with, chsh_f_vector_masked, chsh_value, quantum_chsh_value, ChshLevel, ChshOptions,
    ChshReport, CellMask,
};
use crate::state::{DensityMatrix, PureState};

/// Number of standard deviations used as the data tolerance.
pub const SIGMA_LEVEL: f64 = 3.0;

/// Reduced state of either photon of `|Φ(θ)>`.
pub fn ideal_reduced_state(theta_deg: f64) -> Result<DensityMatrix> {
    PureState::phi_theta(theta_deg).density().partial_trace(0, &[2, 2])
}

/// Outcome distribution of `basis` on the reduced state of `|Φ(θ)>`.
pub fn ideal_marginal(theta_deg: f64, basis: Basis) -> Result<Vec<f64>> {
    let rho = ideal_reduced_state(theta_deg)?;
    born_probabilities(&rho, &basis.observable().measurement())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub theta_deg: f64,
    pub pair: String,
    pub ideal: f64,
    pub measured: f64,
    pub deviation: f64,
    /// Both printed marginals sum to one within the slack.
    pub consistent: bool,
}

/// `H(a) + H(b)` from the renormalized fixture marginals next to the ideal
/// value for `|Φ(θ)>`.
pub fn entropy_comparison(records: &[MarginalRecord], entropy: EntropyKind) -> Result<Vec<EntropyRow>> {
    records
        .iter()
        .map(|r| {
            let ideal = entropy.eval(&ideal_marginal(r.theta_deg, r.a_basis)?)
                + entropy.eval(&ideal_marginal(r.theta_deg, r.b_basis)?);
            let measured = entropy.eval(&r.a.normalized) + entropy.eval(&r.b.normalized);
            Ok(EntropyRow {
                theta_deg: r.theta_deg,
                pair: r.pair_label(),
                ideal,
                measured,
                deviation: (measured - ideal).abs(),
                consistent: r.consistent(),
            })
        })
        .collect()
}

/// `D_H` per angle from a basis scan whose `φ = 0` entry is the
/// computational basis. The error is measured against `C_r` of the ideal
/// reduced state.
pub fn coherence_from_scans(scans: &[ScanRecord]) -> Result<Vec<CoherenceRow>> {
    let mut thetas: Vec<f64> = scans.iter().map(|s| s.theta_deg).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    thetas
        .into_iter()
        .map(|theta| {
            let scan: Vec<(f64, Vec<f64>)> = scans
                .iter()
                .filter(|s| s.theta_deg == theta)
                .map(|s| (s.phi_deg, s.a.raw.to_vec()))
                .collect();
            let p_z = scan
                .iter()
                .find(|(phi, _)| *phi == 0.0)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| Error::InvalidDistribution(format!("θ = {theta}: no φ = 0 entry")))?;
            let report = d_h_from_marginals(&p_z, &scan)?;
            let c_r = relative_entropy_coherence(&ideal_reduced_state(theta)?);
            Ok(CoherenceRow {
                theta_deg: theta,
                phi_star_deg: report.basis_angle_at_min.unwrap_or(0.0),
                d_h: report.d_h,
                error: (report.d_h - c_r).abs(),
            })
        })
        .collect()
}

/// Largest proper prefix sum of the masked `f↓`.
fn max_prefix(f: &BoundVector) -> f64 {
    let p = f.sort_desc().prefix_sums();
    p[..p.len() - 1].iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshAnalysis {
    pub theta_deg: f64,
    pub s_measured: f64,
    pub s: ResampleStats,
    /// Resampled spread of the largest proper prefix of `f↓`.
    pub prefix_std: f64,
    /// `SIGMA_LEVEL · prefix_std`
    pub tolerance: f64,
    pub p_value: PValue,
    pub gamma: f64,
    pub classical: ChshReport,
    pub quantum: ChshReport,
}

impl ChshAnalysis {
    pub fn violates_classical(&self) -> bool {
        !self.classical.holds()
    }

    pub fn holds_quantum(&self) -> bool {
        self.quantum.holds()
    }

    pub fn report(&self) -> PoissonReport {
        PoissonReport {
            statistic: "S".into(),
            value: self.s_measured,
            mean: self.s.mean,
            std: self.s.std,
            p_value: self.p_value.resampled,
            p_value_display: self.p_value.display.clone(),
            gaussian_tail: self.p_value.gaussian_tail,
            bound: ChshLevel::Classical.value(),
            verdict: if self.violates_classical() {
                "violated".into()
            } else {
                "holds".into()
            },
        }
    }
}

/// JSON-facing summary of a resampled statistic against a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonReport {
    pub statistic: String,
    pub value: f64,
    pub mean: f64,
    pub std: f64,
    pub p_value: f64,
    pub p_value_display: String,
    pub gaussian_tail: f64,
    pub bound: f64,
    pub verdict: String,
}

/// CHSH value and majorization verdicts of one state's counts, with
/// tolerances from Poisson resampling.
pub fn chsh_analysis(counts: &CountTable, n_samples: usize, seed: u64) -> Result<ChshAnalysis> {
    let table = counts.table()?;
    let s_measured = chsh_value(&table)?;
    let draws = resample_with(&counts.counts, n_samples, seed, |c| {
        let t = table_from_counts(c)?;
        Ok((chsh_value(&t)?, max_prefix(&chsh_f_vector_masked(&t, CellMask::Diagonal)?)))
    })?;
    let (s_values, prefixes): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
    let s = ResampleStats::from_values(s_values);
    let prefix_std = ResampleStats::from_values(prefixes).std;
    let tolerance = SIGMA_LEVEL * prefix_std;
    let options = ChshOptions {
        mask: CellMask::Diagonal,
        tol: tolerance,
    };
    let classical_bound = ChshLevel::Classical.value();
    Ok(ChshAnalysis {
        theta_deg: counts.theta_deg,
        s_measured,
        p_value: PValue::new(&s, s_measured, classical_bound),
        s,
        prefix_std,
        tolerance,
        gamma: quantum_chsh_value(counts.theta_deg),
        classical: check_chsh_relation_with(&table, ChshLevel::Classical, &options)?,
        quantum: check_chsh_relation_with(&table, ChshLevel::Quantum, &options)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_marginals() {
        let p = ideal_marginal(0.0, Basis::HV).unwrap();
        assert!(p[0].abs() < 1e-12);
        let p = ideal_marginal(0.0, Basis::GK).unwrap();
        assert!((p[0] - 0.25).abs() < 1e-12);
        let p = ideal_marginal(30.0, Basis::DA).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scan_of_ideal_state_has_zero_error() {
        let theta = 60f64;
        let s2 = theta.to_radians().sin().powi(2);
        let scans: Vec<ScanRecord> = (0..10)
            .map(|i| {
                let phi = (5 * i) as f64;
                let c2 = phi.to_radians().cos().powi(2);
                let p0 = c2 * s2 + (1.0 - c2) * (1.0 - s2);
                ScanRecord {
                    theta_deg: theta,
                    phi_deg: phi,
                    a: super::super::fixtures::MarginalPair::new(p0, 1.0 - p0).unwrap(),
                    line: i + 2,
                }
            })
            .collect();
        let rows = coherence_from_scans(&scans).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].d_h.abs() < 1e-12);
        assert_eq!(rows[0].phi_star_deg, 0.0);
    }
}
