//! Relative-entropy coherence and the coherence relation
//! `0 ≺ f↓ ≺ R_coh(ρ)` with `f(p, q) = -p log p + q log q`.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::bounds::{table_values, UncertaintyFunctional};
use crate::entropy::{renormalize, shannon};
use crate::error::{Error, Result};
use crate::majorization::{top_k_sum, BoundVector, MajorizationCheck, DEFAULT_TOL};
use crate::measurement::{born_unchecked, Measurement};
use crate::optimize::MultiStart;
use crate::state::DensityMatrix;

/// Slack allowed on the unit sum of experimental marginals.
pub const MARGINAL_SLACK: f64 = 0.05;

/// `S(ρ_d) - S(ρ)` in bits.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> f64 {
    rho.dephased().entropy() - rho.entropy()
}

/// Measurements `A` searched when maximizing over the family.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurementFamily {
    /// Qubit bases `{cos φ|0> + sin φ|1>, -sin φ|0> + cos φ|1>}` on a grid of
    /// `step_deg` over `[0°, 90°]`, optionally refined by Nelder–Mead.
    RealPlane { step_deg: f64, refine: bool },
    /// Qubit projective measurements along Bloch directions on an angular
    /// grid of `grid` polar steps, refined by Nelder–Mead.
    Sphere { grid: usize },
    Explicit(Vec<Measurement>),
}

impl Default for MeasurementFamily {
    fn default() -> Self {
        Self::RealPlane {
            step_deg: 1.0,
            refine: true,
        }
    }
}

struct FamilyBest {
    value: f64,
    /// Basis angle in degrees for the real-plane family.
    angle_deg: Option<f64>,
}

fn sphere_measurement(x: &[f64]) -> Measurement {
    let (t, p) = (x[0], x[1]);
    let n = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
    Measurement::qubit_axis("axis", n).expect("unit axis")
}

impl MeasurementFamily {
    fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Self::Explicit(list) => {
                if list.is_empty() {
                    return Err(Error::Empty("measurement family"));
                }
                for m in list {
                    if m.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: m.dim(),
                        });
                    }
                }
                Ok(())
            }
            _ if dim != 2 => Err(Error::Unsupported(
                "parametrized measurement families are qubit-only".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Maximizes `objective` over the family; ties go to the first candidate
    /// (smallest angle).
    fn maximize<F>(&self, objective: &F) -> Result<FamilyBest>
    where
        F: Fn(&Measurement) -> f64 + Sync,
    {
        match self {
            Self::Explicit(list) => {
                let value = list
                    .iter()
                    .map(objective)
                    .reduce(f64::max)
                    .ok_or(Error::Empty("measurement family"))?;
                Ok(FamilyBest {
                    value,
                    angle_deg: None,
                })
            }
            Self::RealPlane { step_deg, refine } => {
                if step_deg.is_nan() || *step_deg <= 0.0 {
                    return Err(Error::Unsupported(format!("angle step {step_deg}")));
                }
                let n = (90.0 / step_deg).round().max(1.0) as usize;
                let seeds: Vec<Vec<f64>> = (0..=n).map(|i| vec![(i as f64 * step_deg).min(90.0)]).collect();
                let f = |x: &[f64]| -objective(&Measurement::phi_basis(x[0].to_radians()));
                let (x, value) = if *refine {
                    let r = MultiStart::default()
                        .minimize(&f, &seeds, step_deg / 2.0)
                        .ok_or(Error::Empty("measurement family"))?;
                    (r.best.x[0], r.best.value)
                } else {
                    seeds
                        .iter()
                        .map(|x| (x[0], f(x)))
                        .reduce(|a, b| if b.1 < a.1 { b } else { a })
                        .ok_or(Error::Empty("measurement family"))?
                };
                Ok(FamilyBest {
                    value: -value,
                    angle_deg: Some(x.rem_euclid(90.0)),
                })
            }
            Self::Sphere { grid } => {
                let g = (*grid).max(2);
                let mut seeds = Vec::new();
                for i in 0..g {
                    let t = PI * i as f64 / (g - 1) as f64;
                    for j in 0..2 * (g - 1) {
                        seeds.push(vec![t, PI * j as f64 / (g - 1) as f64]);
                    }
                }
                let f = |x: &[f64]| -objective(&sphere_measurement(x));
                let r = MultiStart::default()
                    .minimize(&f, &seeds, PI / (g - 1) as f64)
                    .ok_or(Error::Empty("measurement family"))?;
                Ok(FamilyBest {
                    value: -r.best.value,
                    angle_deg: None,
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceReport {
    /// The table for the supplied `A`, sorted descending.
    pub f_desc: BoundVector,
    pub r_coh: BoundVector,
    /// `None` when only marginals are available.
    pub c_r: Option<f64>,
    /// `max_A [H(B) - H(A)]` over the family or scan.
    pub d_h: f64,
    /// Basis angle (degrees) where `H(A)` is smallest, when the family is
    /// parametrized by one.
    pub basis_angle_at_min: Option<f64>,
    /// `0 ≺ f↓`
    pub lower: MajorizationCheck,
    /// `f↓ ≺ R_coh`
    pub upper: MajorizationCheck,
}

fn coherence_table(p_comp: &[f64], p_a: &[f64]) -> Vec<f64> {
    table_values(
        &UncertaintyFunctional::coherence(),
        &[p_comp.to_vec(), p_a.to_vec()],
    )
}

/// Builds the report for `A` against the computational basis, maximizing
/// `R_coh` over `family`.
pub fn coherence_vector_relation(
    rho: &DensityMatrix,
    a: &Measurement,
    family: &MeasurementFamily,
) -> Result<CoherenceReport> {
    let dim = rho.dim();
    if a.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: a.dim(),
        });
    }
    family.check_dim(dim)?;
    let comp = Measurement::computational(dim);
    let p_comp = born_unchecked(rho.matrix(), comp.effects());
    let table = |m: &Measurement| coherence_table(&p_comp, &born_unchecked(rho.matrix(), m.effects()));

    let f_desc = BoundVector::raw(table(a)).sort_desc();
    let n = f_desc.len();
    let mut levels = Vec::with_capacity(n);
    for k in 1..=n {
        let best = family.maximize(&|m: &Measurement| {
            let t = table(m);
            if t.len() == n {
                top_k_sum(&t, k)
            } else {
                f64::NEG_INFINITY
            }
        })?;
        levels.push(best.value);
    }
    let r_coh = BoundVector::from_cumulative(&levels);

    let h_b = shannon(&p_comp);
    let best = family.maximize(&|m: &Measurement| h_b - shannon(&born_unchecked(rho.matrix(), m.effects())))?;
    let zero = BoundVector::zeros(n);
    Ok(CoherenceReport {
        lower: MajorizationCheck::evaluate(&zero, &f_desc, DEFAULT_TOL)?,
        upper: MajorizationCheck::evaluate(&f_desc, &r_coh, DEFAULT_TOL)?,
        f_desc,
        r_coh,
        c_r: Some(relative_entropy_coherence(rho)),
        d_h: best.value,
        basis_angle_at_min: best.angle_deg,
    })
}

/// `D_H = H(p_Z) - min_φ H(p_φ)` over a discrete scan of `(φ in degrees,
/// marginal)` pairs. Marginals are renormalized; ties in the minimum go to
/// the smallest `φ`.
pub fn d_h_from_marginals(p_z: &[f64], scans: &[(f64, Vec<f64>)]) -> Result<CoherenceReport> {
    if scans.is_empty() {
        return Err(Error::Empty("basis scan"));
    }
    let p_z = renormalize(p_z, MARGINAL_SLACK)?;
    let mut scans: Vec<(f64, Vec<f64>)> = scans
        .iter()
        .map(|(phi, p)| Ok((*phi, renormalize(p, MARGINAL_SLACK)?)))
        .collect::<Result<_>>()?;
    scans.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, p) in &scans {
        if p.len() != p_z.len() {
            return Err(Error::LengthMismatch {
                left: p_z.len(),
                right: p.len(),
            });
        }
    }
    let h_z = shannon(&p_z);
    let (phi_star, p_star) = scans
        .iter()
        .map(|(phi, p)| (*phi, p, shannon(p)))
        .reduce(|a, b| if b.2 < a.2 { b } else { a })
        .map(|(phi, p, _)| (phi, p.clone()))
        .expect("nonempty scans");

    let f_desc = BoundVector::raw(coherence_table(&p_z, &p_star)).sort_desc();
    let n = f_desc.len();
    let tables: Vec<Vec<f64>> = scans.iter().map(|(_, p)| coherence_table(&p_z, p)).collect();
    let levels: Vec<f64> = (1..=n)
        .map(|k| {
            tables
                .iter()
                .map(|t| top_k_sum(t, k))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let r_coh = BoundVector::from_cumulative(&levels);
    let zero = BoundVector::zeros(n);
    Ok(CoherenceReport {
        lower: MajorizationCheck::evaluate(&zero, &f_desc, DEFAULT_TOL)?,
        upper: MajorizationCheck::evaluate(&f_desc, &r_coh, DEFAULT_TOL)?,
        f_desc,
        r_coh,
        c_r: None,
        d_h: h_z - shannon(&p_star),
        basis_angle_at_min: Some(phi_star),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceRow {
    pub theta_deg: f64,
    pub phi_star_deg: f64,
    pub d_h: f64,
    /// `|D_H - C_r|` against the ideal state's coherence.
    pub error: f64,
}

/// CSV with columns `theta,phi_star,D_H,error`.
pub fn write_coherence_csv<W: Write>(rows: &[CoherenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["theta", "phi_star", "D_H", "error"]).map_err(io)?;
    for r in rows {
        w.write_record([
            format!("{}", r.theta_deg),
            format!("{}", r.phi_star_deg),
            format!("{:.10}", r.d_h),
            format!("{:.10}", r.error),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binary_entropy;
    use crate::state::PureState;

    fn plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_real(&[h, h]).unwrap().density()
    }

    #[test]
    fn coherence_examples() {
        let diag = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(relative_entropy_coherence(&diag).abs() < 1e-12);
        assert!((relative_entropy_coherence(&plus()) - 1.0).abs() < 1e-12);
        let mixed = plus().mix(&DensityMatrix::maximally_mixed(2), 0.1).unwrap();
        let expected = 1.0 - binary_entropy(0.05);
        assert!((relative_entropy_coherence(&mixed) - expected).abs() < 1e-12);
    }

    #[test]
    fn incoherent_state_saturates_lower_bound() {
        let rho = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let a = Measurement::phi_basis(0.4);
        let r = coherence_vector_relation(&rho, &a, &MeasurementFamily::default()).unwrap();
        assert!(r.d_h.abs() < 1e-6);
        assert!(r.r_coh.total().abs() < 1e-6);
        assert!(r.lower.holds && r.upper.holds);
    }

    #[test]
    fn plus_state_reaches_one_bit() {
        let a = Measurement::computational(2);
        let r = coherence_vector_relation(&plus(), &a, &MeasurementFamily::default()).unwrap();
        assert!((r.d_h - 1.0).abs() < 1e-9);
        assert!((r.basis_angle_at_min.unwrap() - 45.0).abs() < 1e-4);
        assert!((r.r_coh.total() / 2.0 - 1.0).abs() < 1e-9);
        let sphere = coherence_vector_relation(&plus(), &a, &MeasurementFamily::Sphere { grid: 13 }).unwrap();
        assert!((sphere.d_h - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_family() {
        let a = Measurement::computational(2);
        assert!(matches!(
            coherence_vector_relation(&plus(), &a, &MeasurementFamily::Explicit(vec![])),
            Err(Error::Empty(_))
        ));
        assert!(matches!(d_h_from_marginals(&[0.5, 0.5], &[]), Err(Error::Empty(_))));
    }

    #[test]
    fn synthetic_plus_scan() {
        let scans: Vec<(f64, Vec<f64>)> = (0..=9)
            .map(|i| {
                let phi = 5.0 * i as f64;
                let p = born_unchecked(
                    plus().matrix(),
                    Measurement::phi_basis(f64::to_radians(phi)).effects(),
                );
                (phi, p)
            })
            .collect();
        let r = d_h_from_marginals(&[0.5, 0.5], &scans).unwrap();
        assert!((r.d_h - 1.0).abs() < 1e-9);
        assert_eq!(r.basis_angle_at_min, Some(45.0));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_coherence_csv(
            &[CoherenceRow {
                theta_deg: 60.0,
                phi_star_deg: 5.0,
                d_h: 0.004,
                error: 0.004,
            }],
            &mut buf,
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "theta,phi_star,D_H,error\n60,5,0.0040000000,0.0040000000\n"
        );
    }
}
