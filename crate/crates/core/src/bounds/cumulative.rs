//! Cumulative bounds `R_k = max_ρ max_{|I|=k} Σ_I f` and `r_k` (the min
//! counterpart), the vectors built from them and the sandwich check
//! `r ≺ f_ab ≺ R`.

use serde::Serialize;

use super::functional::{table_values, UncertaintyFunctional};
use super::stateset::{Sense, StateSet};
use crate::error::{Error, Result};
use crate::majorization::{bottom_k_sum, top_k_sum, BoundVector, MajorizationCheck};
use crate::measurement::{born_probabilities, born_unchecked, Measurement};
use crate::state::DensityMatrix;

/// Largest outcome grid accepted by [`multi_observable_bounds`].
pub const MAX_GRID: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelTrace {
    pub k: usize,
    pub max: f64,
    pub min: f64,
    pub max_converged: bool,
    pub min_converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CumulativeBounds {
    /// `R_1..R_N`
    pub levels_max: Vec<f64>,
    /// `r_1..r_N`
    pub levels_min: Vec<f64>,
    pub functional: String,
    pub measurements: Vec<String>,
    pub converged: bool,
    pub trace: Vec<LevelTrace>,
}

impl CumulativeBounds {
    pub fn len(&self) -> usize {
        self.levels_max.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels_max.is_empty()
    }

    /// `R = [R_1, R_2 - R_1, ...]`
    pub fn upper(&self) -> BoundVector {
        BoundVector::from_cumulative(&self.levels_max)
    }

    /// `r = [r_1, r_2 - r_1, ...]`
    pub fn lower(&self) -> BoundVector {
        BoundVector::from_cumulative(&self.levels_min)
    }

    /// Minimum of the full table sum over the state set.
    pub fn min_total(&self) -> f64 {
        *self.levels_min.last().expect("nonempty bounds")
    }

    pub fn max_total(&self) -> f64 {
        *self.levels_max.last().expect("nonempty bounds")
    }

    /// Tests `r ≺ f_ab ≺ R` for a raw table `f_ab`.
    pub fn sandwich(&self, f_ab: &BoundVector, tol: f64) -> Result<SandwichReport> {
        Ok(SandwichReport {
            lower: MajorizationCheck::evaluate(&self.lower(), f_ab, tol)?,
            upper: MajorizationCheck::evaluate(f_ab, &self.upper(), tol)?,
            f_ab: f_ab.clone(),
        })
    }

    /// Builds `f_ab` for `rho` and runs [`CumulativeBounds::sandwich`].
    pub fn check_state(
        &self,
        f: &UncertaintyFunctional,
        measurements: &[Measurement],
        rho: &DensityMatrix,
        tol: f64,
    ) -> Result<SandwichReport> {
        let dists = measurements
            .iter()
            .map(|m| born_probabilities(rho, m))
            .collect::<Result<Vec<_>>>()?;
        if dists.len() != f.arity() {
            return Err(Error::ArityMismatch {
                name: f.name().to_string(),
                expected: f.arity(),
                found: dists.len(),
            });
        }
        let f_ab = BoundVector::raw(table_values(f, &dists));
        self.sandwich(&f_ab, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    /// `r ≺ f_ab`
    pub lower: MajorizationCheck,
    /// `f_ab ≺ R`
    pub upper: MajorizationCheck,
    pub f_ab: BoundVector,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower.holds && self.upper.holds
    }
}

pub fn cumulative_bounds(
    f: &UncertaintyFunctional,
    a: &Measurement,
    b: &Measurement,
    set: &StateSet,
) -> Result<CumulativeBounds> {
    multi_observable_bounds(f, &[a.clone(), b.clone()], set)
}

pub fn multi_observable_bounds(
    f: &UncertaintyFunctional,
    measurements: &[Measurement],
    set: &StateSet,
) -> Result<CumulativeBounds> {
    let m = measurements.len();
    if !(2..=4).contains(&m) {
        return Err(Error::Unsupported(format!(
            "{m} measurements; between 2 and 4 are supported"
        )));
    }
    if f.arity() != m {
        return Err(Error::ArityMismatch {
            name: f.name().to_string(),
            expected: f.arity(),
            found: m,
        });
    }
    for meas in measurements {
        if meas.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                found: meas.dim(),
            });
        }
    }
    let size = measurements
        .iter()
        .try_fold(1usize, |acc, meas| acc.checked_mul(meas.outcomes()))
        .unwrap_or(usize::MAX);
    if size > MAX_GRID {
        return Err(Error::GridTooLarge {
            size,
            limit: MAX_GRID,
        });
    }

    let table = |rho: &DensityMatrix| -> Vec<f64> {
        let dists: Vec<Vec<f64>> = measurements
            .iter()
            .map(|meas| born_unchecked(rho.matrix(), meas.effects()))
            .collect();
        table_values(f, &dists)
    };

    let mut trace = Vec::with_capacity(size);
    for k in 1..=size {
        let hi = set.optimize(&|rho: &DensityMatrix| top_k_sum(&table(rho), k), Sense::Maximize)?;
        let lo = set.optimize(&|rho: &DensityMatrix| bottom_k_sum(&table(rho), k), Sense::Minimize)?;
        trace.push(LevelTrace {
            k,
            max: hi.value,
            min: lo.value,
            max_converged: hi.converged,
            min_converged: lo.converged,
        });
    }
    Ok(CumulativeBounds {
        levels_max: trace.iter().map(|t| t.max).collect(),
        levels_min: trace.iter().map(|t| t.min).collect(),
        functional: f.name().to_string(),
        measurements: measurements.iter().map(|m| m.label().to_string()).collect(),
        converged: trace.iter().all(|t| t.max_converged && t.min_converged),
        trace,
    })
}

/// `R_k = max_{(A,B)} R_k(A,B)` and `r_k = min_{(A,B)} r_k(A,B)` over the
/// explicit product `M_1 × M_2`.
pub fn device_independent_bounds(
    f: &UncertaintyFunctional,
    first: &[Measurement],
    second: &[Measurement],
    set: &StateSet,
) -> Result<CumulativeBounds> {
    let mut out: Option<CumulativeBounds> = None;
    for a in first {
        for b in second {
            let cb = cumulative_bounds(f, a, b, set)?;
            out = Some(match out {
                None => cb,
                Some(mut acc) => {
                    if acc.len() != cb.len() {
                        return Err(Error::LengthMismatch {
                            left: acc.len(),
                            right: cb.len(),
                        });
                    }
                    for (x, y) in acc.levels_max.iter_mut().zip(&cb.levels_max) {
                        *x = x.max(*y);
                    }
                    for (x, y) in acc.levels_min.iter_mut().zip(&cb.levels_min) {
                        *x = x.min(*y);
                    }
                    acc.converged &= cb.converged;
                    acc.measurements.extend(cb.measurements);
                    acc.trace.extend(cb.trace);
                    acc
                }
            });
        }
    }
    out.ok_or(Error::Empty("measurement set"))
}

/// Computes the bounds for `(A, B)` over `set` and checks them against `rho`.
pub fn check_relation_3(
    f: &UncertaintyFunctional,
    a: &Measurement,
    b: &Measurement,
    set: &StateSet,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<SandwichReport> {
    let cb = cumulative_bounds(f, a, b, set)?;
    cb.check_state(f, &[a.clone(), b.clone()], rho, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::Observable;
    use crate::state::PureState;

    #[test]
    fn compatible_measurements_reach_zero() {
        let z = Observable::pauli_z().measurement();
        let cb = cumulative_bounds(&UncertaintyFunctional::shannon_pair(), &z, &z, &StateSet::all_qubit())
            .unwrap();
        assert!(cb.min_total().abs() < 1e-9);
        for w in cb.levels_max.windows(2).chain(cb.levels_min.windows(2)) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        for (lo, hi) in cb.levels_min.iter().zip(&cb.levels_max) {
            assert!(lo <= hi);
        }
    }

    #[test]
    fn extremal_state_touches_lower_vector() {
        let z = Observable::pauli_z().measurement();
        let f = UncertaintyFunctional::shannon_pair();
        let h = PureState::basis(2, 0).density();
        let r = check_relation_3(&f, &z, &z, &StateSet::all_qubit(), &h, 1e-9).unwrap();
        assert!(r.holds());
        assert!(r.f_ab.total().abs() < 1e-12);
    }

    #[test]
    fn mixed_state_inside_for_x_z() {
        let x = Observable::pauli_x().measurement();
        let z = Observable::pauli_z().measurement();
        let f = UncertaintyFunctional::shannon_pair();
        let rho = DensityMatrix::maximally_mixed(2);
        let r = check_relation_3(&f, &x, &z, &StateSet::all_qubit(), &rho, 1e-9).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn argument_errors() {
        let z = Observable::pauli_z().measurement();
        let f = UncertaintyFunctional::shannon_pair();
        let set = StateSet::all_qubit();
        assert!(matches!(
            multi_observable_bounds(&f, std::slice::from_ref(&z), &set),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            multi_observable_bounds(&f, &[z.clone(), z.clone(), z.clone()], &set),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            cumulative_bounds(&f, &z, &Measurement::computational(3), &set),
            Err(Error::DimensionMismatch { .. })
        ));
        let trivial = Measurement::new(
            "trivial9",
            vec![crate::linalg::ComplexMatrix::identity(2).scale_real(1.0 / 9.0); 9],
        )
        .unwrap();
        let f4 = UncertaintyFunctional::shannon_sum(4);
        assert!(matches!(
            multi_observable_bounds(&f4, &vec![trivial; 4], &set),
            Err(Error::GridTooLarge { size: 6561, .. })
        ));
    }

    #[test]
    fn device_independent_takes_extremes() {
        let x = Observable::pauli_x().measurement();
        let z = Observable::pauli_z().measurement();
        let f = UncertaintyFunctional::shannon_pair();
        let set = StateSet::all_qubit();
        let di = device_independent_bounds(&f, std::slice::from_ref(&z), &[z.clone(), x.clone()], &set).unwrap();
        let zz = cumulative_bounds(&f, &z, &z, &set).unwrap();
        let zx = cumulative_bounds(&f, &z, &x, &set).unwrap();
        for k in 0..4 {
            assert_eq!(di.levels_max[k], zz.levels_max[k].max(zx.levels_max[k]));
            assert_eq!(di.levels_min[k], zz.levels_min[k].min(zx.levels_min[k]));
        }
        assert!(device_independent_bounds(&f, &[], &[x], &set).is_err());
    }
}
