//! Entanglement witnesses `E = Σ α_xy A_x ⊗ B_y` read as measurement-dependent
//! uncertainty relations `f_ab ≺ c_s`.

use serde::Serialize;

use super::table::CorrelationTable;
use crate::bounds::{Sense, StateSet};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::majorization::{top_k_sum, BoundVector, MajorizationCheck, DEFAULT_TOL};
use crate::measurement::Observable;
use crate::state::DensityMatrix;

/// Reconstruction tolerance for [`WitnessOperator::with_target`].
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct WitnessOperator {
    alpha: Vec<Vec<f64>>,
    alice: Vec<Observable>,
    bob: Vec<Observable>,
    matrix: ComplexMatrix,
}

impl WitnessOperator {
    pub fn new(alpha: Vec<Vec<f64>>, alice: Vec<Observable>, bob: Vec<Observable>) -> Result<Self> {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::Empty("witness observables"));
        }
        if alpha.len() != alice.len() || alpha.iter().any(|row| row.len() != bob.len()) {
            return Err(Error::InvalidTable(format!(
                "coefficients must be {}x{}",
                alice.len(),
                bob.len()
            )));
        }
        let same = |obs: &[Observable]| {
            let d = obs[0].matrix().rows();
            let n = obs[0].eigenvalues().len();
            obs.iter().all(|o| o.matrix().rows() == d && o.eigenvalues().len() == n)
        };
        if !same(&alice) || !same(&bob) {
            return Err(Error::InvalidTable(
                "local observables of one party differ in dimension or outcome count".into(),
            ));
        }
        let da = alice[0].matrix().rows();
        let db = bob[0].matrix().rows();
        let mut matrix = ComplexMatrix::zeros(da * db, da * db);
        for (x, a) in alice.iter().enumerate() {
            for (y, b) in bob.iter().enumerate() {
                matrix = &matrix + &a.matrix().kron(b.matrix()).scale_real(alpha[x][y]);
            }
        }
        Ok(Self {
            alpha,
            alice,
            bob,
            matrix,
        })
    }

    /// As [`WitnessOperator::new`], additionally checking the decomposition
    /// against `target`.
    pub fn with_target(
        alpha: Vec<Vec<f64>>,
        alice: Vec<Observable>,
        bob: Vec<Observable>,
        target: &ComplexMatrix,
    ) -> Result<Self> {
        let w = Self::new(alpha, alice, bob)?;
        if target.rows() != w.matrix.rows() || !target.is_square() {
            return Err(Error::DimensionMismatch {
                expected: w.matrix.rows(),
                found: target.rows(),
            });
        }
        let err = w.matrix.max_abs_diff(target);
        if err > RECONSTRUCTION_TOL {
            return Err(Error::InvalidTable(format!(
                "decomposition misses the target by {err:.3e}"
            )));
        }
        Ok(w)
    }

    /// `|Φ+><Φ+| - I/2 = (-I⊗I + X⊗X - Y⊗Y + Z⊗Z) / 4`, positive on `|Φ+>` and
    /// nonpositive on separable states.
    pub fn bell() -> Self {
        let obs = || {
            vec![
                Observable::qubit_identity(),
                Observable::pauli_x(),
                Observable::pauli_y(),
                Observable::pauli_z(),
            ]
        };
        let q = 0.25;
        let alpha = vec![
            vec![-q, 0.0, 0.0, 0.0],
            vec![0.0, q, 0.0, 0.0],
            vec![0.0, 0.0, -q, 0.0],
            vec![0.0, 0.0, 0.0, q],
        ];
        Self::new(alpha, obs(), obs()).expect("static decomposition")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `tr(ρ E)`
    pub fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        self.check_dim(rho)?;
        Ok(rho.matrix().trace_product(&self.matrix).re)
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// Born table of the eigenbasis measurements of every `(A_x, B_y)`.
    pub fn table(&self, rho: &DensityMatrix) -> Result<CorrelationTable> {
        self.check_dim(rho)?;
        let alice = self.alice.iter().map(Observable::measurement).collect();
        let bob = self.bob.iter().map(Observable::measurement).collect();
        CorrelationTable::from_state(rho, &[alice, bob])
    }

    /// Raw `f(a,b) = μ_a γ_b Σ_xy α_xy P(a,b|x,y)`, with the eigenvalues taken
    /// per setting; the total equals `tr(ρ E)`.
    pub fn f_vector(&self, rho: &DensityMatrix) -> Result<BoundVector> {
        let t = self.table(rho)?;
        Ok(BoundVector::raw(self.cells(&t)))
    }

    fn cells(&self, t: &CorrelationTable) -> Vec<f64> {
        let na = self.alice[0].eigenvalues().len();
        let nb = self.bob[0].eigenvalues().len();
        let mut f = vec![0.0; na * nb];
        for (x, ax) in self.alice.iter().enumerate() {
            for (y, by) in self.bob.iter().enumerate() {
                let w = self.alpha[x][y];
                if w == 0.0 {
                    continue;
                }
                for a in 0..na {
                    for b in 0..nb {
                        f[a * nb + b] += w * ax.eigenvalues()[a] * by.eigenvalues()[b] * t.get(&[a, b], &[x, y]);
                    }
                }
            }
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub f_desc: BoundVector,
    /// Prefix maxima of `f↓` over the separable set, as differences.
    pub c_s: BoundVector,
    /// `tr(ρ E)`
    pub c_q: f64,
    /// Largest `tr(σ E)` found over the separable set.
    pub separable_total: f64,
    pub check: MajorizationCheck,
    pub violated: bool,
    pub converged: bool,
}

/// Tests `f↓ ≺ c_s`, and `tr(ρE) <= max_σ tr(σE)`, for `rho`.
pub fn witness_uncertainty_relation(
    w: &WitnessOperator,
    rho: &DensityMatrix,
    separable: &StateSet,
) -> Result<WitnessReport> {
    if separable.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: separable.dim(),
        });
    }
    let f_desc = w.f_vector(rho)?.sort_desc();
    let n = f_desc.len();
    let mut levels = Vec::with_capacity(n);
    let mut converged = true;
    for k in 1..=n {
        let objective = |sigma: &DensityMatrix| match w.table(sigma) {
            Ok(t) => top_k_sum(&w.cells(&t), k),
            Err(_) => f64::NEG_INFINITY,
        };
        let best = separable.optimize(&objective, Sense::Maximize)?;
        converged &= best.converged;
        levels.push(best.value);
    }
    let c_s = BoundVector::from_cumulative(&levels);
    let check = MajorizationCheck::evaluate(&f_desc, &c_s, DEFAULT_TOL)?;
    let c_q = w.value(rho)?;
    let separable_total = *levels.last().expect("nonempty");
    Ok(WitnessReport {
        violated: !check.holds || c_q > separable_total + DEFAULT_TOL,
        f_desc,
        c_s,
        c_q,
        separable_total,
        check,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::state::PureState;

    fn phi_plus_projector() -> ComplexMatrix {
        PureState::phi_theta(45.0).density().matrix().clone()
    }

    #[test]
    fn bell_witness_matches_target() {
        let target = &phi_plus_projector() - &ComplexMatrix::identity(4).scale_real(0.5);
        assert!(WitnessOperator::bell().matrix().max_abs_diff(&target) < 1e-12);
        let z = || vec![Observable::pauli_z()];
        assert!(WitnessOperator::with_target(vec![vec![1.0]], z(), z(), &pauli::z().kron(&pauli::z())).is_ok());
        assert!(WitnessOperator::with_target(vec![vec![1.0]], z(), z(), &target).is_err());
    }

    #[test]
    fn total_equals_expectation() {
        let w = WitnessOperator::bell();
        for rho in [
            PureState::phi_theta(45.0).density(),
            PureState::phi_theta(20.0).density(),
            DensityMatrix::maximally_mixed(4),
        ] {
            let f = w.f_vector(&rho).unwrap();
            assert!((f.total() - w.value(&rho).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn entangled_state_violates() {
        let w = WitnessOperator::bell();
        let set = StateSet::separable(vec![2, 2]).unwrap();
        let rho = PureState::phi_theta(45.0).density();
        let r = witness_uncertainty_relation(&w, &rho, &set).unwrap();
        assert!((r.c_q - 0.5).abs() < 1e-12);
        assert!(r.separable_total.abs() < 1e-8);
        assert!(r.violated);
    }

    #[test]
    fn mixed_and_product_states_do_not_violate() {
        let w = WitnessOperator::bell();
        let set = StateSet::separable(vec![2, 2]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        let r = witness_uncertainty_relation(&w, &mixed, &set).unwrap();
        assert!((r.c_q - w.matrix().trace().re / 4.0).abs() < 1e-12);
        assert!(!r.violated);
        let product = PureState::basis(4, 1).density();
        let r = witness_uncertainty_relation(&w, &product, &set).unwrap();
        assert!(r.c_q <= 0.0);
        assert!(!r.violated);
    }

    #[test]
    fn shape_errors() {
        let z = || vec![Observable::pauli_z()];
        assert!(WitnessOperator::new(vec![vec![1.0, 2.0]], z(), z()).is_err());
        let w = WitnessOperator::bell();
        assert!(w.value(&DensityMatrix::maximally_mixed(2)).is_err());
    }
}
