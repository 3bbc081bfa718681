//! POVMs, observables and Born-rule statistics.
//!
//! Outcome labels are the integers `0..n` in effect order. Measurements built
//! from observables list eigenvalues in descending order, so for a `±1`
//! observable outcome `0` is the `+1` eigenspace.

use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix, HermitianEigen, C64};
use crate::state::DensityMatrix;

pub const POVM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    label: String,
    effects: Vec<ComplexMatrix>,
}

impl Measurement {
    /// Validates positivity of each effect and completeness.
    pub fn new(label: impl Into<String>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        let label = label.into();
        let invalid = |reason: String| Error::InvalidMeasurement {
            label: label.clone(),
            reason,
        };
        let first = effects.first().ok_or_else(|| invalid("no effects".into()))?;
        let dim = first.require_square()?;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (i, e) in effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(invalid(format!("effect {i} has the wrong shape")));
            }
            if !e.is_hermitian(POVM_TOL) {
                return Err(invalid(format!("effect {i} is not Hermitian")));
            }
            let min = HermitianEigen::new(e)?.min_value();
            if min < -POVM_TOL {
                return Err(invalid(format!("effect {i} has eigenvalue {min:.3e}")));
            }
            sum = &sum + e;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > POVM_TOL {
            return Err(invalid(format!("effects sum to identity only within {dev:.3e}")));
        }
        Ok(Self { label, effects })
    }

    /// Projective measurement onto the given orthonormal vectors.
    pub fn from_basis(label: impl Into<String>, vectors: &[Vec<C64>]) -> Result<Self> {
        let effects = vectors.iter().map(|v| ComplexMatrix::outer(v)).collect();
        Self::new(label, effects)
    }

    pub fn computational(dim: usize) -> Self {
        let effects = (0..dim)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                m[(i, i)] = C64::new(1.0, 0.0);
                m
            })
            .collect();
        Self {
            label: format!("computational_{dim}"),
            effects,
        }
    }

    /// Real-plane qubit basis `{cos φ|0> + sin φ|1>, -sin φ|0> + cos φ|1>}`.
    pub fn phi_basis(phi_rad: f64) -> Self {
        let (s, c) = phi_rad.sin_cos();
        let v0 = [C64::new(c, 0.0), C64::new(s, 0.0)];
        let v1 = [C64::new(-s, 0.0), C64::new(c, 0.0)];
        Self {
            label: format!("phi_{:.4}", phi_rad.to_degrees()),
            effects: vec![ComplexMatrix::outer(&v0), ComplexMatrix::outer(&v1)],
        }
    }

    /// Qubit measurement of the observable `n.sigma` for a unit Bloch vector.
    pub fn qubit_axis(label: impl Into<String>, n: [f64; 3]) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasurement {
                label: label.into(),
                reason: format!("axis norm {norm}"),
            });
        }
        let plus = DensityMatrix::from_bloch_unchecked(n).matrix().clone();
        let minus = DensityMatrix::from_bloch_unchecked([-n[0], -n[1], -n[2]])
            .matrix()
            .clone();
        Ok(Self {
            label: label.into(),
            effects: vec![plus, minus],
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn is_projective(&self, tol: f64) -> bool {
        self.effects
            .iter()
            .all(|e| (e * e).max_abs_diff(e) <= tol)
    }

    /// Unit eigenvectors of rank-one projective effects.
    pub fn rank_one_vectors(&self) -> Result<Vec<Vec<C64>>> {
        if !self.is_projective(POVM_TOL) {
            return Err(self.err("effects are not projectors"));
        }
        self.effects
            .iter()
            .map(|e| {
                let eig = HermitianEigen::new(e)?;
                let rank = eig.values.iter().filter(|&&v| v > 0.5).count();
                if rank != 1 {
                    return Err(self.err(&format!("effect of rank {rank}")));
                }
                Ok(eig.vectors.column(eig.dim() - 1))
            })
            .collect()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut effects = Vec::with_capacity(self.outcomes() * other.outcomes());
        for a in &self.effects {
            for b in &other.effects {
                effects.push(a.kron(b));
            }
        }
        Self {
            label: format!("{}⊗{}", self.label, other.label),
            effects,
        }
    }

    fn err(&self, reason: &str) -> Error {
        Error::InvalidMeasurement {
            label: self.label.clone(),
            reason: reason.into(),
        }
    }
}

/// `tr(M_a rho)` for every effect, clamped to `[0, 1]` after a tolerance check.
pub fn born_probabilities(state: &DensityMatrix, m: &Measurement) -> Result<Vec<f64>> {
    if state.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: state.dim(),
        });
    }
    Ok(born_unchecked(state.matrix(), m.effects()))
}

pub(crate) fn born_unchecked(rho: &ComplexMatrix, effects: &[ComplexMatrix]) -> Vec<f64> {
    effects
        .iter()
        .map(|e| {
            let p = e.trace_product(rho).re;
            debug_assert!(p > -1e-9 && p < 1.0 + 1e-9, "Born probability {p}");
            p.clamp(0.0, 1.0)
        })
        .collect()
}

/// Largest `|<phi_a|psi_b>|` over rank-one eigenvectors of two measurements.
pub fn max_overlap(a: &Measurement, b: &Measurement) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let va = a.rank_one_vectors()?;
    let vb = b.rank_one_vectors()?;
    let mut best: f64 = 0.0;
    for x in &va {
        for y in &vb {
            let ip: C64 = x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
            best = best.max(ip.norm());
        }
    }
    Ok(best.min(1.0))
}

/// Hermitian operator with its spectral decomposition into rank-one projectors.
#[derive(Clone, Debug)]
pub struct Observable {
    label: String,
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl Observable {
    pub fn new(label: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        let label = label.into();
        if !matrix.is_hermitian(1e-10) {
            return Err(Error::InvalidMeasurement {
                label,
                reason: "observable is not Hermitian".into(),
            });
        }
        let eig = HermitianEigen::new(&matrix)?;
        let n = eig.dim();
        let mut eigenvalues = Vec::with_capacity(n);
        let mut projectors = Vec::with_capacity(n);
        for k in (0..n).rev() {
            eigenvalues.push(eig.values[k]);
            projectors.push(ComplexMatrix::outer(&eig.vectors.column(k)));
        }
        Ok(Self {
            label,
            matrix,
            eigenvalues,
            projectors,
        })
    }

    /// Builds `sum_a mu_a P_a` from an explicit spectral decomposition.
    pub fn from_spectral(
        label: impl Into<String>,
        eigenvalues: Vec<f64>,
        projectors: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let label = label.into();
        if eigenvalues.len() != projectors.len() || projectors.is_empty() {
            return Err(Error::InvalidMeasurement {
                label,
                reason: "eigenvalue/projector count mismatch".into(),
            });
        }
        let dim = projectors[0].rows();
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        for (mu, p) in eigenvalues.iter().zip(&projectors) {
            matrix = &matrix + &p.scale_real(*mu);
        }
        // Validate completeness and positivity through Measurement.
        Measurement::new(label.clone(), projectors.clone())?;
        Ok(Self {
            label,
            matrix,
            eigenvalues,
            projectors,
        })
    }

    pub fn pauli_x() -> Self {
        Self::new("X", pauli::x()).expect("static")
    }

    pub fn pauli_y() -> Self {
        Self::new("Y", pauli::y()).expect("static")
    }

    pub fn pauli_z() -> Self {
        Self::new("Z", pauli::z()).expect("static")
    }

    /// `(sqrt(3) X + Z) / 2`.
    pub fn w() -> Self {
        let m = &pauli::x().scale_real(3f64.sqrt() / 2.0) + &pauli::z().scale_real(0.5);
        Self::new("W", m).expect("static")
    }

    /// `cos φ Z + sin φ X`.
    pub fn xz_plane(label: impl Into<String>, phi_rad: f64) -> Self {
        let m = &pauli::z().scale_real(phi_rad.cos()) + &pauli::x().scale_real(phi_rad.sin());
        Self::new(label, m).expect("Hermitian by construction")
    }

    /// Identity written as `1·|0><0| + 1·|1><1|` so it keeps two outcomes.
    pub fn qubit_identity() -> Self {
        let z = Self::pauli_z();
        Self::from_spectral("I", vec![1.0, 1.0], z.projectors).expect("static")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn measurement(&self) -> Measurement {
        Measurement {
            label: self.label.clone(),
            effects: self.projectors.clone(),
        }
    }

    pub fn reconstruction_error(&self) -> f64 {
        let dim = self.matrix.rows();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (mu, p) in self.eigenvalues.iter().zip(&self.projectors) {
            m = &m + &p.scale_real(*mu);
        }
        m.max_abs_diff(&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;

    #[test]
    fn born_on_eigenstate_and_mixed() {
        let h = PureState::basis(2, 0).density();
        let z = Observable::pauli_z().measurement();
        assert_eq!(born_probabilities(&h, &z).unwrap(), vec![1.0, 0.0]);
        let mixed = DensityMatrix::maximally_mixed(2);
        for m in [Observable::pauli_x(), Observable::w(), Observable::pauli_y()] {
            let p = born_probabilities(&mixed, &m.measurement()).unwrap();
            assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn born_on_reduced_bell_state() {
        let red = PureState::phi_theta(45.0)
            .density()
            .partial_trace(0, &[2, 2])
            .unwrap();
        let p = born_probabilities(&red, &Observable::pauli_z().measurement()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn born_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(4);
        let z = Observable::pauli_z().measurement();
        assert!(matches!(
            born_probabilities(&rho, &z),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invalid_povm_is_rejected() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(Measurement::new("short", vec![half.clone()]).is_err());
        let neg = ComplexMatrix::from_diagonal(&[1.5, 1.0]);
        let comp = ComplexMatrix::from_diagonal(&[-0.5, 0.0]);
        assert!(Measurement::new("neg", vec![neg, comp]).is_err());
        assert!(Measurement::new("ok", vec![half.clone(), half]).is_ok());
    }

    #[test]
    fn overlaps() {
        let z = Observable::pauli_z().measurement();
        let x = Observable::pauli_x().measurement();
        let w = Observable::w().measurement();
        assert!((max_overlap(&z, &z).unwrap() - 1.0).abs() < 1e-12);
        assert!((max_overlap(&x, &z).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((max_overlap(&z, &w).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_needs_rank_one() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let m = Measurement::new("noisy", vec![half.clone(), half]).unwrap();
        assert!(max_overlap(&m, &m).is_err());
    }

    #[test]
    fn w_eigenbasis_matches_gk() {
        // G/K: (|H> - sqrt3|V>)/2 and (sqrt3|H> + |V>)/2.
        let w = Observable::w();
        assert!((w.eigenvalues()[0] - 1.0).abs() < 1e-12);
        let k = PureState::from_real(&[3f64.sqrt() / 2.0, 0.5]).unwrap().density();
        let p = born_probabilities(&k, &w.measurement()).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(w.reconstruction_error() < 1e-12);
    }

    #[test]
    fn qubit_identity_spectral() {
        let id = Observable::qubit_identity();
        assert!(id.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert_eq!(id.eigenvalues(), &[1.0, 1.0]);
    }
}
