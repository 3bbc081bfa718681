//! Quantum states: density matrices, pure states, reduced states and fidelity.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::entropy::shannon;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianEigen, C64};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// A validated trace-one positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.require_square()?;
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = HermitianEigen::new(&matrix)?.min_value();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:.3e} below -{PSD_TOL:e}"
            )));
        }
        debug_assert!(dim > 0);
        Ok(Self { matrix })
    }

    /// Skips the eigenvalue check; callers guarantee validity by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(probs))
    }

    /// Qubit state `(I + r.sigma)/2`; `|r| <= 1` is required.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector norm {norm}")));
        }
        Ok(Self::from_bloch_unchecked(r))
    }

    pub(crate) fn from_bloch_unchecked(r: [f64; 3]) -> Self {
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(0.5 * (1.0 + r[2]), 0.0),
                C64::new(0.5 * r[0], -0.5 * r[1]),
                C64::new(0.5 * r[0], 0.5 * r[1]),
                C64::new(0.5 * (1.0 - r[2]), 0.0),
            ],
        )
        .expect("finite Bloch vector");
        Self::new_unchecked(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        HermitianEigen::new(&self.matrix)
            .expect("density matrices are square")
            .values
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        let vals: Vec<f64> = self.eigenvalues().into_iter().map(|x| x.max(0.0)).collect();
        shannon(&vals)
    }

    /// Diagonal part in the computational basis (the dephased state).
    pub fn dephased(&self) -> Self {
        let diag: Vec<f64> = self.matrix.diagonal().iter().map(|z| z.re).collect();
        Self::new_unchecked(ComplexMatrix::from_diagonal(&diag))
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Convex combination `(1-t) self + t other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let m = &self.matrix.scale_real(1.0 - t) + &other.matrix.scale_real(t);
        Ok(Self::new_unchecked(m))
    }

    /// Conjugation `U rho U^dagger` by a unitary.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Self {
        let m = &(u * &self.matrix) * &u.adjoint();
        Self::new_unchecked(m)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::new_unchecked(self.matrix.kron(&other.matrix))
    }

    /// Traces out every subsystem except `keep`; `dims` lists all subsystem
    /// dimensions in tensor order.
    pub fn partial_trace(&self, keep: usize, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() || keep >= dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: total,
            });
        }
        let dk = dims[keep];
        let inner: usize = dims[keep + 1..].iter().product();
        let outer: usize = dims[..keep].iter().product();
        let mut out = ComplexMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for o in 0..outer {
                    for n in 0..inner {
                        let r = (o * dk + i) * inner + n;
                        let c = (o * dk + j) * inner + n;
                        acc += self.matrix[(r, c)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self::new_unchecked(out))
    }

    /// Ginibre-distributed random mixed state of full rank.
    pub fn random_ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut g = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                g[(i, j)] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
        }
        let gg = &g * &g.adjoint();
        let tr = gg.trace().re;
        Self::new_unchecked(gg.scale_real(1.0 / tr))
    }

    pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        PureState::random(dim, rng).density()
    }
}

/// Unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() {
            return Err(Error::Empty("amplitudes"));
        }
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("state norm {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self { amplitudes: amps }
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let amps: Vec<C64> = (0..dim)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::normalized(amps) {
                return s;
            }
        }
    }

    /// `sin(theta)|HH> + cos(theta)|VV>` with `|H> = |0>`, `|V> = |1>`.
    pub fn phi_theta(theta_deg: f64) -> Self {
        let t = theta_deg.to_radians();
        let zero = C64::new(0.0, 0.0);
        Self {
            amplitudes: vec![C64::new(t.sin(), 0.0), zero, zero, C64::new(t.cos(), 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Self { amplitudes: amps }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(ComplexMatrix::outer(&self.amplitudes))
    }
}

/// Kronecker product of two square matrices.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_square()?;
    b.require_square()?;
    Ok(a.kron(b))
}

/// Uhlmann fidelity `(tr sqrt(sqrt(r1) r2 sqrt(r1)))^2`, clamped to `[0, 1]`.
pub fn fidelity(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch {
            expected: r1.dim(),
            found: r2.dim(),
        });
    }
    for r in [r1, r2] {
        let min = HermitianEigen::new(r.matrix())?.min_value();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "fidelity needs PSD input (min eigenvalue {min:.3e})"
            )));
        }
    }
    let sqrt1 = r1.matrix().hermitian_map(|x| x.max(0.0).sqrt())?;
    let inner = &(&sqrt1 * r2.matrix()) * &sqrt1;
    let eig = HermitianEigen::new(&inner)?;
    let root_sum: f64 = eig.values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let rho = PureState::phi_theta(45.0).density();
        let red = rho.partial_trace(0, &[2, 2]).unwrap();
        assert!(red.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_phi_60() {
        let rho = PureState::phi_theta(60.0).density();
        for keep in 0..2 {
            let red = rho.partial_trace(keep, &[2, 2]).unwrap();
            let expected = ComplexMatrix::from_diagonal(&[0.75, 0.25]);
            assert!(red.matrix().max_abs_diff(&expected) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(rho.partial_trace(0, &[2, 3]).is_err());
        assert!(rho.partial_trace(2, &[2, 2]).is_err());
    }

    #[test]
    fn partial_trace_three_parties_middle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DensityMatrix::random_ginibre(2, &mut rng);
        let b = DensityMatrix::random_ginibre(2, &mut rng);
        let c = DensityMatrix::random_ginibre(2, &mut rng);
        let abc = a.tensor(&b).tensor(&c);
        let got = abc.partial_trace(1, &[2, 2, 2]).unwrap();
        assert!(got.matrix().max_abs_diff(b.matrix()) < 1e-14);
    }

    #[test]
    fn fidelity_examples() {
        let h = PureState::basis(2, 0).density();
        let v = PureState::basis(2, 1).density();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&h, &h).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&h, &v).unwrap() < 1e-12);
        assert!((fidelity(&h, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = DensityMatrix::random_ginibre(3, &mut rng);
            let b = DensityMatrix::random_ginibre(3, &mut rng);
            let ab = fidelity(&a, &b).unwrap();
            let ba = fidelity(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        let not_herm = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(not_herm).is_err());
        let bad_trace = ComplexMatrix::from_diagonal(&[0.5, 0.6]);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = ComplexMatrix::from_diagonal(&[1.1, -0.1]);
        assert!(DensityMatrix::new(negative).is_err());
        // Within the PSD tolerance.
        let marginal = ComplexMatrix::from_diagonal(&[1.0 + 5e-10, -5e-10]);
        assert!(DensityMatrix::new(marginal).is_ok());
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        assert!((DensityMatrix::maximally_mixed(4).entropy() - 2.0).abs() < 1e-12);
        assert!(PureState::phi_theta(30.0).density().entropy().abs() < 1e-9);
    }
}
