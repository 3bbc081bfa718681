//! Dense complex matrices for the small dimensions used throughout the crate
//! (at most 8x8), plus a cyclic Jacobi eigensolver for Hermitian matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting NaN/Inf entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Applies a real function to the spectrum of a Hermitian matrix.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = HermitianEigen::new(self)?;
        Ok(eig.reconstruct_with(f))
    }

    /// Real part of `<v|self|v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.rows {
            let mut row = ZERO;
            for j in 0..self.cols {
                row += self[(i, j)] * v[j];
            }
            acc += v[i].conj() * row;
        }
        acc
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut m = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in ascending order; `vectors` holds the matching
/// orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

impl HermitianEigen {
    /// Cyclic Jacobi: each rotation first rotates the phase of `h_pq` away and
    /// then applies a real Givens rotation that annihilates it.
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        let n = h.require_square()?;
        let mut a = h.clone();
        // Symmetrize to remove rounding asymmetry from callers.
        for i in 0..n {
            a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        let mut v = ComplexMatrix::identity(n);
        let scale = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= 1e-300 {
                        continue;
                    }
                    let phase = apq / mag; // e^{i alpha}
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = (aqq - app) / (2.0 * mag);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // U = D P with D_qq = e^{-i alpha}:
                    // U_pp = c, U_pq = s, U_qp = -s e^{-i alpha}, U_qq = c e^{-i alpha}
                    let e_m = phase.conj();
                    let upp = C64::new(c, 0.0);
                    let upq = C64::new(s, 0.0);
                    let uqp = e_m * (-s);
                    let uqq = e_m * c;
                    // A <- A U (columns p, q)
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * upp + akq * uqp;
                        a[(k, q)] = akp * upq + akq * uqq;
                    }
                    // A <- U^dagger A (rows p, q)
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                    }
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                    // V <- V U
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * upp + vkq * uqp;
                        v[(k, q)] = vkp * upq + vkq * uqq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vectors = ComplexMatrix::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new)] = v[(k, old)];
            }
        }
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `sum_i f(lambda_i) |v_i><v_i|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    m[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        m
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Pauli matrices in the computational basis.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("static")
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).expect("static")
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("static")
    }

    /// `[I, X, Y, Z]`.
    pub fn all() -> [ComplexMatrix; 4] {
        [ComplexMatrix::identity(2), x(), y(), z()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian() {
        for n in 1..=8 {
            for seed in 0..10 {
                let h = random_hermitian(n, seed);
                let eig = HermitianEigen::new(&h).unwrap();
                assert!(eig.reconstruct().max_abs_diff(&h) < 1e-12, "n={n} seed={seed}");
                let vv = &eig.vectors.adjoint() * &eig.vectors;
                assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
                assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn pauli_spectra() {
        for p in [pauli::x(), pauli::y(), pauli::z()] {
            let eig = HermitianEigen::new(&p).unwrap();
            assert!((eig.values[0] + 1.0).abs() < 1e-14);
            assert!((eig.values[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let eig = HermitianEigen::new(&ComplexMatrix::identity(4)).unwrap();
        assert!(eig.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn rejects_nan() {
        assert!(matches!(
            ComplexMatrix::from_real(1, 1, &[f64::NAN]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn non_square_eigen_fails() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(HermitianEigen::new(&m), Err(Error::NotSquare { .. })));
    }
}
