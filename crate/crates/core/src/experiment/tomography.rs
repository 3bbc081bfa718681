//! Linear-inversion state tomography with eigenvalue clipping.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianEigen, C64};
use crate::state::{DensityMatrix, PureState};

/// Relative pivot size below which the design matrix counts as singular.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomographyEntry {
    pub label: String,
    #[serde(skip)]
    pub projector: ComplexMatrix,
    /// Count or probability; only ratios matter.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomographyInput {
    dim: usize,
    entries: Vec<TomographyEntry>,
}

fn single_qubit_states() -> [(&'static str, [C64; 2]); 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| C64::new(re, im);
    [
        ("H", [c(1.0, 0.0), c(0.0, 0.0)]),
        ("V", [c(0.0, 0.0), c(1.0, 0.0)]),
        ("D", [c(r, 0.0), c(r, 0.0)]),
        ("A", [c(r, 0.0), c(-r, 0.0)]),
        ("R", [c(r, 0.0), c(0.0, r)]),
        ("L", [c(r, 0.0), c(0.0, -r)]),
    ]
}

/// The 36 product projectors `|s t><s t|` with `s, t ∈ {H, V, D, A, R, L}`.
pub fn two_qubit_projectors() -> Vec<(String, ComplexMatrix)> {
    let singles = single_qubit_states();
    let mut out = Vec::with_capacity(36);
    for (la, a) in &singles {
        for (lb, b) in &singles {
            let v: Vec<C64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
            out.push((format!("{la}{lb}"), ComplexMatrix::outer(&v)));
        }
    }
    out
}

impl TomographyInput {
    pub fn new(dim: usize, entries: Vec<TomographyEntry>) -> Result<Self> {
        for e in &entries {
            if e.projector.rows() != dim || !e.projector.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.projector.rows(),
                });
            }
            if !e.value.is_finite() || e.value < 0.0 {
                return Err(Error::InvalidCounts(format!("{}: {}", e.label, e.value)));
            }
        }
        if entries.len() < dim * dim {
            return Err(Error::RankDeficient {
                rank: entries.len(),
                needed: dim * dim,
            });
        }
        Ok(Self { dim, entries })
    }

    /// Exact Born probabilities of `rho` on `projectors`.
    pub fn from_state(rho: &DensityMatrix, projectors: &[(String, ComplexMatrix)]) -> Result<Self> {
        let effects: Vec<ComplexMatrix> = projectors.iter().map(|(_, p)| p.clone()).collect();
        let probs = born_values(rho, &effects)?;
        let entries = projectors
            .iter()
            .zip(probs)
            .map(|((label, p), value)| TomographyEntry {
                label: label.clone(),
                projector: p.clone(),
                value,
            })
            .collect();
        Self::new(rho.dim(), entries)
    }

    /// Poisson counts with mean `mean_counts` averaged over the projectors,
    /// each proportional to its Born probability.
    pub fn simulate_counts(
        rho: &DensityMatrix,
        projectors: &[(String, ComplexMatrix)],
        mean_counts: f64,
        seed: u64,
    ) -> Result<Self> {
        let exact = Self::from_state(rho, projectors)?;
        let total: f64 = exact.entries.iter().map(|e| e.value).sum();
        let scale = mean_counts * exact.entries.len() as f64 / total;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = exact.entries;
        for e in &mut entries {
            let lambda = e.value * scale;
            e.value = if lambda > 0.0 {
                Poisson::new(lambda)
                    .map_err(|err| Error::InvalidCounts(err.to_string()))?
                    .sample(&mut rng)
            } else {
                0.0
            };
        }
        Self::new(rho.dim(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[TomographyEntry] {
        &self.entries
    }
}

fn born_values(rho: &DensityMatrix, effects: &[ComplexMatrix]) -> Result<Vec<f64>> {
    effects
        .iter()
        .map(|p| {
            if p.rows() != rho.dim() {
                return Err(Error::DimensionMismatch {
                    expected: rho.dim(),
                    found: p.rows(),
                });
            }
            Ok(rho.matrix().trace_product(p).re.max(0.0))
        })
        .collect()
}

/// Real Hermitian basis: `E_kk`, `E_kl + E_lk`, `i(E_lk - E_kl)` for `k < l`.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, k)] = C64::new(1.0, 0.0);
        out.push(m);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(k, l)] = C64::new(1.0, 0.0);
            re[(l, k)] = C64::new(1.0, 0.0);
            out.push(re);
            let mut im = ComplexMatrix::zeros(d, d);
            im[(k, l)] = C64::new(0.0, -1.0);
            im[(l, k)] = C64::new(0.0, 1.0);
            out.push(im);
        }
    }
    out
}

/// Solves `G x = r` for symmetric `G` by Gaussian elimination with full
/// pivoting, reporting the numerical rank when it falls short.
fn solve_symmetric(mut g: Vec<Vec<f64>>, mut r: Vec<f64>) -> Result<Vec<f64>> {
    let n = r.len();
    let scale = g.iter().enumerate().map(|(i, row)| row[i].abs()).fold(0.0, f64::max);
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for (i, row) in g.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().skip(k) {
                if v.abs() > best {
                    (pi, pj, best) = (i, j, v.abs());
                }
            }
        }
        if best <= RANK_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient { rank: k, needed: n });
        }
        g.swap(k, pi);
        r.swap(k, pi);
        for row in &mut g {
            row.swap(k, pj);
        }
        cols.swap(k, pj);
        for i in (k + 1)..n {
            let f = g[i][k] / g[k][k];
            if f != 0.0 {
                let (top, rest) = g.split_at_mut(i);
                for (gij, gkj) in rest[0][k..].iter_mut().zip(&top[k][k..]) {
                    *gij -= f * gkj;
                }
                r[i] -= f * r[k];
            }
        }
    }
    let mut y = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| g[k][j] * y[j]).sum();
        y[k] = (r[k] - s) / g[k][k];
    }
    let mut x = vec![0.0; n];
    for (k, &c) in cols.iter().enumerate() {
        x[c] = y[k];
    }
    Ok(x)
}

/// Least-squares Hermitian estimate, projected onto the trace-one PSD cone
/// by clipping negative eigenvalues.
pub fn tomography_reconstruct(input: &TomographyInput) -> Result<DensityMatrix> {
    let d = input.dim;
    let basis = hermitian_basis(d);
    let design: Vec<Vec<f64>> = input
        .entries
        .iter()
        .map(|e| basis.iter().map(|b| e.projector.trace_product(b).re).collect())
        .collect();
    let n = basis.len();
    let mut gram = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for (row, e) in design.iter().zip(&input.entries) {
        for i in 0..n {
            rhs[i] += row[i] * e.value;
            for j in 0..n {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    let x = solve_symmetric(gram, rhs)?;
    let mut m = ComplexMatrix::zeros(d, d);
    for (b, c) in basis.iter().zip(&x) {
        m = &m + &b.scale_real(*c);
    }
    let eig = HermitianEigen::new(&m)?;
    let clipped = eig.reconstruct_with(|v| v.max(0.0));
    let trace = clipped.trace().re;
    if trace <= 0.0 {
        return Err(Error::InvalidState("reconstruction has no positive part".into()));
    }
    DensityMatrix::new(clipped.scale_real(1.0 / trace))
}

/// `<ψ|ρ|ψ>`
pub fn pure_fidelity(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi.dim(),
        });
    }
    Ok(rho.matrix().expectation(psi.amplitudes()).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::fidelity;

    #[test]
    fn noiseless_bell_state() {
        let psi = PureState::phi_theta(45.0);
        let input = TomographyInput::from_state(&psi.density(), &two_qubit_projectors()).unwrap();
        let rho = tomography_reconstruct(&input).unwrap();
        assert!(pure_fidelity(&psi, &rho).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn maximally_mixed_round_trip() {
        let mixed = DensityMatrix::maximally_mixed(4);
        let input = TomographyInput::from_state(&mixed, &two_qubit_projectors()).unwrap();
        let rho = tomography_reconstruct(&input).unwrap();
        assert!(rho.matrix().max_abs_diff(mixed.matrix()) < 1e-12);
    }

    #[test]
    fn noisy_counts() {
        let psi = PureState::phi_theta(30.0);
        let input = TomographyInput::simulate_counts(&psi.density(), &two_qubit_projectors(), 1e4, 5).unwrap();
        let rho = tomography_reconstruct(&input).unwrap();
        assert!(fidelity(&psi.density(), &rho).unwrap() >= 0.98);
    }

    #[test]
    fn incomplete_sets_are_rejected() {
        let all = two_qubit_projectors();
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            TomographyInput::from_state(&rho, &all[..10]),
            Err(Error::RankDeficient { .. })
        ));
        // 16 projectors from the Z and X bases alone miss the Y correlations.
        let zx: Vec<_> = all
            .into_iter()
            .filter(|(l, _)| l.chars().all(|c| "HVDA".contains(c)))
            .collect();
        let input = TomographyInput::from_state(&rho, &zx).unwrap();
        assert!(matches!(tomography_reconstruct(&input), Err(Error::RankDeficient { .. })));
    }
}
