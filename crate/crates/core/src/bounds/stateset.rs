//! State sets `D` and the outer optimization over them.
//!
//! Qubits use Bloch coordinates: a clipped 21³ lattice over the unit ball and
//! an angular grid over the pure-state sphere, each followed by Nelder–Mead
//! from the best grid seeds. Both searches run and the better value wins.
//! Larger dimensions fall back to seeded random starts over pure-state or
//! Cholesky-style `T T†` parametrizations.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::optimize::MultiStart;
use crate::state::{DensityMatrix, PureState};

#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    AllStates,
    PureStates,
    /// Products of pure states on the listed subsystems.
    SeparableProduct(Vec<usize>),
    ExplicitList(Vec<DensityMatrix>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateSet {
    dim: usize,
    kind: StateKind,
    /// Grid points per Bloch-ball axis (qubits) or per angle.
    pub grid: usize,
    /// Random starts for parametrizations without a grid.
    pub samples: usize,
    pub seed: u64,
    pub search: MultiStart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
pub struct StateOptimum {
    pub value: f64,
    pub state: DensityMatrix,
    pub converged: bool,
}

impl StateSet {
    fn with_kind(dim: usize, kind: StateKind) -> Self {
        Self {
            dim,
            kind,
            grid: 21,
            samples: 400,
            seed: 0x5eed,
            search: MultiStart::default(),
        }
    }

    pub fn all(dim: usize) -> Self {
        Self::with_kind(dim, StateKind::AllStates)
    }

    pub fn pure(dim: usize) -> Self {
        Self::with_kind(dim, StateKind::PureStates)
    }

    pub fn all_qubit() -> Self {
        Self::all(2)
    }

    pub fn pure_qubit() -> Self {
        Self::pure(2)
    }

    pub fn separable(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::EmptyStateSet);
        }
        let dim = dims.iter().product();
        let mut set = Self::with_kind(dim, StateKind::SeparableProduct(dims));
        set.grid = 8;
        Ok(set)
    }

    pub fn explicit(states: Vec<DensityMatrix>) -> Result<Self> {
        let dim = states.first().ok_or(Error::EmptyStateSet)?.dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self::with_kind(dim, StateKind::ExplicitList(states)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    /// Optimizes `objective` over the set.
    pub fn optimize<F>(&self, objective: &F, sense: Sense) -> Result<StateOptimum>
    where
        F: Fn(&DensityMatrix) -> f64 + Sync + ?Sized,
    {
        let sign = match sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut candidates = Vec::new();
        match &self.kind {
            StateKind::ExplicitList(states) => {
                let (i, v) = states
                    .iter()
                    .map(|s| sign * objective(s))
                    .enumerate()
                    .reduce(|a, b| if b.1 < a.1 { b } else { a })
                    .ok_or(Error::EmptyStateSet)?;
                return Ok(StateOptimum {
                    value: sign * v,
                    state: states[i].clone(),
                    converged: true,
                });
            }
            StateKind::AllStates if self.dim == 2 => {
                candidates.push(self.run(&BlochBall, objective, sign)?);
                candidates.push(self.run(&BlochSphere, objective, sign)?);
            }
            StateKind::PureStates if self.dim == 2 => {
                candidates.push(self.run(&BlochSphere, objective, sign)?);
            }
            StateKind::AllStates => {
                candidates.push(self.run(&MixedParam(self.dim), objective, sign)?);
                candidates.push(self.run(&PureParam(self.dim), objective, sign)?);
            }
            StateKind::PureStates => {
                candidates.push(self.run(&PureParam(self.dim), objective, sign)?);
            }
            StateKind::SeparableProduct(dims) => {
                candidates.push(self.run(&ProductParam(dims.clone()), objective, sign)?);
            }
        }
        let best = candidates
            .into_iter()
            .reduce(|a, b| if b.value < a.value { b } else { a })
            .ok_or(Error::EmptyStateSet)?;
        Ok(StateOptimum {
            value: sign * best.value,
            ..best
        })
    }

    fn run<P, F>(&self, param: &P, objective: &F, sign: f64) -> Result<StateOptimum>
    where
        P: Parametrization,
        F: Fn(&DensityMatrix) -> f64 + Sync + ?Sized,
    {
        let seeds = param.seeds(self);
        let f = |x: &[f64]| sign * objective(&param.state(x));
        let r = self
            .search
            .minimize(&f, &seeds, param.step(self))
            .ok_or(Error::EmptyStateSet)?;
        Ok(StateOptimum {
            value: r.best.value,
            state: param.state(&r.best.x),
            converged: r.best.converged,
        })
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

trait Parametrization: Sync {
    fn seeds(&self, set: &StateSet) -> Vec<Vec<f64>>;
    fn step(&self, set: &StateSet) -> f64;
    fn state(&self, x: &[f64]) -> DensityMatrix;
}

struct BlochBall;

impl Parametrization for BlochBall {
    fn seeds(&self, set: &StateSet) -> Vec<Vec<f64>> {
        let g = set.grid.max(2);
        let coord = |i: usize| -1.0 + 2.0 * i as f64 / (g - 1) as f64;
        let mut seeds = Vec::new();
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    let r = [coord(i), coord(j), coord(k)];
                    if r.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12 {
                        seeds.push(r.to_vec());
                    }
                }
            }
        }
        seeds
    }

    fn step(&self, set: &StateSet) -> f64 {
        2.0 / (set.grid.max(2) - 1) as f64
    }

    fn state(&self, x: &[f64]) -> DensityMatrix {
        let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let s = if n > 1.0 { 1.0 / n } else { 1.0 };
        DensityMatrix::from_bloch_unchecked([x[0] * s, x[1] * s, x[2] * s])
    }
}

struct BlochSphere;

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn angle_grid(g: usize) -> Vec<(f64, f64)> {
    let nt = g.max(2);
    let np = 2 * (g.max(2) - 1);
    let mut out = Vec::with_capacity(nt * np);
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        for j in 0..np {
            out.push((theta, 2.0 * PI * j as f64 / np as f64));
        }
    }
    out
}

impl Parametrization for BlochSphere {
    fn seeds(&self, set: &StateSet) -> Vec<Vec<f64>> {
        // Finer than the ball lattice: the sphere is two-dimensional.
        angle_grid(2 * set.grid)
            .into_iter()
            .map(|(t, p)| vec![t, p])
            .collect()
    }

    fn step(&self, set: &StateSet) -> f64 {
        PI / (2 * set.grid.max(2) - 1) as f64
    }

    fn state(&self, x: &[f64]) -> DensityMatrix {
        DensityMatrix::from_bloch_unchecked(sphere_point(x[0], x[1]))
    }
}

fn pure_from_params(d: usize, x: &[f64]) -> PureState {
    let amps: Vec<C64> = (0..d).map(|i| C64::new(x[2 * i], x[2 * i + 1])).collect();
    PureState::normalized(amps).unwrap_or_else(|_| PureState::basis(d, 0))
}

fn gaussian_seeds(set: &StateSet, len: usize) -> Vec<Vec<f64>> {
    let mut rng = set.rng();
    (0..set.samples.max(1))
        .map(|_| (0..len).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect()
}

struct PureParam(usize);

impl Parametrization for PureParam {
    fn seeds(&self, set: &StateSet) -> Vec<Vec<f64>> {
        gaussian_seeds(set, 2 * self.0)
    }

    fn step(&self, _: &StateSet) -> f64 {
        0.2
    }

    fn state(&self, x: &[f64]) -> DensityMatrix {
        pure_from_params(self.0, x).density()
    }
}

struct MixedParam(usize);

impl Parametrization for MixedParam {
    fn seeds(&self, set: &StateSet) -> Vec<Vec<f64>> {
        gaussian_seeds(set, 2 * self.0 * self.0)
    }

    fn step(&self, _: &StateSet) -> f64 {
        0.2
    }

    fn state(&self, x: &[f64]) -> DensityMatrix {
        let d = self.0;
        let mut t = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let k = 2 * (i * d + j);
                t[(i, j)] = C64::new(x[k], x[k + 1]);
            }
        }
        let tt = &t * &t.adjoint();
        let tr = tt.trace().re;
        if tr > 1e-300 {
            DensityMatrix::new_unchecked(tt.scale_real(1.0 / tr))
        } else {
            DensityMatrix::maximally_mixed(d)
        }
    }
}

struct ProductParam(Vec<usize>);

impl ProductParam {
    fn all_qubits(&self) -> bool {
        self.0.iter().all(|&d| d == 2)
    }

    fn param_len(&self) -> usize {
        if self.all_qubits() {
            2 * self.0.len()
        } else {
            self.0.iter().map(|d| 2 * d).sum()
        }
    }
}

impl Parametrization for ProductParam {
    fn seeds(&self, set: &StateSet) -> Vec<Vec<f64>> {
        if self.all_qubits() && self.0.len() <= 2 {
            let per = angle_grid(set.grid);
            let mut seeds = vec![Vec::new()];
            for _ in &self.0 {
                seeds = seeds
                    .into_iter()
                    .flat_map(|s| {
                        per.iter().map(move |&(t, p)| {
                            let mut v = s.clone();
                            v.extend([t, p]);
                            v
                        })
                    })
                    .collect();
            }
            seeds
        } else {
            gaussian_seeds(set, self.param_len())
        }
    }

    fn step(&self, set: &StateSet) -> f64 {
        if self.all_qubits() {
            PI / (set.grid.max(2) - 1) as f64
        } else {
            0.2
        }
    }

    fn state(&self, x: &[f64]) -> DensityMatrix {
        let mut offset = 0;
        let mut psi: Option<PureState> = None;
        for &d in &self.0 {
            let part = if self.all_qubits() {
                let (t, p) = (x[offset], x[offset + 1]);
                offset += 2;
                let (s, c) = (t / 2.0).sin_cos();
                PureState::new(vec![C64::new(c, 0.0), C64::from_polar(s, p)])
                    .expect("unit by construction")
            } else {
                let part = pure_from_params(d, &x[offset..offset + 2 * d]);
                offset += 2 * d;
                part
            };
            psi = Some(match psi {
                None => part,
                Some(acc) => acc.tensor(&part),
            });
        }
        psi.expect("nonempty dims").density()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn qubit_extremes_of_z_expectation() {
        let z = pauli::z();
        let f = |r: &DensityMatrix| r.matrix().trace_product(&z).re;
        let set = StateSet::all_qubit();
        let max = set.optimize(&f, Sense::Maximize).unwrap();
        let min = set.optimize(&f, Sense::Minimize).unwrap();
        assert!((max.value - 1.0).abs() < 1e-9);
        assert!((min.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn purity_minimum_is_interior() {
        let f = |r: &DensityMatrix| r.purity();
        let min = StateSet::all_qubit().optimize(&f, Sense::Minimize).unwrap();
        assert!((min.value - 0.5).abs() < 1e-9);
        let pure = StateSet::pure_qubit().optimize(&f, Sense::Minimize).unwrap();
        assert!((pure.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn separable_overlap_with_bell_state_is_half() {
        let bell = PureState::phi_theta(45.0).density();
        let f = |r: &DensityMatrix| r.matrix().trace_product(bell.matrix()).re;
        let set = StateSet::separable(vec![2, 2]).unwrap();
        let max = set.optimize(&f, Sense::Maximize).unwrap();
        assert!((max.value - 0.5).abs() < 1e-8, "{}", max.value);
    }

    #[test]
    fn higher_dimensional_pure_search() {
        // Max of <0|rho|0> over qutrit states is 1.
        let f = |r: &DensityMatrix| r.matrix()[(0, 0)].re;
        let max = StateSet::all(3).optimize(&f, Sense::Maximize).unwrap();
        assert!((max.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn explicit_list() {
        let states = vec![
            DensityMatrix::maximally_mixed(2),
            PureState::basis(2, 1).density(),
        ];
        let set = StateSet::explicit(states).unwrap();
        let f = |r: &DensityMatrix| r.purity();
        assert_eq!(set.optimize(&f, Sense::Maximize).unwrap().value, 1.0);
        assert!(matches!(StateSet::explicit(vec![]), Err(Error::EmptyStateSet)));
    }
}
