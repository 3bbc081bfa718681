//! Derivative-free minimization: Nelder–Mead with grid-seeded multi-start.

use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Simplex size and value spread below which the search stops.
    pub tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

impl NelderMead {
    /// Minimizes `f` starting from an axis-aligned simplex of size `step`.
    pub fn minimize<F>(&self, f: &F, x0: &[f64], step: f64) -> OptResult
    where
        F: Fn(&[f64]) -> f64 + ?Sized,
    {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let v = f(&x);
            simplex.push((x, v));
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if self.is_converged(&simplex) {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(ALPHA);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = along(GAMMA);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(RHO);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-RHO);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&best) {
                    *xi = bi + SIGMA * (*xi - bi);
                }
                *v = f(x);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        OptResult {
            x,
            value,
            iterations,
            converged,
        }
    }

    fn is_converged(&self, simplex: &[(Vec<f64>, f64)]) -> bool {
        let (best_x, best_f) = &simplex[0];
        let spread = simplex.iter().map(|(_, v)| (v - best_f).abs()).fold(0.0, f64::max);
        let size = simplex
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best_x).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        spread <= self.tol && size <= self.tol
    }
}

/// Grid screening followed by Nelder–Mead from the best seeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiStart {
    pub local: NelderMead,
    /// Number of best grid seeds refined locally.
    pub top: usize,
    /// Extra Nelder–Mead restarts from each refined point.
    pub restarts: usize,
}

impl Default for MultiStart {
    fn default() -> Self {
        Self {
            local: NelderMead::default(),
            top: 5,
            restarts: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiStartResult {
    pub best: OptResult,
    /// Index of the grid seed whose refinement won.
    pub seed_index: usize,
    /// Best value reached from each refined seed, in refinement order.
    pub trace: Vec<f64>,
}

impl MultiStart {
    /// Minimizes `f`; grid evaluation and refinements run in parallel but the
    /// reduction is ordered (ties go to the lowest seed index), so the result
    /// matches a sequential run bit for bit.
    pub fn minimize<F>(&self, f: &F, seeds: &[Vec<f64>], step: f64) -> Option<MultiStartResult>
    where
        F: Fn(&[f64]) -> f64 + Sync + ?Sized,
    {
        if seeds.is_empty() {
            return None;
        }
        let values: Vec<f64> = seeds.par_iter().map(|x| f(x)).collect();
        let mut order: Vec<usize> = (0..seeds.len()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        order.truncate(self.top.max(1));

        let refined: Vec<(usize, OptResult)> = order
            .par_iter()
            .map(|&i| {
                let mut r = self.local.minimize(f, &seeds[i], step);
                let mut s = step;
                for _ in 0..self.restarts {
                    s *= 0.1;
                    let again = self.local.minimize(f, &r.x, s.max(1e-6));
                    let iterations = r.iterations + again.iterations;
                    if again.value <= r.value {
                        r = again;
                    }
                    r.iterations = iterations;
                }
                // Never return worse than the grid point itself.
                if values[i] < r.value {
                    r = OptResult {
                        x: seeds[i].clone(),
                        value: values[i],
                        iterations: r.iterations,
                        converged: r.converged,
                    };
                }
                (i, r)
            })
            .collect();

        let trace = refined.iter().map(|(_, r)| r.value).collect();
        let (seed_index, best) = refined
            .into_iter()
            .reduce(|a, b| {
                if b.1.value < a.1.value || (b.1.value == a.1.value && b.0 < a.0) {
                    b
                } else {
                    a
                }
            })
            .expect("at least one seed");
        Some(MultiStartResult {
            best,
            seed_index,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let nm = NelderMead {
            max_iter: 5000,
            tol: 1e-12,
        };
        let r = nm.minimize(&f, &[-1.2, 1.0], 0.5);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn one_dimensional() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2);
        let r = NelderMead::default().minimize(&f, &[0.0], 0.1);
        assert!((r.x[0] - 0.3).abs() < 1e-5);
    }

    #[test]
    fn multistart_escapes_local_minimum() {
        // Double well with the deeper minimum at x = 2.
        let f = |x: &[f64]| (x[0] * x[0] - 4.0).powi(2) * 0.1 - x[0] * 0.5;
        let seeds: Vec<Vec<f64>> = (-30..=30).map(|i| vec![i as f64 * 0.1]).collect();
        let r = MultiStart::default().minimize(&f, &seeds, 0.05).unwrap();
        assert!(r.best.x[0] > 1.5);
    }

    #[test]
    fn empty_seeds() {
        let f = |_: &[f64]| 0.0;
        assert!(MultiStart::default().minimize(&f, &[], 0.1).is_none());
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.1).powi(2) + (x[1] + 0.2).powi(2) + (3.0 * x[0]).sin() * 0.1;
        let seeds: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()])
            .collect();
        let a = MultiStart::default().minimize(&f, &seeds, 0.1).unwrap();
        let b = MultiStart::default().minimize(&f, &seeds, 0.1).unwrap();
        assert_eq!(a, b);
    }
}
