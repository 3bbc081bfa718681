//! Joint conditional distributions `P(a_1..a_n | x_1..x_n)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{born_unchecked, Measurement};
use crate::state::DensityMatrix;

/// Tolerance on the unit sum of each settings slice.
pub const SLICE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationTable {
    settings: Vec<usize>,
    outcomes: Vec<usize>,
    /// Settings tuples outermost, outcome tuples innermost; the last party's
    /// index varies fastest in both.
    probs: Vec<f64>,
}

fn radix_index(digits: &[usize], sizes: &[usize]) -> usize {
    digits.iter().zip(sizes).fold(0, |acc, (d, s)| acc * s + d)
}

fn radix_digits(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = index % s;
        index /= s;
    }
    out
}

impl CorrelationTable {
    pub fn new(settings: Vec<usize>, outcomes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if settings.is_empty() || settings.len() != outcomes.len() {
            return Err(Error::InvalidTable(format!(
                "{} setting counts for {} outcome counts",
                settings.len(),
                outcomes.len()
            )));
        }
        if settings.contains(&0) || outcomes.contains(&0) {
            return Err(Error::InvalidTable("zero settings or outcomes".into()));
        }
        let n_set: usize = settings.iter().product();
        let n_out: usize = outcomes.iter().product();
        if probs.len() != n_set * n_out {
            return Err(Error::InvalidTable(format!(
                "expected {} probabilities, found {}",
                n_set * n_out,
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -SLICE_TOL) {
            return Err(Error::InvalidTable(format!("invalid probability {p}")));
        }
        for (s, slice) in probs.chunks(n_out).enumerate() {
            let total: f64 = slice.iter().sum();
            if (total - 1.0).abs() > SLICE_TOL {
                return Err(Error::InvalidTable(format!(
                    "slice {:?} sums to {total}",
                    radix_digits(s, &settings)
                )));
            }
        }
        Ok(Self {
            settings,
            outcomes,
            probs,
        })
    }

    /// Builds a table from `p(outcomes, settings)`.
    pub fn from_fn(
        settings: Vec<usize>,
        outcomes: Vec<usize>,
        p: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let n_set: usize = settings.iter().product();
        let n_out: usize = outcomes.iter().product();
        let mut probs = Vec::with_capacity(n_set * n_out);
        for s in 0..n_set {
            let x = radix_digits(s, &settings);
            for o in 0..n_out {
                probs.push(p(&radix_digits(o, &outcomes), &x));
            }
        }
        Self::new(settings, outcomes, probs)
    }

    /// Born-rule table for local measurements `measurements[party][setting]`.
    pub fn from_state(rho: &DensityMatrix, measurements: &[Vec<Measurement>]) -> Result<Self> {
        if measurements.is_empty() || measurements.iter().any(Vec::is_empty) {
            return Err(Error::Empty("local measurement list"));
        }
        let settings: Vec<usize> = measurements.iter().map(Vec::len).collect();
        let mut outcomes = Vec::with_capacity(measurements.len());
        let mut dim = 1;
        for party in measurements {
            let o = party[0].outcomes();
            let d = party[0].dim();
            if party.iter().any(|m| m.outcomes() != o || m.dim() != d) {
                return Err(Error::InvalidTable(
                    "settings of one party differ in outcome count or dimension".into(),
                ));
            }
            outcomes.push(o);
            dim *= d;
        }
        if dim != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: dim,
            });
        }
        let n_set: usize = settings.iter().product();
        let mut probs = Vec::new();
        for s in 0..n_set {
            let x = radix_digits(s, &settings);
            let joint = x
                .iter()
                .enumerate()
                .map(|(party, &xi)| measurements[party][xi].clone())
                .reduce(|a, b| a.tensor(&b))
                .expect("at least one party");
            probs.extend(born_unchecked(rho.matrix(), joint.effects()));
        }
        // Clamping can leave slices a rounding error away from one.
        let n_out: usize = outcomes.iter().product();
        for slice in probs.chunks_mut(n_out) {
            let t: f64 = slice.iter().sum();
            slice.iter_mut().for_each(|p| *p /= t);
        }
        Self::new(settings, outcomes, probs)
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn n_out(&self) -> usize {
        self.outcomes.iter().product()
    }

    /// `P(a | x)`
    pub fn get(&self, a: &[usize], x: &[usize]) -> f64 {
        self.probs[radix_index(x, &self.settings) * self.n_out() + radix_index(a, &self.outcomes)]
    }

    /// Probabilities of all outcome tuples for settings `x`.
    pub fn slice(&self, x: &[usize]) -> &[f64] {
        let n = self.n_out();
        let s = radix_index(x, &self.settings);
        &self.probs[s * n..(s + 1) * n]
    }

    /// All outcome tuples in table order.
    pub fn outcome_tuples(&self) -> Vec<Vec<usize>> {
        (0..self.n_out()).map(|o| radix_digits(o, &self.outcomes)).collect()
    }

    /// All settings tuples in table order.
    pub fn setting_tuples(&self) -> Vec<Vec<usize>> {
        let n: usize = self.settings.iter().product();
        (0..n).map(|s| radix_digits(s, &self.settings)).collect()
    }

    /// Marginal distribution of the parties in `keep` (sorted ascending) for
    /// full settings `x`.
    pub fn marginal(&self, keep: &[usize], x: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = keep.iter().map(|&p| self.outcomes[p]).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        for (o, p) in self.outcome_tuples().iter().zip(self.slice(x)) {
            let digits: Vec<usize> = keep.iter().map(|&k| o[k]).collect();
            out[radix_index(&digits, &sizes)] += p;
        }
        out
    }

    /// Largest change of any party subset's marginal when the settings of
    /// the remaining parties change.
    pub fn signaling_deviation(&self) -> f64 {
        let n = self.parties();
        let mut worst: f64 = 0.0;
        for mask in 1..(1usize << n) - 1 {
            let keep: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            for x in self.setting_tuples() {
                let reference = {
                    let mut x0 = x.clone();
                    for (i, xi) in x0.iter_mut().enumerate() {
                        if mask >> i & 1 == 0 {
                            *xi = 0;
                        }
                    }
                    self.marginal(&keep, &x0)
                };
                for (a, b) in self.marginal(&keep, &x).iter().zip(&reference) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }

    pub fn is_no_signaling(&self, tol: f64) -> bool {
        self.signaling_deviation() <= tol
    }

    /// `Σ_i w_i T_i` for tables of identical shape.
    pub fn mixture(tables: &[CorrelationTable], weights: &[f64]) -> Result<Self> {
        let first = tables.first().ok_or(Error::Empty("mixture"))?;
        if tables.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: tables.len(),
                right: weights.len(),
            });
        }
        let mut probs = vec![0.0; first.probs.len()];
        for (t, w) in tables.iter().zip(weights) {
            if t.settings != first.settings || t.outcomes != first.outcomes {
                return Err(Error::InvalidTable("mixture of differently shaped tables".into()));
            }
            for (acc, p) in probs.iter_mut().zip(&t.probs) {
                *acc += w * p;
            }
        }
        Self::new(first.settings.clone(), first.outcomes.clone(), probs)
    }

    pub(crate) fn require_shape(&self, parties: usize, settings: usize, outcomes: usize) -> Result<()> {
        if self.parties() != parties
            || self.settings.iter().any(|&s| s != settings)
            || self.outcomes.iter().any(|&o| o != outcomes)
        {
            return Err(Error::InvalidTable(format!(
                "expected {parties} parties with {settings} settings and {outcomes} outcomes, found settings {:?} outcomes {:?}",
                self.settings, self.outcomes
            )));
        }
        Ok(())
    }
}

/// All deterministic local strategies for `parties` parties with two
/// settings and two outcomes: party `i` answers `(s_i >> x) & 1`.
pub fn deterministic_boxes(parties: usize) -> Vec<CorrelationTable> {
    let strategies = 1usize << (2 * parties);
    (0..strategies)
        .map(|code| {
            let answer = |party: usize, x: usize| (code >> (2 * party + x)) & 1;
            CorrelationTable::from_fn(vec![2; parties], vec![2; parties], |a, x| {
                let hit = a.iter().zip(x).enumerate().all(|(i, (&ai, &xi))| ai == answer(i, xi));
                if hit {
                    1.0
                } else {
                    0.0
                }
            })
            .expect("deterministic boxes are normalized")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::Observable;
    use crate::state::PureState;

    #[test]
    fn indexing_round_trip() {
        let sizes = [2, 3, 2];
        for i in 0..12 {
            assert_eq!(radix_index(&radix_digits(i, &sizes), &sizes), i);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(CorrelationTable::new(vec![1], vec![2], vec![0.5, 0.6]).is_err());
        assert!(CorrelationTable::new(vec![1], vec![2], vec![0.5]).is_err());
        assert!(CorrelationTable::new(vec![1, 1], vec![2], vec![1.0, 0.0]).is_err());
        assert!(CorrelationTable::new(vec![1], vec![2], vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn bell_state_table() {
        let z = Observable::pauli_z().measurement();
        let x = Observable::pauli_x().measurement();
        let rho = PureState::phi_theta(45.0).density();
        let t = CorrelationTable::from_state(&rho, &[vec![z.clone(), x.clone()], vec![z, x]]).unwrap();
        assert!((t.get(&[0, 0], &[0, 0]) - 0.5).abs() < 1e-12);
        assert!(t.get(&[0, 1], &[0, 0]).abs() < 1e-12);
        assert!((t.get(&[0, 0], &[0, 1]) - 0.25).abs() < 1e-12);
        assert!(t.is_no_signaling(1e-12));
        assert_eq!(t.marginal(&[0], &[1, 0]).len(), 2);
    }

    #[test]
    fn signaling_box_is_detected() {
        // Bob's output copies Alice's setting.
        let t = CorrelationTable::from_fn(vec![2, 2], vec![2, 2], |a, x| {
            if a[0] == 0 && a[1] == x[0] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(!t.is_no_signaling(1e-9));
        assert_eq!(t.signaling_deviation(), 1.0);
    }

    #[test]
    fn deterministic_box_counts() {
        let boxes = deterministic_boxes(2);
        assert_eq!(boxes.len(), 16);
        assert!(boxes.iter().all(|b| b.is_no_signaling(0.0)));
        assert_eq!(deterministic_boxes(3).len(), 64);
    }
}
