//! Bound vectors and the prefix-sum preorder `x ≺ y`.
//!
//! `x ≺ y` holds when `sum_{j<=k} x_j <= sum_{j<=k} y_j` for `k = 1..n-1`.
//! Vectors are compared in the order given: callers decide whether an
//! inequality is stated for raw, descending or ascending arrangements. Equal
//! totals are not required.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrangement {
    Raw,
    SortedDesc,
    SortedAsc,
    SuccessiveDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundVector {
    components: Vec<f64>,
    arrangement: Arrangement,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

impl BoundVector {
    pub fn raw(components: Vec<f64>) -> Self {
        debug_assert!(components.iter().all(|x| x.is_finite()));
        Self {
            components,
            arrangement: Arrangement::Raw,
            warnings: Vec::new(),
        }
    }

    /// `[level, 0, ..., 0]`, the shape of the Bell-type bound vectors.
    pub fn leading(level: f64, len: usize) -> Self {
        let mut components = vec![0.0; len];
        components[0] = level;
        Self {
            components,
            arrangement: Arrangement::SortedDesc,
            warnings: Vec::new(),
        }
    }

    pub fn constant(value: f64, len: usize) -> Self {
        Self {
            components: vec![value; len],
            arrangement: Arrangement::SortedDesc,
            warnings: Vec::new(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::constant(0.0, len)
    }

    /// Successive differences `[l_1, l_2 - l_1, ...]` of cumulative levels.
    ///
    /// Non-monotone levels give negative components; that is allowed and
    /// recorded in [`BoundVector::warnings`].
    pub fn from_cumulative(levels: &[f64]) -> Self {
        let mut components = Vec::with_capacity(levels.len());
        let mut warnings = Vec::new();
        let mut prev = 0.0;
        for (k, &level) in levels.iter().enumerate() {
            if k > 0 && level < prev {
                warnings.push(format!(
                    "cumulative level {} ({level}) is below level {} ({prev})",
                    k + 1,
                    k
                ));
            }
            components.push(if k == 0 { level } else { level - prev });
            prev = level;
        }
        Self {
            components,
            arrangement: Arrangement::SuccessiveDifference,
            warnings,
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn arrangement(&self) -> Arrangement {
        self.arrangement
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.components.iter().sum()
    }

    pub fn prefix_sums(&self) -> Vec<f64> {
        prefix_sums(&self.components)
    }

    pub fn sort_desc(&self) -> Self {
        let mut components = self.components.clone();
        components.sort_by(|a, b| b.total_cmp(a));
        Self {
            components,
            arrangement: Arrangement::SortedDesc,
            warnings: self.warnings.clone(),
        }
    }

    pub fn sort_asc(&self) -> Self {
        let mut components = self.components.clone();
        components.sort_by(|a, b| a.total_cmp(b));
        Self {
            components,
            arrangement: Arrangement::SortedAsc,
            warnings: self.warnings.clone(),
        }
    }

    /// Tests `self ≺ other` with tolerance `tol`.
    pub fn majorized_by(&self, other: &Self, tol: f64) -> Result<bool> {
        majorizes(self, other, tol)
    }
}

pub fn prefix_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// `x ≺ y`: every prefix sum of `x` up to `n-1` is at most that of `y` plus `tol`.
pub fn majorizes(x: &BoundVector, y: &BoundVector, tol: f64) -> Result<bool> {
    Ok(prefix_margins(x, y)?.iter().all(|&m| m >= -tol))
}

/// `prefix_k(y) - prefix_k(x)` for `k = 1..n-1`; nonnegative entries mean the
/// relation holds at that prefix.
pub fn prefix_margins(x: &BoundVector, y: &BoundVector) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let px = x.prefix_sums();
    let py = y.prefix_sums();
    let n = x.len().saturating_sub(1);
    Ok((0..n).map(|k| py[k] - px[k]).collect())
}

/// Verdict of one `x ≺ y` check with its per-prefix margins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationCheck {
    pub holds: bool,
    pub margins: Vec<f64>,
    pub min_margin: f64,
}

impl MajorizationCheck {
    pub fn evaluate(x: &BoundVector, y: &BoundVector, tol: f64) -> Result<Self> {
        let margins = prefix_margins(x, y)?;
        let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            holds: margins.iter().all(|&m| m >= -tol),
            margins,
            min_margin,
        })
    }
}

/// Sum of the `k` largest values.
pub fn top_k_sum(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.iter().take(k).sum()
}

/// Sum of the `k` smallest values.
pub fn bottom_k_sum(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v.iter().take(k).sum()
}

/// Indices of the `k` largest values in ascending index order; ties go to
/// the lower index.
pub fn top_k_subset(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Indices of the `k` smallest values in ascending index order.
pub fn bottom_k_subset(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// All `k`-subset extremes at once: `(max_k, min_k)` for `k = 1..n`.
pub fn subset_extremes(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let top = prefix_sums(&v);
    v.reverse();
    let bottom = prefix_sums(&v);
    (top, bottom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(v: &[f64]) -> BoundVector {
        BoundVector::raw(v.to_vec())
    }

    #[test]
    fn sorting() {
        let v = bv(&[0.2, 0.9, 0.5]);
        assert_eq!(v.sort_desc().components(), &[0.9, 0.5, 0.2]);
        assert_eq!(v.sort_asc().components(), &[0.2, 0.5, 0.9]);
        assert_eq!(bv(&[1.0, 1.0, 1.0]).sort_desc().components(), &[1.0, 1.0, 1.0]);
        let chsh = bv(&[1.2071, -0.2071, 1.2071, -0.2071]).sort_desc();
        assert_eq!(chsh.components(), &[1.2071, 1.2071, -0.2071, -0.2071]);
        assert_eq!(chsh.arrangement(), Arrangement::SortedDesc);
    }

    #[test]
    fn basic_order() {
        assert!(majorizes(&bv(&[0.5, 0.5]), &bv(&[1.0, 0.0]), 0.0).unwrap());
        assert!(!majorizes(&bv(&[1.0, 0.0]), &bv(&[0.5, 0.5]), 0.0).unwrap());
    }

    #[test]
    fn chsh_sorted_vector_is_not_below_classical() {
        let f = bv(&[1.2071, 1.2071, -0.2071, -0.2071]);
        let c = BoundVector::leading(2.0, 4);
        let check = MajorizationCheck::evaluate(&f, &c, DEFAULT_TOL).unwrap();
        assert!(!check.holds);
        assert!((check.margins[1] - (2.0 - 2.4142)).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            majorizes(&bv(&[1.0]), &bv(&[1.0, 0.0]), 0.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(BoundVector::from_cumulative(&[1.0, 2.0, 3.0]).components(), &[1.0, 1.0, 1.0]);
        let c = BoundVector::from_cumulative(&[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(c.components(), &[2.0, 0.0, 0.0, 0.0]);
        assert!(c.warnings().is_empty());
    }

    #[test]
    fn non_monotone_levels_warn() {
        let v = BoundVector::from_cumulative(&[1.0, 0.5, 2.0]);
        assert_eq!(v.components(), &[1.0, -0.5, 1.5]);
        assert_eq!(v.warnings().len(), 1);
    }

    #[test]
    fn total_sum_is_not_compared() {
        // prefix k = 1..n-1 only
        assert!(majorizes(&bv(&[1.0, 5.0]), &bv(&[1.0, 0.0]), 0.0).unwrap());
    }

    #[test]
    fn subset_extremes_match_helpers() {
        let v = [0.3, -1.0, 2.0, 0.7];
        let (top, bottom) = subset_extremes(&v);
        for k in 1..=4 {
            assert!((top[k - 1] - top_k_sum(&v, k)).abs() < 1e-15);
            assert!((bottom[k - 1] - bottom_k_sum(&v, k)).abs() < 1e-15);
        }
    }
}
