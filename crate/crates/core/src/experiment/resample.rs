//! Poisson resampling of counts.
//!
//! Resample `i` draws from a ChaCha8 stream selected by `i`, so the result
//! does not depend on how rayon splits the work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const MIN_SAMPLES: usize = 1_000;

/// Redraws every count from `Poisson(count)` `n_samples` times and evaluates
/// `statistic` on each redraw, in resample order.
pub fn resample_with<T, F>(counts: &[u64], n_samples: usize, seed: u64, statistic: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[u64]) -> Result<T> + Sync,
{
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidCounts(format!(
            "{n_samples} resamples requested, at least {MIN_SAMPLES} required"
        )));
    }
    let laws: Vec<Option<Poisson<f64>>> = counts
        .iter()
        .map(|&c| {
            if c == 0 {
                Ok(None)
            } else {
                Poisson::new(c as f64)
                    .map(Some)
                    .map_err(|e| Error::InvalidCounts(e.to_string()))
            }
        })
        .collect::<Result<_>>()?;
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let draw: Vec<u64> = laws
                .iter()
                .map(|law| law.as_ref().map_or(0, |p| p.sample(&mut rng) as u64))
                .collect();
            statistic(&draw)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResampleStats {
    pub n_samples: usize,
    pub mean: f64,
    /// Sample standard deviation.
    pub std: f64,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl ResampleStats {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Self {
            n_samples: values.len(),
            mean,
            std: var.sqrt(),
            values,
        }
    }

    /// Fraction of resamples with value `<= bound`.
    pub fn fraction_at_most(&self, bound: f64) -> f64 {
        self.values.iter().filter(|&&v| v <= bound).count() as f64 / self.n_samples as f64
    }
}

/// Scalar version of [`resample_with`].
pub fn poisson_resample<F>(counts: &[u64], n_samples: usize, seed: u64, statistic: F) -> Result<ResampleStats>
where
    F: Fn(&[u64]) -> Result<f64> + Sync,
{
    Ok(ResampleStats::from_values(resample_with(counts, n_samples, seed, statistic)?))
}

/// One-sided p-value of `value > bound`, estimated by resampling, and its
/// Gaussian tail `P(Z > (value - bound) / std)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PValue {
    pub resampled: f64,
    /// Either the resampled value or `< 1/n` when no resample crossed the
    /// bound.
    pub display: String,
    pub gaussian_tail: f64,
}

impl PValue {
    pub fn new(stats: &ResampleStats, value: f64, bound: f64) -> Self {
        let resampled = stats.fraction_at_most(bound);
        let display = if resampled == 0.0 {
            format!("< {:e}", 1.0 / stats.n_samples as f64)
        } else {
            format!("{resampled:e}")
        };
        let gaussian_tail = if stats.std > 0.0 {
            0.5 * libm::erfc((value - bound) / (stats.std * std::f64::consts::SQRT_2))
        } else if value > bound {
            0.0
        } else {
            1.0
        };
        Self {
            resampled,
            display,
            gaussian_tail,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(c: &[u64]) -> Result<f64> {
        Ok(c[0] as f64 / (c[0] + c[1]) as f64)
    }

    #[test]
    fn reproducible_and_centered() {
        let a = poisson_resample(&[900, 100], 2000, 3, ratio).unwrap();
        let b = poisson_resample(&[900, 100], 2000, 3, ratio).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values, b.values);
        assert!((a.mean - 0.9).abs() < 3e-3);
        // Binomial-like spread sqrt(p(1-p)/N).
        assert!((a.std - (0.09f64 / 1000.0).sqrt()).abs() < 2e-3);
    }

    #[test]
    fn zero_cells_stay_zero() {
        let v = resample_with(&[0, 5, 0], 1000, 1, |c| Ok((c[0], c[2]))).unwrap();
        assert!(v.iter().all(|&p| p == (0, 0)));
    }

    #[test]
    fn too_few_samples() {
        assert!(poisson_resample(&[1], 10, 0, |_| Ok(0.0)).is_err());
    }

    #[test]
    fn p_value_floor() {
        let stats = ResampleStats::from_values(vec![3.0, 3.1, 2.9, 3.0]);
        let p = PValue::new(&stats, 3.0, 2.0);
        assert_eq!(p.resampled, 0.0);
        assert_eq!(p.display, "< 2.5e-1");
        assert!(p.gaussian_tail < 1e-12);
    }
}
