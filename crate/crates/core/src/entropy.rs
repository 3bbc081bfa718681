//! Classical entropies of probability vectors, in bits.

use serde::Serialize;

use crate::error::{Error, Result};

/// Floor applied inside logarithms.
pub const LOG_FLOOR: f64 = 1e-15;

/// `-p log2 p` with `0 log 0 = 0`.
pub fn eta(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.max(LOG_FLOOR).log2()
    }
}

/// `p log2 p` with the same conventions as [`eta`].
pub fn plogp(p: f64) -> f64 {
    -eta(p)
}

pub fn shannon(p: &[f64]) -> f64 {
    p.iter().copied().map(eta).sum()
}

pub fn binary_entropy(p: f64) -> f64 {
    eta(p) + eta(1.0 - p)
}

pub fn renyi(p: &[f64], k: f64) -> f64 {
    let s: f64 = p.iter().map(|&x| x.max(0.0).powf(k)).sum();
    s.max(LOG_FLOOR).log2() / (1.0 - k)
}

pub fn tsallis(p: &[f64], k: f64) -> f64 {
    let s: f64 = p.iter().map(|&x| x.max(0.0).powf(k)).sum();
    (s - 1.0) / (1.0 - k)
}

/// Rescales `p` to unit sum after checking entries are nonnegative and the
/// sum is within `slack` of 1.
pub fn renormalize(p: &[f64], slack: f64) -> Result<Vec<f64>> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution(format!("{p:?} has negative or non-finite entries")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > slack {
        return Err(Error::InvalidDistribution(format!("{p:?} sums to {total}")));
    }
    Ok(p.iter().map(|x| x / total).collect())
}

/// Entropy family with its order parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum EntropyKind {
    Shannon,
    Renyi(f64),
    Tsallis(f64),
}

impl EntropyKind {
    pub fn new_renyi(k: f64) -> Result<Self> {
        check_order(k)?;
        Ok(Self::Renyi(k))
    }

    pub fn new_tsallis(k: f64) -> Result<Self> {
        check_order(k)?;
        Ok(Self::Tsallis(k))
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        match *self {
            Self::Shannon => shannon(p),
            Self::Renyi(k) => renyi(p, k),
            Self::Tsallis(k) => tsallis(p, k),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Shannon => "shannon".into(),
            Self::Renyi(k) => format!("renyi_{k}"),
            Self::Tsallis(k) => format!("tsallis_{k}"),
        }
    }
}

fn check_order(k: f64) -> Result<()> {
    if !k.is_finite() || k <= 0.0 || (k - 1.0).abs() < 1e-12 {
        return Err(Error::Unsupported(format!(
            "entropy order k = {k} (need k > 0, k != 1)"
        )));
    }
    Ok(())
}
