//! Uncertainty functionals `f(p_a, q_b, ...)` and their evaluation tables.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::entropy::{eta, plogp};
use crate::error::{Error, Result};
use crate::majorization::BoundVector;

type CustomFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// `sum_i -p_i log p_i`
    Shannon,
    /// `prod_i p_i^k`
    RenyiProduct(f64),
    /// `sum_i p_i^k`
    TsallisSum(f64),
    /// `-p log p + q log q`
    CoherenceGap,
    Custom(CustomFn),
}

/// A named map from one probability per measurement to a real number.
#[derive(Clone)]
pub struct UncertaintyFunctional {
    name: String,
    arity: usize,
    kind: Kind,
}

impl UncertaintyFunctional {
    pub fn shannon_pair() -> Self {
        Self::shannon_sum(2)
    }

    pub fn renyi_pair(k: f64) -> Self {
        Self::renyi_product(2, k)
    }

    pub fn tsallis_pair(k: f64) -> Self {
        Self::tsallis_sum(2, k)
    }

    /// `f(p, q) = -p log p + q log q`. The first argument is the
    /// computational-basis probability, the second the probability of the
    /// measurement being optimized.
    pub fn coherence() -> Self {
        Self {
            name: "coherence".into(),
            arity: 2,
            kind: Kind::CoherenceGap,
        }
    }

    pub fn shannon_sum(arity: usize) -> Self {
        Self {
            name: if arity == 2 { "shannon".into() } else { format!("shannon_x{arity}") },
            arity,
            kind: Kind::Shannon,
        }
    }

    pub fn renyi_product(arity: usize, k: f64) -> Self {
        Self {
            name: if arity == 2 { format!("renyi_{k}") } else { format!("renyi_{k}_x{arity}") },
            arity,
            kind: Kind::RenyiProduct(k),
        }
    }

    pub fn tsallis_sum(arity: usize, k: f64) -> Self {
        Self {
            name: if arity == 2 { format!("tsallis_{k}") } else { format!("tsallis_{k}_x{arity}") },
            arity,
            kind: Kind::TsallisSum(k),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        arity: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            arity,
            kind: Kind::Custom(Arc::new(f)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Rényi/Tsallis index, if any.
    pub fn order(&self) -> Option<f64> {
        match self.kind {
            Kind::RenyiProduct(k) | Kind::TsallisSum(k) => Some(k),
            _ => None,
        }
    }

    pub fn eval(&self, probs: &[f64]) -> Result<f64> {
        if probs.len() != self.arity {
            return Err(Error::ArityMismatch {
                name: self.name.clone(),
                expected: self.arity,
                found: probs.len(),
            });
        }
        Ok(self.eval_unchecked(probs))
    }

    pub(crate) fn eval_unchecked(&self, probs: &[f64]) -> f64 {
        match &self.kind {
            Kind::Shannon => probs.iter().copied().map(eta).sum(),
            Kind::RenyiProduct(k) => probs.iter().map(|p| p.max(0.0).powf(*k)).product(),
            Kind::TsallisSum(k) => probs.iter().map(|p| p.max(0.0).powf(*k)).sum(),
            Kind::CoherenceGap => eta(probs[0]) + plogp(probs[1]),
            Kind::Custom(f) => f(probs),
        }
    }
}

impl fmt::Debug for UncertaintyFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UncertaintyFunctional")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish()
    }
}

/// Functionals looked up by unique name.
#[derive(Clone, Debug, Default)]
pub struct FunctionalRegistry {
    entries: BTreeMap<String, UncertaintyFunctional>,
}

impl FunctionalRegistry {
    /// Shannon, Rényi (k = 2), Tsallis (k = 2) and coherence pair functionals.
    pub fn with_defaults() -> Self {
        let mut r = Self::default();
        for f in [
            UncertaintyFunctional::shannon_pair(),
            UncertaintyFunctional::renyi_pair(2.0),
            UncertaintyFunctional::tsallis_pair(2.0),
            UncertaintyFunctional::coherence(),
        ] {
            r.register(f).expect("default names are unique");
        }
        r
    }

    pub fn register(&mut self, f: UncertaintyFunctional) -> Result<()> {
        if self.entries.contains_key(f.name()) {
            return Err(Error::DuplicateFunctional(f.name().to_string()));
        }
        self.entries.insert(f.name().to_string(), f);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&UncertaintyFunctional> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Row-major table `[f(p_1, q_1), ..., f(p_n, q_m)]`.
pub fn eval_f_table(f: &UncertaintyFunctional, pa: &[f64], pb: &[f64]) -> Result<BoundVector> {
    if f.arity() != 2 {
        return Err(Error::ArityMismatch {
            name: f.name().to_string(),
            expected: f.arity(),
            found: 2,
        });
    }
    Ok(BoundVector::raw(table_values(f, &[pa.to_vec(), pb.to_vec()])))
}

/// Table over the full outcome grid of several measurements; the last
/// measurement's outcome varies fastest.
pub fn eval_f_grid(f: &UncertaintyFunctional, dists: &[Vec<f64>]) -> Result<BoundVector> {
    if f.arity() != dists.len() {
        return Err(Error::ArityMismatch {
            name: f.name().to_string(),
            expected: f.arity(),
            found: dists.len(),
        });
    }
    Ok(BoundVector::raw(table_values(f, dists)))
}

pub(crate) fn table_values(f: &UncertaintyFunctional, dists: &[Vec<f64>]) -> Vec<f64> {
    let sizes: Vec<usize> = dists.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; dists.len()];
    let mut args = vec![0.0; dists.len()];
    for _ in 0..total {
        for (j, d) in dists.iter().enumerate() {
            args[j] = d[idx[j]];
        }
        out.push(f.eval_unchecked(&args));
        for j in (0..idx.len()).rev() {
            idx[j] += 1;
            if idx[j] < sizes[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    out
}
