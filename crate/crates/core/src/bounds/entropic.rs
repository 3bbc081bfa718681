//! Lower bounds on entropy sums `H(A) + H(B)` of two qubit measurements
//! with maximal overlap `c`, and the bound sweep over `c`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use serde::Serialize;

use super::stateset::{Sense, StateSet};
use crate::entropy::EntropyKind;
use crate::error::{Error, Result};
use crate::majorization::{top_k_sum, BoundVector};
use crate::measurement::{born_unchecked, max_overlap, Measurement};
use crate::state::DensityMatrix;

/// Upper edge of the band where neither closed form of the piecewise bound
/// applies.
pub const MIDDLE_BAND_END: f64 = 0.834;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    #[serde(rename = "MU")]
    MaassenUffink,
    #[serde(rename = "VS")]
    VicenteSanchez,
    #[serde(rename = "FGG")]
    Fgg,
    #[serde(rename = "optimizer")]
    Optimizer,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::MaassenUffink,
        BoundKind::VicenteSanchez,
        BoundKind::Fgg,
        BoundKind::Optimizer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::MaassenUffink => "MU",
            BoundKind::VicenteSanchez => "VS",
            BoundKind::Fgg => "FGG",
            BoundKind::Optimizer => "optimizer",
        }
    }
}

/// Value of the piecewise bound for `1/√2 < c < 0.834`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum MiddleBand {
    /// Requests inside the band fail with [`Error::MissingMiddleBand`].
    #[default]
    Unset,
    /// `min(h1, h3)`
    Envelope,
    /// Linear interpolation through `(c, value)` points sorted by `c`.
    Table(Vec<(f64, f64)>),
}

impl MiddleBand {
    pub fn table(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidTable("at least two points required".into()));
        }
        if points.iter().any(|(c, v)| !c.is_finite() || !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidTable("repeated abscissa".into()));
        }
        Ok(Self::Table(points))
    }

    fn eval(&self, c: f64) -> Result<f64> {
        match self {
            MiddleBand::Unset => Err(Error::MissingMiddleBand(c)),
            MiddleBand::Envelope => Ok(h1(c).min(h3(c))),
            MiddleBand::Table(points) => {
                let first = points[0];
                let last = points[points.len() - 1];
                if c < first.0 || c > last.0 {
                    return Err(Error::MissingMiddleBand(c));
                }
                let i = points.partition_point(|p| p.0 <= c).clamp(1, points.len() - 1);
                let (c0, v0) = points[i - 1];
                let (c1, v1) = points[i];
                Ok(v0 + (v1 - v0) * (c - c0) / (c1 - c0))
            }
        }
    }
}

/// Settings shared by the numerical bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundConfig {
    pub middle: MiddleBand,
    /// States searched by the optimizer bound.
    pub states: StateSet,
    /// States searched for the tensor-product levels.
    pub pure_states: StateSet,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self {
            middle: MiddleBand::Envelope,
            states: StateSet::all_qubit(),
            pure_states: StateSet::pure_qubit(),
        }
    }
}

/// `-2 log c`
pub fn h1(c: f64) -> f64 {
    -2.0 * c.log2()
}

/// `-(1+c) log((1+c)/2) - (1-c) log((1-c)/2)`
pub fn h3(c: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * (x / 2.0).log2() } else { 0.0 };
    term(1.0 + c) + term(1.0 - c)
}

fn check_overlap(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0 + 1e-12) {
        return Err(Error::OverlapOutOfRange(c));
    }
    Ok(())
}

/// Piecewise Shannon bound for one pair with overlap `c ∈ (0, 1]`.
pub fn vs_pair_bound(c: f64, middle: &MiddleBand) -> Result<f64> {
    check_overlap(c)?;
    let c = c.min(1.0);
    if c <= FRAC_1_SQRT_2 + 1e-12 {
        Ok(h1(c))
    } else if c >= MIDDLE_BAND_END {
        Ok(h3(c))
    } else {
        middle.eval(c)
    }
}

/// `Z` and the real-plane basis rotated so that the maximal overlap is `c`.
pub fn qubit_pair_with_overlap(c: f64) -> Result<(Measurement, Measurement)> {
    if !(FRAC_1_SQRT_2 - 1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(Error::OverlapOutOfRange(c));
    }
    let beta = c.clamp(0.0, 1.0).acos();
    Ok((Measurement::computational(2), Measurement::phi_basis(beta)))
}

/// Tensor-product levels `Ω_k = max_ψ Σ_{k largest} (p ⊗ q)` as a
/// successive-difference vector.
pub fn fgg_vector(a: &Measurement, b: &Measurement, pure_states: &StateSet) -> Result<BoundVector> {
    let n = a.outcomes() * b.outcomes();
    let joint = |rho: &DensityMatrix| -> Vec<f64> {
        let p = born_unchecked(rho.matrix(), a.effects());
        let q = born_unchecked(rho.matrix(), b.effects());
        p.iter().flat_map(|x| q.iter().map(move |y| x * y)).collect()
    };
    let mut levels = Vec::with_capacity(n);
    for k in 1..=n {
        let best = pure_states.optimize(&|rho: &DensityMatrix| top_k_sum(&joint(rho), k), Sense::Maximize)?;
        levels.push(best.value.min(1.0));
    }
    Ok(BoundVector::from_cumulative(&levels))
}

/// Lower bound on `H(A) + H(B)` for a qubit pair with maximal overlap `c`.
pub fn entropic_lower_bound(
    kind: BoundKind,
    entropy: EntropyKind,
    c: f64,
    config: &BoundConfig,
) -> Result<f64> {
    let (a, b) = qubit_pair_with_overlap(c)?;
    pair_lower_bound(kind, entropy, &a, &b, config)
}

/// As [`entropic_lower_bound`] for explicit measurements.
pub fn pair_lower_bound(
    kind: BoundKind,
    entropy: EntropyKind,
    a: &Measurement,
    b: &Measurement,
    config: &BoundConfig,
) -> Result<f64> {
    let shannon_only = |name: &str| {
        Error::Unsupported(format!("{name} bound is defined for Shannon entropy only"))
    };
    match kind {
        BoundKind::MaassenUffink => match entropy {
            EntropyKind::Shannon => Ok(h1(max_overlap(a, b)?).max(0.0)),
            _ => Err(shannon_only("MU")),
        },
        BoundKind::VicenteSanchez => match entropy {
            EntropyKind::Shannon => vs_pair_bound(max_overlap(a, b)?, &config.middle).map(|v| v.max(0.0)),
            _ => Err(shannon_only("VS")),
        },
        BoundKind::Fgg => {
            if let EntropyKind::Tsallis(k) = entropy {
                if k <= 1.0 {
                    return Err(Error::Unsupported(format!(
                        "tensor-product bound needs Tsallis order above 1, got {k}"
                    )));
                }
            }
            let omega = fgg_vector(a, b, &config.pure_states)?;
            let w: Vec<f64> = omega.components().iter().map(|x| x.max(0.0)).collect();
            Ok(entropy.eval(&w).max(0.0))
        }
        BoundKind::Optimizer => {
            let total = |rho: &DensityMatrix| {
                entropy.eval(&born_unchecked(rho.matrix(), a.effects()))
                    + entropy.eval(&born_unchecked(rho.matrix(), b.effects()))
            };
            Ok(config.states.optimize(&total, Sense::Minimize)?.value)
        }
    }
}

/// `Σ_i H(A_i) >= (1/(m-1)) Σ_{i<j} h(c_ij)` with the piecewise pair bound.
pub fn pairwise_sum_bound(measurements: &[Measurement], middle: &MiddleBand) -> Result<f64> {
    let m = measurements.len();
    if m < 2 {
        return Err(Error::Unsupported("at least two measurements required".into()));
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            total += vs_pair_bound(max_overlap(&measurements[i], &measurements[j])?, middle)?;
        }
    }
    Ok(total / (m - 1) as f64)
}

/// `n` evenly spaced overlaps from `1/√2` to `1`.
pub fn overlap_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![FRAC_1_SQRT_2],
        _ => (0..n)
            .map(|i| FRAC_1_SQRT_2 + (1.0 - FRAC_1_SQRT_2) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub entropy: String,
    pub c: f64,
    #[serde(rename = "MU")]
    pub mu: Option<f64>,
    #[serde(rename = "VS")]
    pub vs: Option<f64>,
    #[serde(rename = "FGG")]
    pub fgg: Option<f64>,
    pub optimizer: f64,
}

/// All four bounds at each overlap; bounds undefined for `entropy` are `None`.
pub fn sweep(entropy: EntropyKind, cs: &[f64], config: &BoundConfig) -> Result<Vec<SweepRow>> {
    let optional = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    };
    cs.iter()
        .map(|&c| {
            Ok(SweepRow {
                entropy: entropy.name(),
                c,
                mu: optional(entropic_lower_bound(BoundKind::MaassenUffink, entropy, c, config))?,
                vs: optional(entropic_lower_bound(BoundKind::VicenteSanchez, entropy, c, config))?,
                fgg: optional(entropic_lower_bound(BoundKind::Fgg, entropy, c, config))?,
                optimizer: entropic_lower_bound(BoundKind::Optimizer, entropy, c, config)?,
            })
        })
        .collect()
}

/// Writes rows as CSV with columns `entropy,c,MU,VS,FGG,optimizer`; missing
/// bounds are written as `NA`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.10}"));
    w.write_record(["entropy", "c", "MU", "VS", "FGG", "optimizer"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.entropy.clone(),
            format!("{:.10}", r.c),
            cell(r.mu),
            cell(r.vs),
            cell(r.fgg),
            format!("{:.10}", r.optimizer),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((h1(FRAC_1_SQRT_2) - 1.0).abs() < 1e-15);
        assert_eq!(h1(1.0), 0.0);
        // 2 H_bin((1+c)/2)
        for c in [0.75, 0.834, 0.9, 0.99] {
            let p: f64 = (1.0 + c) / 2.0;
            let hb = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
            assert!((h3(c) - 2.0 * hb).abs() < 1e-12);
        }
        assert_eq!(h3(1.0), 0.0);
    }

    #[test]
    fn middle_band_needs_configuration() {
        assert!(matches!(
            vs_pair_bound(0.8, &MiddleBand::Unset),
            Err(Error::MissingMiddleBand(_))
        ));
        assert_eq!(vs_pair_bound(0.8, &MiddleBand::Envelope).unwrap(), h1(0.8));
        let t = MiddleBand::table(vec![(0.834, 0.8), (0.7, 1.0)]).unwrap();
        let mid = vs_pair_bound(0.767, &t).unwrap();
        assert!((mid - 0.9).abs() < 1e-12);
        assert!(matches!(
            vs_pair_bound(0.72, &MiddleBand::table(vec![(0.75, 1.0), (0.8, 0.9)]).unwrap()),
            Err(Error::MissingMiddleBand(_))
        ));
        assert!(MiddleBand::table(vec![(0.8, 1.0)]).is_err());
        assert_eq!(vs_pair_bound(0.5, &MiddleBand::Unset).unwrap(), 2.0);
        assert_eq!(vs_pair_bound(0.9, &MiddleBand::Unset).unwrap(), h3(0.9));
    }

    #[test]
    fn overlap_pair_is_exact() {
        for c in [FRAC_1_SQRT_2, 0.8, 0.95, 1.0] {
            let (a, b) = qubit_pair_with_overlap(c).unwrap();
            assert!((max_overlap(&a, &b).unwrap() - c).abs() < 1e-12);
        }
        assert!(qubit_pair_with_overlap(0.5).is_err());
    }

    #[test]
    fn mu_is_shannon_only() {
        let cfg = BoundConfig::default();
        assert!(matches!(
            entropic_lower_bound(BoundKind::MaassenUffink, EntropyKind::Renyi(2.0), 0.8, &cfg),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            entropic_lower_bound(BoundKind::Fgg, EntropyKind::Tsallis(0.5), 0.8, &cfg),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn commuting_pair_has_zero_bounds() {
        let cfg = BoundConfig::default();
        for kind in BoundKind::ALL {
            let v = entropic_lower_bound(kind, EntropyKind::Shannon, 1.0, &cfg).unwrap();
            assert!(v.abs() < 1e-6, "{kind:?} {v}");
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = overlap_grid(50);
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], FRAC_1_SQRT_2);
        assert_eq!(g[49], 1.0);
    }

    #[test]
    fn csv_marks_missing_cells() {
        let rows = vec![SweepRow {
            entropy: "renyi_2".into(),
            c: 1.0,
            mu: None,
            vs: None,
            fgg: Some(0.0),
            optimizer: 0.0,
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "entropy,c,MU,VS,FGG,optimizer\nrenyi_2,1.0000000000,NA,NA,0.0000000000,0.0000000000\n"
        );
    }
}
