//! CHSH correlators, the outcome-indexed vector
//! `f(a,b) = Σ_xy (-1)^{xy} P(a,b|x,y)` and its bound vectors.

use std::f64::consts::SQRT_2;
use std::io::Write;

use serde::Serialize;

use super::table::CorrelationTable;
use crate::error::{Error, Result};
use crate::majorization::{BoundVector, MajorizationCheck, DEFAULT_TOL};
use crate::measurement::Observable;
use crate::optimize::MultiStart;
use crate::state::PureState;

/// Sign applied to outcome pair `(a, b)` in a correlator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `(-1)^{a+b}`
    #[default]
    Parity,
    /// `(-1)^{ab}`
    Product,
}

/// Which cells of the outcome vector enter the comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellMask {
    /// `δ_ab`: only `a = b` cells are kept, the others are zeroed.
    #[default]
    Diagonal,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChshLevel {
    Classical,
    Quantum,
    NonSignaling,
}

impl ChshLevel {
    pub const ALL: [ChshLevel; 3] = [ChshLevel::Classical, ChshLevel::Quantum, ChshLevel::NonSignaling];

    /// Largest CHSH value at this level: 2, 2√2, 4.
    pub fn value(self) -> f64 {
        match self {
            ChshLevel::Classical => 2.0,
            ChshLevel::Quantum => 2.0 * SQRT_2,
            ChshLevel::NonSignaling => 4.0,
        }
    }

    /// `[value, 0, 0, 0]`
    pub fn vector(self) -> BoundVector {
        BoundVector::leading(self.value(), 4)
    }
}

pub fn correlator(table: &CorrelationTable, x: usize, y: usize, convention: Convention) -> Result<f64> {
    if table.parties() != 2 || table.outcomes() != [2, 2] {
        return Err(Error::InvalidTable("correlators need two parties with binary outcomes".into()));
    }
    if x >= table.settings()[0] || y >= table.settings()[1] {
        return Err(Error::InvalidTable(format!("setting ({x}, {y}) out of range")));
    }
    let mut e = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let odd = match convention {
                Convention::Parity => (a + b) % 2 == 1,
                Convention::Product => a * b == 1,
            };
            let p = table.get(&[a, b], &[x, y]);
            e += if odd { -p } else { p };
        }
    }
    Ok(e)
}

/// `S = E00 + E01 + E10 - E11` with the parity correlator.
pub fn chsh_value(table: &CorrelationTable) -> Result<f64> {
    table.require_shape(2, 2, 2)?;
    let e = |x, y| correlator(table, x, y, Convention::Parity);
    Ok(e(0, 0)? + e(0, 1)? + e(1, 0)? - e(1, 1)?)
}

/// Raw vector `[f(0,0), f(0,1), f(1,0), f(1,1)]`; its total is 2.
pub fn chsh_f_vector(table: &CorrelationTable) -> Result<BoundVector> {
    table.require_shape(2, 2, 2)?;
    let mut f = Vec::with_capacity(4);
    for a in 0..2 {
        for b in 0..2 {
            let mut v = 0.0;
            for x in 0..2 {
                for y in 0..2 {
                    let p = table.get(&[a, b], &[x, y]);
                    v += if x * y == 1 { -p } else { p };
                }
            }
            f.push(v);
        }
    }
    Ok(BoundVector::raw(f))
}

/// [`chsh_f_vector`] with `mask` applied.
pub fn chsh_f_vector_masked(table: &CorrelationTable, mask: CellMask) -> Result<BoundVector> {
    let f = chsh_f_vector(table)?;
    Ok(match mask {
        CellMask::None => f,
        CellMask::Diagonal => {
            let c = f.components();
            BoundVector::raw(vec![c[0], 0.0, 0.0, c[3]])
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChshOptions {
    pub mask: CellMask,
    pub tol: f64,
}

impl Default for ChshOptions {
    fn default() -> Self {
        Self {
            mask: CellMask::Diagonal,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshReport {
    pub level: ChshLevel,
    pub s_value: f64,
    pub f_desc: BoundVector,
    pub bound: BoundVector,
    pub check: MajorizationCheck,
}

impl ChshReport {
    pub fn holds(&self) -> bool {
        self.check.holds
    }

    /// Largest prefix sum of `f↓` below `n`.
    pub fn max_prefix(&self) -> f64 {
        let p = self.f_desc.prefix_sums();
        p[..p.len() - 1].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `f↓ ≺ c_level` with the diagonal mask and default tolerance.
pub fn check_chsh_relation(table: &CorrelationTable, level: ChshLevel) -> Result<ChshReport> {
    check_chsh_relation_with(table, level, &ChshOptions::default())
}

pub fn check_chsh_relation_with(
    table: &CorrelationTable,
    level: ChshLevel,
    options: &ChshOptions,
) -> Result<ChshReport> {
    let f_desc = chsh_f_vector_masked(table, options.mask)?.sort_desc();
    let bound = level.vector();
    Ok(ChshReport {
        level,
        s_value: chsh_value(table)?,
        check: MajorizationCheck::evaluate(&f_desc, &bound, options.tol)?,
        f_desc,
        bound,
    })
}

/// `γ(θ) = 2 √(1 + sin² 2θ)` for `θ` in degrees.
pub fn quantum_chsh_value(theta_deg: f64) -> f64 {
    let s = (2.0 * theta_deg.to_radians()).sin();
    2.0 * (1.0 + s * s).sqrt()
}

/// `|Φ(θ)>` measured with `A_x ∈ {Z, X}` and
/// `B_y = cos φ Z + (-1)^y sin φ X`.
pub fn simulate_chsh_table(theta_deg: f64, phi_rad: f64) -> Result<CorrelationTable> {
    let rho = PureState::phi_theta(theta_deg).density();
    let a = vec![
        Observable::pauli_z().measurement(),
        Observable::pauli_x().measurement(),
    ];
    let b = vec![
        Observable::xz_plane("B0", phi_rad).measurement(),
        Observable::xz_plane("B1", -phi_rad).measurement(),
    ];
    CorrelationTable::from_state(&rho, &[a, b])
}

/// Largest `S` over `φ` for the family of [`simulate_chsh_table`], with the
/// maximizing angle in radians.
pub fn max_chsh_over_phi(theta_deg: f64) -> Result<(f64, f64)> {
    let f = |x: &[f64]| simulate_chsh_table(theta_deg, x[0]).and_then(|t| chsh_value(&t)).map_or(f64::INFINITY, |s| -s);
    let seeds: Vec<Vec<f64>> = (0..=90).map(|i| vec![(i as f64).to_radians()]).collect();
    let r = MultiStart::default()
        .minimize(&f, &seeds, 0.5f64.to_radians())
        .ok_or(Error::Empty("angle grid"))?;
    Ok((-r.best.value, r.best.x[0]))
}

/// `P(a,b|x,y) = [1 + (-1)^{a+b+xy} / √2] / 4`.
pub fn tsirelson_box() -> CorrelationTable {
    CorrelationTable::from_fn(vec![2, 2], vec![2, 2], |o, s| {
        let sign = if (o[0] + o[1] + s[0] * s[1]) % 2 == 0 { 1.0 } else { -1.0 };
        (1.0 + sign / SQRT_2) / 4.0
    })
    .expect("normalized")
}

/// `P(a,b|x,y) = 1/2` when `a ⊕ b = xy`.
pub fn pr_box() -> CorrelationTable {
    CorrelationTable::from_fn(vec![2, 2], vec![2, 2], |o, s| {
        if (o[0] ^ o[1]) == s[0] * s[1] {
            0.5
        } else {
            0.0
        }
    })
    .expect("normalized")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshRow {
    pub theta_deg: f64,
    pub s_measured: f64,
    pub s_error: f64,
    pub gamma: f64,
    pub classical_bound: f64,
}

/// CSV with columns `theta,S_measured,S_error,gamma,classical_bound`.
pub fn write_chsh_csv<W: Write>(rows: &[ChshRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["theta", "S_measured", "S_error", "gamma", "classical_bound"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            format!("{}", r.theta_deg),
            format!("{:.10}", r.s_measured),
            format!("{:.10}", r.s_error),
            format!("{:.10}", r.gamma),
            format!("{}", r.classical_bound),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slice_table(cells: [f64; 4]) -> CorrelationTable {
        CorrelationTable::from_fn(vec![1, 1], vec![2, 2], |o, _| cells[2 * o[0] + o[1]]).unwrap()
    }

    #[test]
    fn correlator_conventions() {
        let t = slice_table([0.5, 0.0, 0.0, 0.5]);
        assert_eq!(correlator(&t, 0, 0, Convention::Parity).unwrap(), 1.0);
        assert_eq!(correlator(&t, 0, 0, Convention::Product).unwrap(), 0.0);
        let u = slice_table([0.25; 4]);
        assert_eq!(correlator(&u, 0, 0, Convention::Parity).unwrap(), 0.0);
        assert_eq!(correlator(&u, 0, 0, Convention::Product).unwrap(), 0.5);
        assert!(correlator(&u, 1, 0, Convention::Parity).is_err());
    }

    #[test]
    fn deterministic_zero_box() {
        let t = CorrelationTable::from_fn(vec![2, 2], vec![2, 2], |o, _| {
            if o == [0, 0] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(chsh_f_vector(&t).unwrap().components(), &[2.0, 0.0, 0.0, 0.0]);
        let r = check_chsh_relation(&t, ChshLevel::Classical).unwrap();
        assert!(r.holds());
        assert_eq!(r.check.min_margin, 0.0);
    }

    #[test]
    fn tsirelson_vector() {
        let t = tsirelson_box();
        let f = chsh_f_vector(&t).unwrap();
        let hi = 0.5 + SQRT_2 / 2.0;
        let lo = 0.5 - SQRT_2 / 2.0;
        for (x, e) in f.components().iter().zip([hi, lo, lo, hi]) {
            assert!((x - e).abs() < 1e-12);
        }
        assert!((f.total() - 2.0).abs() < 1e-12);
        assert!((chsh_value(&t).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        let c = check_chsh_relation(&t, ChshLevel::Classical).unwrap();
        assert!(!c.holds());
        assert!((c.f_desc.prefix_sums()[1] - (1.0 + SQRT_2)).abs() < 1e-12);
        assert!(check_chsh_relation(&t, ChshLevel::Quantum).unwrap().holds());
    }

    #[test]
    fn pr_box_levels() {
        let t = pr_box();
        assert!((chsh_value(&t).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(chsh_f_vector(&t).unwrap().components(), &[1.5, -0.5, -0.5, 1.5]);
        assert!(!check_chsh_relation(&t, ChshLevel::Quantum).unwrap().holds());
        assert!(check_chsh_relation(&t, ChshLevel::NonSignaling).unwrap().holds());
        assert!(t.is_no_signaling(1e-12));
    }

    #[test]
    fn gamma_values() {
        assert!((quantum_chsh_value(0.0) - 2.0).abs() < 1e-15);
        assert!((quantum_chsh_value(45.0) - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((quantum_chsh_value(30.0) - 2.0 * 1.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn simulated_family_reaches_gamma() {
        for theta in [15.0, 30.0, 45.0, 60.0] {
            let (s, _) = max_chsh_over_phi(theta).unwrap();
            assert!((s - quantum_chsh_value(theta)).abs() < 1e-6, "{theta}: {s}");
        }
    }

    #[test]
    fn level_chain() {
        let [c, q, ns] = ChshLevel::ALL.map(ChshLevel::vector);
        assert!(c.majorized_by(&q, 0.0).unwrap());
        assert!(q.majorized_by(&ns, 0.0).unwrap());
    }
}
