//! Three-party Svetlichny relation with the sign pattern
//! `δ_xyz = -1` iff `x = y = z`.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::table::CorrelationTable;
use crate::error::{Error, Result};
use crate::linalg::{pauli, C64};
use crate::majorization::{BoundVector, MajorizationCheck, DEFAULT_TOL};
use crate::measurement::Observable;
use crate::optimize::{MultiStart, NelderMead};
use crate::state::PureState;

pub fn svetlichny_sign(x: usize, y: usize, z: usize) -> f64 {
    if x == y && y == z {
        -1.0
    } else {
        1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SvetlichnyLevel {
    Classical,
    Quantum,
    NonSignaling,
}

impl SvetlichnyLevel {
    pub const ALL: [SvetlichnyLevel; 3] = [
        SvetlichnyLevel::Classical,
        SvetlichnyLevel::Quantum,
        SvetlichnyLevel::NonSignaling,
    ];

    /// 4, 4√2, 8
    pub fn value(self) -> f64 {
        match self {
            SvetlichnyLevel::Classical => 4.0,
            SvetlichnyLevel::Quantum => 4.0 * SQRT_2,
            SvetlichnyLevel::NonSignaling => 8.0,
        }
    }

    pub fn vector(self) -> BoundVector {
        BoundVector::leading(self.value(), 8)
    }
}

/// Which outcome cells enter the comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityMask {
    /// Keep cells with `a ⊕ b ⊕ c = 0`.
    #[default]
    Even,
    None,
}

/// `S_3 = Σ_xyz δ_xyz E_xyz` with `E_xyz = Σ (-1)^{a+b+c} P(abc|xyz)`.
pub fn svetlichny_value(table: &CorrelationTable) -> Result<f64> {
    table.require_shape(3, 2, 2)?;
    let mut s = 0.0;
    for t in table.setting_tuples() {
        let mut e = 0.0;
        for (o, p) in table.outcome_tuples().iter().zip(table.slice(&t)) {
            e += if (o[0] + o[1] + o[2]) % 2 == 0 { *p } else { -*p };
        }
        s += svetlichny_sign(t[0], t[1], t[2]) * e;
    }
    Ok(s)
}

/// Raw `f(a,b,c) = Σ_xyz δ_xyz P(abc|xyz)` over the 8 outcome triples; the
/// total is always 4.
pub fn svetlichny_f_vector(table: &CorrelationTable, mask: ParityMask) -> Result<BoundVector> {
    table.require_shape(3, 2, 2)?;
    let outcomes = table.outcome_tuples();
    let mut f = vec![0.0; outcomes.len()];
    for t in table.setting_tuples() {
        let sign = svetlichny_sign(t[0], t[1], t[2]);
        for (cell, p) in f.iter_mut().zip(table.slice(&t)) {
            *cell += sign * p;
        }
    }
    if mask == ParityMask::Even {
        for (cell, o) in f.iter_mut().zip(&outcomes) {
            if (o[0] + o[1] + o[2]) % 2 == 1 {
                *cell = 0.0;
            }
        }
    }
    Ok(BoundVector::raw(f))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCheck<L> {
    pub level: L,
    pub check: MajorizationCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SvetlichnyReport {
    pub s3: f64,
    pub f_desc: BoundVector,
    pub levels: Vec<LevelCheck<SvetlichnyLevel>>,
}

impl SvetlichnyReport {
    pub fn holds(&self, level: SvetlichnyLevel) -> bool {
        self.levels.iter().any(|l| l.level == level && l.check.holds)
    }
}

pub fn svetlichny_check(table: &CorrelationTable) -> Result<SvetlichnyReport> {
    svetlichny_check_with(table, ParityMask::Even, DEFAULT_TOL)
}

pub fn svetlichny_check_with(table: &CorrelationTable, mask: ParityMask, tol: f64) -> Result<SvetlichnyReport> {
    let f_desc = svetlichny_f_vector(table, mask)?.sort_desc();
    let levels = SvetlichnyLevel::ALL
        .into_iter()
        .map(|level| {
            Ok(LevelCheck {
                level,
                check: MajorizationCheck::evaluate(&f_desc, &level.vector(), tol)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SvetlichnyReport {
        s3: svetlichny_value(table)?,
        f_desc,
        levels,
    })
}

/// `(|000> + |111>) / √2`
pub fn ghz_state() -> PureState {
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0] = C64::new(1.0 / SQRT_2, 0.0);
    amps[7] = C64::new(1.0 / SQRT_2, 0.0);
    PureState::new(amps).expect("unit norm")
}

fn equatorial(label: &str, t: f64) -> Observable {
    let m = &pauli::x().scale_real(t.cos()) + &pauli::y().scale_real(t.sin());
    Observable::new(label, m).expect("Hermitian")
}

/// GHZ table with party `i`, setting `s` measuring `cos t X + sin t Y` at
/// `t = angles[2i + s]`.
pub fn ghz_table(angles: &[f64; 6]) -> Result<CorrelationTable> {
    let rho = ghz_state().density();
    let parties: Vec<Vec<_>> = (0..3)
        .map(|i| {
            (0..2)
                .map(|s| equatorial("E", angles[2 * i + s]).measurement())
                .collect()
        })
        .collect();
    CorrelationTable::from_state(&rho, &parties)
}

/// Maximizes `S_3` over equatorial measurement angles on the GHZ state from
/// `starts` seeded random points.
pub fn optimize_ghz_svetlichny(seed: u64, starts: usize) -> Result<(f64, [f64; 6])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<Vec<f64>> = (0..starts.max(1))
        .map(|_| (0..6).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect())
        .collect();
    let f = |x: &[f64]| {
        let a: [f64; 6] = x.try_into().expect("six angles");
        ghz_table(&a).and_then(|t| svetlichny_value(&t)).map_or(f64::INFINITY, |s| -s)
    };
    let search = MultiStart {
        local: NelderMead {
            max_iter: 4000,
            tol: 1e-12,
        },
        top: 5,
        restarts: 2,
    };
    let r = search.minimize(&f, &seeds, 0.3).ok_or(Error::Empty("seeds"))?;
    let angles: [f64; 6] = r.best.x.as_slice().try_into().expect("six angles");
    Ok((-r.best.value, angles))
}

/// Non-signaling box with `E_xyz = δ_xyz`, reaching `S_3 = 8`.
pub fn svetlichny_box() -> CorrelationTable {
    CorrelationTable::from_fn(vec![2; 3], vec![2; 3], |o, s| {
        let parity = (o[0] + o[1] + o[2]) % 2;
        let target = usize::from(s[0] == s[1] && s[1] == s[2]);
        if parity == target {
            0.25
        } else {
            0.0
        }
    })
    .expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlocality::table::deterministic_boxes;

    #[test]
    fn f_total_is_four() {
        for b in deterministic_boxes(3).iter().take(10) {
            let f = svetlichny_f_vector(b, ParityMask::None).unwrap();
            assert!((f.total() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn local_boxes_within_classical_level() {
        for b in deterministic_boxes(3) {
            assert!(svetlichny_value(&b).unwrap() <= 4.0 + 1e-12);
            assert!(svetlichny_check(&b).unwrap().holds(SvetlichnyLevel::Classical));
        }
    }

    #[test]
    fn nonsignaling_box() {
        let b = svetlichny_box();
        assert!(b.is_no_signaling(1e-12));
        let r = svetlichny_check(&b).unwrap();
        assert!((r.s3 - 8.0).abs() < 1e-12);
        assert!(!r.holds(SvetlichnyLevel::Quantum));
        assert!(r.holds(SvetlichnyLevel::NonSignaling));
    }

    #[test]
    fn ghz_reaches_quantum_level() {
        let (s, angles) = optimize_ghz_svetlichny(7, 64).unwrap();
        assert!((s - 4.0 * SQRT_2).abs() < 1e-6, "{s}");
        let r = svetlichny_check(&ghz_table(&angles).unwrap()).unwrap();
        assert!(!r.holds(SvetlichnyLevel::Classical));
        assert!(r.holds(SvetlichnyLevel::Quantum));
    }
}
