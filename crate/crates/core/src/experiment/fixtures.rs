//! CSV fixtures of the photonic data tables.
//!
//! * `table1.csv`: `theta_deg,two_qubit,one_qubit` state fidelities.
//! * `table2.csv`: `theta_deg,a_basis,b_basis,p_a0,p_a1,p_b0,p_b1` marginals.
//! * `table3.csv`: `theta_deg,phi_deg,p_a0,p_a1` basis scans.
//! * `table4.csv`: `x,y,a,b,theta_deg_<θ>...` coincidence counts, one count
//!   column per state.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use csv::StringRecord;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::Observable;

/// Largest allowed `|p0 + p1 - 1|` of a marginal pair.
pub const PAIR_SLACK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FixtureKind {
    Table1,
    Table2,
    Table3,
    Table4,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 4] = [
        FixtureKind::Table1,
        FixtureKind::Table2,
        FixtureKind::Table3,
        FixtureKind::Table4,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            FixtureKind::Table1 => "table1.csv",
            FixtureKind::Table2 => "table2.csv",
            FixtureKind::Table3 => "table3.csv",
            FixtureKind::Table4 => "table4.csv",
        }
    }
}

impl FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(FixtureKind::Table1),
            "table2" => Ok(FixtureKind::Table2),
            "table3" => Ok(FixtureKind::Table3),
            "table4" => Ok(FixtureKind::Table4),
            _ => Err(Error::Unsupported(format!("fixture kind `{s}`"))),
        }
    }
}

/// Polarization bases: `H/V` is the computational basis, `D/A` the
/// diagonal one, and `G/K` the eigenbasis of `(√3 X + Z) / 2` with outcome 0
/// on `K = (√3|H> + |V>) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    HV,
    DA,
    GK,
}

impl Basis {
    pub fn observable(self) -> Observable {
        match self {
            Basis::HV => Observable::pauli_z(),
            Basis::DA => Observable::pauli_x(),
            Basis::GK => Observable::w(),
        }
    }

    /// Pauli-style name of the observable.
    pub fn symbol(self) -> &'static str {
        match self {
            Basis::HV => "Z",
            Basis::DA => "X",
            Basis::GK => "W",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::HV => "HV",
            Basis::DA => "DA",
            Basis::GK => "GK",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "HV" => Ok(Basis::HV),
            "DA" => Ok(Basis::DA),
            "GK" => Ok(Basis::GK),
            _ => Err(Error::Unsupported(format!("basis `{s}`"))),
        }
    }
}

/// A two-outcome marginal as printed, and rescaled to unit sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginalPair {
    pub raw: [f64; 2],
    pub normalized: [f64; 2],
    /// `|raw[0] + raw[1] - 1| <= PAIR_SLACK`
    pub consistent: bool,
}

impl MarginalPair {
    pub fn new(p0: f64, p1: f64) -> Result<Self> {
        if !(p0.is_finite() && p1.is_finite()) || p0 < 0.0 || p1 < 0.0 || p0 + p1 <= 0.0 {
            return Err(Error::InvalidDistribution(format!("({p0}, {p1})")));
        }
        let s = p0 + p1;
        Ok(Self {
            raw: [p0, p1],
            normalized: [p0 / s, p1 / s],
            consistent: (s - 1.0).abs() <= PAIR_SLACK,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityRecord {
    pub theta_deg: f64,
    pub two_qubit: f64,
    pub one_qubit: f64,
}

/// Marginals of `a` (first photon) and `b` (second photon) for one state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalRecord {
    pub theta_deg: f64,
    pub a_basis: Basis,
    pub b_basis: Basis,
    pub a: MarginalPair,
    pub b: MarginalPair,
    pub line: usize,
}

impl MarginalRecord {
    pub fn consistent(&self) -> bool {
        self.a.consistent && self.b.consistent
    }

    /// `"Z-X"` style label of the observable pair.
    pub fn pair_label(&self) -> String {
        format!("{}-{}", self.a_basis.symbol(), self.b_basis.symbol())
    }
}

/// Marginal of the first photon in the basis rotated by `phi_deg`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub a: MarginalPair,
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoincidenceRecord {
    pub theta_deg: f64,
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Fixture {
    Fidelities(Vec<FidelityRecord>),
    Marginals(Vec<MarginalRecord>),
    Scans(Vec<ScanRecord>),
    Coincidences(Vec<CoincidenceRecord>),
}

pub fn fixture_path(dir: &Path, kind: FixtureKind) -> PathBuf {
    dir.join(kind.file_name())
}

pub fn load_fixture(path: &Path, kind: FixtureKind) -> Result<Fixture> {
    let file = File::open(path).map_err(|e| Error::Fixture {
        path: path.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    read_fixture(file, kind, path)
}

/// Parses fixture CSV from `reader`; `path` only labels diagnostics.
pub fn read_fixture<R: Read>(reader: R, kind: FixtureKind, path: &Path) -> Result<Fixture> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let fail = |line: usize, reason: String| Error::Fixture {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let headers = rdr.headers().map_err(|e| fail(1, e.to_string()))?.clone();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| fail(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(fail(1, "no data rows".into()));
    }
    let parsed = match kind {
        FixtureKind::Table1 => {
            expect_headers(&headers, &["theta_deg", "two_qubit", "one_qubit"]).map_err(|r| fail(1, r))?;
            Fixture::Fidelities(
                rows.iter()
                    .map(|(line, r)| {
                        let rec = (|| {
                            Ok(FidelityRecord {
                                theta_deg: field(r, 0, &headers)?,
                                two_qubit: probability(r, 1, &headers)?,
                                one_qubit: probability(r, 2, &headers)?,
                            })
                        })();
                        rec.map_err(|e: String| fail(*line, e))
                    })
                    .collect::<Result<_>>()?,
            )
        }
        FixtureKind::Table2 => {
            expect_headers(
                &headers,
                &["theta_deg", "a_basis", "b_basis", "p_a0", "p_a1", "p_b0", "p_b1"],
            )
            .map_err(|r| fail(1, r))?;
            Fixture::Marginals(
                rows.iter()
                    .map(|(line, r)| {
                        let rec = (|| {
                            let basis = |i: usize| r[i].parse::<Basis>().map_err(|e| format!("column `{}`: {e}", &headers[i]));
                            Ok(MarginalRecord {
                                theta_deg: field(r, 0, &headers)?,
                                a_basis: basis(1)?,
                                b_basis: basis(2)?,
                                a: pair(r, 3, &headers)?,
                                b: pair(r, 5, &headers)?,
                                line: *line,
                            })
                        })();
                        rec.map_err(|e: String| fail(*line, e))
                    })
                    .collect::<Result<_>>()?,
            )
        }
        FixtureKind::Table3 => {
            expect_headers(&headers, &["theta_deg", "phi_deg", "p_a0", "p_a1"]).map_err(|r| fail(1, r))?;
            Fixture::Scans(
                rows.iter()
                    .map(|(line, r)| {
                        let rec = (|| {
                            Ok(ScanRecord {
                                theta_deg: field(r, 0, &headers)?,
                                phi_deg: field(r, 1, &headers)?,
                                a: pair(r, 2, &headers)?,
                                line: *line,
                            })
                        })();
                        rec.map_err(|e: String| fail(*line, e))
                    })
                    .collect::<Result<_>>()?,
            )
        }
        FixtureKind::Table4 => Fixture::Coincidences(parse_coincidences(&headers, &rows).map_err(|(l, r)| fail(l, r))?),
    };
    Ok(parsed)
}

fn expect_headers(headers: &StringRecord, expected: &[&str]) -> std::result::Result<(), String> {
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(format!("expected header {}, found {}", expected.join(","), found.join(",")));
    }
    Ok(())
}

fn field(r: &StringRecord, i: usize, headers: &StringRecord) -> std::result::Result<f64, String> {
    let raw = r.get(i).ok_or_else(|| format!("missing column `{}`", &headers[i]))?;
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("column `{}`: `{raw}` is not a number", &headers[i]))?;
    if !v.is_finite() {
        return Err(format!("column `{}`: non-finite value", &headers[i]));
    }
    Ok(v)
}

fn probability(r: &StringRecord, i: usize, headers: &StringRecord) -> std::result::Result<f64, String> {
    let v = field(r, i, headers)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("column `{}`: {v} is not a probability", &headers[i]));
    }
    Ok(v)
}

fn pair(r: &StringRecord, i: usize, headers: &StringRecord) -> std::result::Result<MarginalPair, String> {
    let p0 = probability(r, i, headers)?;
    let p1 = probability(r, i + 1, headers)?;
    MarginalPair::new(p0, p1).map_err(|e| e.to_string())
}

type LineError = (usize, String);

fn parse_coincidences(headers: &StringRecord, rows: &[(usize, StringRecord)]) -> std::result::Result<Vec<CoincidenceRecord>, LineError> {
    let keys = ["x", "y", "a", "b"];
    if headers.len() < 5 || headers.iter().take(4).ne(keys) {
        return Err((1, "expected header x,y,a,b,theta_deg_<θ>...".into()));
    }
    let thetas: Vec<f64> = headers
        .iter()
        .skip(4)
        .map(|h| {
            h.strip_prefix("theta_deg_")
                .and_then(|t| t.parse::<f64>().ok())
                .filter(|t| t.is_finite())
                .ok_or((1, format!("column `{h}` is not of the form theta_deg_<θ>")))
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut seen = [false; 16];
    let mut out = Vec::with_capacity(rows.len() * thetas.len());
    for (line, r) in rows {
        let line = *line;
        if r.len() != headers.len() {
            return Err((line, format!("expected {} fields, found {}", headers.len(), r.len())));
        }
        let mut idx = [0usize; 4];
        for (slot, (k, raw)) in idx.iter_mut().zip(keys.iter().zip(r.iter())) {
            *slot = match raw {
                "0" => 0,
                "1" => 1,
                _ => return Err((line, format!("column `{k}`: `{raw}` is not 0 or 1"))),
            };
        }
        let cell = idx.iter().fold(0, |acc, d| acc * 2 + d);
        if std::mem::replace(&mut seen[cell], true) {
            return Err((line, format!("duplicate cell x={} y={} a={} b={}", idx[0], idx[1], idx[2], idx[3])));
        }
        for (j, &theta) in thetas.iter().enumerate() {
            let raw = &r[4 + j];
            let count: u64 = raw
                .parse()
                .map_err(|_| (line, format!("column `{}`: `{raw}` is not a nonnegative integer", &headers[4 + j])))?;
            out.push(CoincidenceRecord {
                theta_deg: theta,
                x: idx[0],
                y: idx[1],
                a: idx[2],
                b: idx[3],
                count,
            });
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        let line = rows.last().map_or(1, |r| r.0);
        return Err((line, format!("missing cell x={} y={} a={} b={}", missing >> 3, (missing >> 2) & 1, (missing >> 1) & 1, missing & 1)));
    }
    Ok(out)
}
