//! Coincidence counts to relative frequencies.

use serde::Serialize;

use super::fixtures::CoincidenceRecord;
use crate::error::{Error, Result};
use crate::nonlocality::CorrelationTable;

/// `N_i / Σ_j N_j`
pub fn probs_from_counts(counts: &[u64]) -> Result<Vec<f64>> {
    if counts.is_empty() {
        return Err(Error::Empty("counts"));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidCounts("zero total".into()));
    }
    let t = total as f64;
    Ok(counts.iter().map(|&n| n as f64 / t).collect())
}

/// `P(a,b|x,y)` for one `(θ, x, y)` from its four records.
pub fn probs_from_records(records: &[CoincidenceRecord]) -> Result<[f64; 4]> {
    let first = records.first().ok_or(Error::Empty("coincidence records"))?;
    let mut cells: [Option<u64>; 4] = [None; 4];
    for r in records {
        if r.theta_deg != first.theta_deg || r.x != first.x || r.y != first.y {
            return Err(Error::InvalidCounts("records mix states or settings".into()));
        }
        if r.a > 1 || r.b > 1 {
            return Err(Error::InvalidCounts(format!("outcome ({}, {}) out of range", r.a, r.b)));
        }
        let slot = &mut cells[2 * r.a + r.b];
        if slot.replace(r.count).is_some() {
            return Err(Error::InvalidCounts(format!("duplicate cell ({}, {})", r.a, r.b)));
        }
    }
    let counts: Vec<u64> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::InvalidCounts(format!("missing cell ({}, {})", i / 2, i % 2))))
        .collect::<Result<_>>()?;
    let p = probs_from_counts(&counts)?;
    Ok([p[0], p[1], p[2], p[3]])
}

/// The 16 CHSH counts of one state, ordered `(x, y, a, b)` with `b` fastest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountTable {
    pub theta_deg: f64,
    pub counts: [u64; 16],
}

impl CountTable {
    pub fn from_records(theta_deg: f64, records: &[CoincidenceRecord]) -> Result<Self> {
        let mut counts = [None; 16];
        for r in records.iter().filter(|r| r.theta_deg == theta_deg) {
            if r.x > 1 || r.y > 1 || r.a > 1 || r.b > 1 {
                return Err(Error::InvalidCounts("index out of range".into()));
            }
            let i = ((r.x * 2 + r.y) * 2 + r.a) * 2 + r.b;
            if counts[i].replace(r.count).is_some() {
                return Err(Error::InvalidCounts(format!("duplicate cell at θ = {theta_deg}")));
            }
        }
        let mut out = [0; 16];
        for (o, c) in out.iter_mut().zip(counts) {
            *o = c.ok_or_else(|| Error::InvalidCounts(format!("incomplete counts at θ = {theta_deg}")))?;
        }
        Ok(Self { theta_deg, counts: out })
    }

    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            theta_deg: self.theta_deg,
            counts: self.counts.map(|c| c * factor),
        }
    }

    pub fn table(&self) -> Result<CorrelationTable> {
        table_from_counts(&self.counts)
    }
}

/// One [`CountTable`] per distinct angle, ascending.
pub fn count_tables(records: &[CoincidenceRecord]) -> Result<Vec<CountTable>> {
    let mut thetas: Vec<f64> = records.iter().map(|r| r.theta_deg).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    thetas.into_iter().map(|t| CountTable::from_records(t, records)).collect()
}

pub(crate) fn table_from_counts(counts: &[u64]) -> Result<CorrelationTable> {
    if counts.len() != 16 {
        return Err(Error::InvalidCounts(format!("expected 16 counts, found {}", counts.len())));
    }
    let probs = counts
        .chunks(4)
        .map(probs_from_counts)
        .collect::<Result<Vec<_>>>()?
        .concat();
    CorrelationTable::new(vec![2, 2], vec![2, 2], probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_and_degenerate() {
        assert_eq!(probs_from_counts(&[1, 1, 1, 1]).unwrap(), vec![0.25; 4]);
        assert!(probs_from_counts(&[0, 0, 0, 0]).is_err());
        assert!(probs_from_counts(&[]).is_err());
    }

    #[test]
    fn record_cells() {
        let rec = |a, b, count| CoincidenceRecord {
            theta_deg: 15.0,
            x: 0,
            y: 0,
            a,
            b,
            count,
        };
        let recs = [rec(0, 0, 14560), rec(0, 1, 630), rec(1, 0, 139), rec(1, 1, 1047)];
        let p = probs_from_records(&recs).unwrap();
        assert_eq!(p[0], 14560.0 / 16376.0);
        assert!(probs_from_records(&recs[..3]).is_err());
        assert!(probs_from_records(&[recs[0], recs[0]]).is_err());
    }
}
