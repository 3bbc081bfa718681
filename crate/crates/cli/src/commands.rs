use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::path::Path;

use quantumness::bounds::{overlap_grid, sweep, write_sweep_csv, BoundConfig, StateSet};
use quantumness::coherence::write_coherence_csv;
use quantumness::entropy::EntropyKind;
use quantumness::experiment::{
    chsh_analysis, coherence_from_scans, count_tables, entropy_comparison, fixture_path, load_fixture,
    tomography_reconstruct, two_qubit_projectors, Fixture, FixtureKind, TomographyInput,
};
use quantumness::nonlocality::{
    deterministic_boxes, optimize_ghz_svetlichny, svetlichny_box, svetlichny_check, svetlichny_value,
    witness_uncertainty_relation, write_chsh_csv, ChshRow, SvetlichnyLevel, WitnessOperator,
};
use quantumness::{fidelity, Error, PureState, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::EntropyArg;

/// Output of one subcommand and the verdicts that did not come out as
/// expected.
pub struct Outcome {
    pub csv: String,
    pub json: Value,
    pub failures: Vec<String>,
}

const BOUND_ORDER_TOL: f64 = 1e-6;
const ENTROPY_TOL: f64 = 0.0157 + 0.01;
const COHERENCE_TOL: f64 = 0.0401 + 0.01;
const GHZ_TOL: f64 = 1e-6;
const WITNESS_TOL: f64 = 1e-9;
const FIDELITY_MIN: f64 = 0.98;

pub fn entropy_kind(arg: EntropyArg, k: f64) -> Result<EntropyKind> {
    match arg {
        EntropyArg::Shannon => Ok(EntropyKind::Shannon),
        EntropyArg::Renyi => EntropyKind::new_renyi(k),
        EntropyArg::Tsallis => EntropyKind::new_tsallis(k),
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable report")
}

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn check_angles(thetas: &[f64]) -> Result<()> {
    match thetas.iter().find(|t| !(0.0..=90.0).contains(*t)) {
        Some(t) => Err(Error::Unsupported(format!("θ = {t}° is outside [0°, 90°]"))),
        None => Ok(()),
    }
}

fn selected(thetas: &[f64], theta: f64) -> bool {
    thetas.is_empty() || thetas.contains(&theta)
}

fn load(dir: &Path, kind: FixtureKind) -> Result<Fixture> {
    load_fixture(&fixture_path(dir, kind), kind)
}

pub fn bounds(kinds: &[EntropyKind], points: usize, tol: Option<f64>) -> Result<Outcome> {
    let tol = tol.unwrap_or(BOUND_ORDER_TOL);
    let config = BoundConfig::default();
    let cs = overlap_grid(points);
    let mut rows = Vec::new();
    for &kind in kinds {
        rows.extend(sweep(kind, &cs, &config)?);
    }
    let mut failures = Vec::new();
    for r in &rows {
        let at = format!("{} c={:.6}", r.entropy, r.c);
        if let Some(fgg) = r.fgg {
            if r.optimizer < fgg - tol {
                failures.push(format!("{at}: optimizer {:.6} below FGG {fgg:.6}", r.optimizer));
            }
            if fgg < -tol {
                failures.push(format!("{at}: FGG {fgg:.6} negative"));
            }
        }
        if let Some(mu) = r.mu {
            if r.optimizer < mu - tol {
                failures.push(format!("{at}: optimizer {:.6} below MU {mu:.6}", r.optimizer));
            }
        }
        if r.optimizer < -tol {
            failures.push(format!("{at}: optimizer {:.6} negative", r.optimizer));
        }
    }
    Ok(Outcome {
        csv: csv_string(|b| write_sweep_csv(&rows, b))?,
        json: to_json(&rows),
        failures,
    })
}

pub fn entropy(kind: EntropyKind, fixtures: &Path, thetas: &[f64], tol: Option<f64>) -> Result<Outcome> {
    check_angles(thetas)?;
    let tol = tol.unwrap_or(ENTROPY_TOL);
    let Fixture::Marginals(records) = load(fixtures, FixtureKind::Table2)? else {
        unreachable!("table2 parses to marginals")
    };
    let records: Vec<_> = records.into_iter().filter(|r| selected(thetas, r.theta_deg)).collect();
    let rows = entropy_comparison(&records, kind)?;
    let mut csv = String::from("entropy,theta,pair,ideal,measured,deviation,consistent\n");
    let mut failures = Vec::new();
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{:.10},{:.10},{:.10},{}",
            kind.name(),
            r.theta_deg,
            r.pair,
            r.ideal,
            r.measured,
            r.deviation,
            r.consistent
        )
        .expect("string write");
        if r.consistent && r.deviation > tol {
            failures.push(format!(
                "θ={} {}: deviation {:.4} exceeds {tol:.4}",
                r.theta_deg, r.pair, r.deviation
            ));
        }
    }
    Ok(Outcome {
        csv,
        json: json!({ "entropy": kind.name(), "tolerance": tol, "rows": to_json(&rows) }),
        failures,
    })
}

pub fn coherence(fixtures: &Path, thetas: &[f64], tol: Option<f64>) -> Result<Outcome> {
    check_angles(thetas)?;
    let tol = tol.unwrap_or(COHERENCE_TOL);
    let Fixture::Scans(scans) = load(fixtures, FixtureKind::Table3)? else {
        unreachable!("table3 parses to scans")
    };
    let scans: Vec<_> = scans.into_iter().filter(|s| selected(thetas, s.theta_deg)).collect();
    let rows = coherence_from_scans(&scans)?;
    let failures = rows
        .iter()
        .filter(|r| r.error > tol)
        .map(|r| format!("θ={}: |D_H - C_r| = {:.4} exceeds {tol:.4}", r.theta_deg, r.error))
        .collect();
    Ok(Outcome {
        csv: csv_string(|b| write_coherence_csv(&rows, b))?,
        json: json!({ "tolerance": tol, "rows": to_json(&rows) }),
        failures,
    })
}

pub fn chsh(fixtures: &Path, thetas: &[f64], samples: usize, seed: u64) -> Result<Outcome> {
    check_angles(thetas)?;
    let Fixture::Coincidences(records) = load(fixtures, FixtureKind::Table4)? else {
        unreachable!("table4 parses to coincidences")
    };
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for counts in count_tables(&records)?.iter().filter(|c| selected(thetas, c.theta_deg)) {
        let a = chsh_analysis(counts, samples, seed)?;
        if !a.violates_classical() {
            failures.push(format!("θ={}: classical relation not violated", a.theta_deg));
        }
        if !a.holds_quantum() {
            failures.push(format!("θ={}: quantum relation violated", a.theta_deg));
        }
        rows.push(ChshRow {
            theta_deg: a.theta_deg,
            s_measured: a.s_measured,
            s_error: a.s.std,
            gamma: a.gamma,
            classical_bound: 2.0,
        });
        reports.push(json!({
            "theta_deg": a.theta_deg,
            "report": to_json(&a.report()),
            "gamma": a.gamma,
            "tolerance": a.tolerance,
            "f_desc": to_json(&a.classical.f_desc),
            "classical_holds": a.classical.holds(),
            "quantum_holds": a.quantum.holds(),
        }));
    }
    Ok(Outcome {
        csv: csv_string(|b| write_chsh_csv(&rows, b))?,
        json: json!({ "samples": samples, "seed": seed, "states": reports }),
        failures,
    })
}

pub fn svetlichny(starts: usize, seed: u64, tol: Option<f64>) -> Result<Outcome> {
    let tol = tol.unwrap_or(GHZ_TOL);
    let (ghz, angles) = optimize_ghz_svetlichny(seed, starts)?;
    let local_max = deterministic_boxes(3)
        .iter()
        .map(svetlichny_value)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let ns = svetlichny_value(&svetlichny_box())?;
    let ghz_report = svetlichny_check(&quantumness::nonlocality::ghz_table(&angles)?)?;
    let ns_report = svetlichny_check(&svetlichny_box())?;

    let mut failures = Vec::new();
    if (ghz - 4.0 * SQRT_2).abs() > tol {
        failures.push(format!("GHZ optimum {ghz:.9} differs from 4√2"));
    }
    if local_max > 4.0 + tol {
        failures.push(format!("local deterministic maximum {local_max} exceeds 4"));
    }
    if (ns - 8.0).abs() > tol {
        failures.push(format!("non-signaling box reaches {ns}, not 8"));
    }
    let mut csv = String::from("case,S3,classical_holds,quantum_holds,nonsignaling_holds\n");
    let holds = |r: &quantumness::nonlocality::SvetlichnyReport| {
        SvetlichnyLevel::ALL.map(|l| r.holds(l))
    };
    let g = holds(&ghz_report);
    let n = holds(&ns_report);
    writeln!(csv, "ghz,{ghz:.10},{},{},{}", g[0], g[1], g[2]).expect("string write");
    writeln!(csv, "local_max,{local_max:.10},true,true,true").expect("string write");
    writeln!(csv, "nonsignaling,{ns:.10},{},{},{}", n[0], n[1], n[2]).expect("string write");
    Ok(Outcome {
        csv,
        json: json!({
            "ghz": { "s3": ghz, "angles": angles, "report": to_json(&ghz_report) },
            "local_max": local_max,
            "nonsignaling": { "s3": ns, "report": to_json(&ns_report) },
        }),
        failures,
    })
}

pub fn witness(thetas: &[f64], tol: Option<f64>) -> Result<Outcome> {
    check_angles(thetas)?;
    let tol = tol.unwrap_or(WITNESS_TOL);
    let w = WitnessOperator::bell();
    let set = StateSet::separable(vec![2, 2])?;
    let mut csv = String::from("theta,c_q,separable_total,violated\n");
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for &theta in thetas {
        let rho = PureState::phi_theta(theta).density();
        let r = witness_uncertainty_relation(&w, &rho, &set)?;
        let entangled = r.c_q > tol;
        if r.violated != entangled {
            failures.push(format!("θ={theta}: violated={} but tr(ρE)={:.3e}", r.violated, r.c_q));
        }
        writeln!(csv, "{theta},{:.10},{:.10},{}", r.c_q, r.separable_total, r.violated).expect("string write");
        reports.push(json!({ "theta_deg": theta, "report": to_json(&r) }));
    }
    Ok(Outcome {
        csv,
        json: Value::Array(reports),
        failures,
    })
}

pub fn tomography(thetas: &[f64], mean_counts: f64, seed: u64, tol: Option<f64>) -> Result<Outcome> {
    check_angles(thetas)?;
    let min = tol.unwrap_or(FIDELITY_MIN);
    let projectors = two_qubit_projectors();
    let mut csv = String::from("theta,fidelity,purity\n");
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, &theta) in thetas.iter().enumerate() {
        let ideal = PureState::phi_theta(theta).density();
        let input = TomographyInput::simulate_counts(&ideal, &projectors, mean_counts, seed.wrapping_add(i as u64))?;
        let rho = tomography_reconstruct(&input)?;
        let f = fidelity(&ideal, &rho)?;
        if f < min {
            failures.push(format!("θ={theta}: fidelity {f:.4} below {min}"));
        }
        writeln!(csv, "{theta},{f:.10},{:.10}", rho.purity()).expect("string write");
        rows.push(json!({ "theta_deg": theta, "fidelity": f, "purity": rho.purity() }));
    }
    Ok(Outcome {
        csv,
        json: json!({ "mean_counts": mean_counts, "seed": seed, "states": rows }),
        failures,
    })
}
