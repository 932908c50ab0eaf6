//! End-to-end runs of the `landau` binary: exit codes, CSV tables and
//! schema-valid run manifests.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SCHEMA: &str = include_str!("../schema/run_manifest.schema.json");

fn landau(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landau"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> (TempDir, Value) {
    let dir = tempfile::tempdir().unwrap();
    let out = landau(dir.path(), args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = read_manifest(dir.path(), args[0]);
    (dir, manifest)
}

/// Reads `{command}_manifest.json`, validates it against the schema and
/// checks that every listed output exists.
fn read_manifest(dir: &Path, command: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}_manifest.json"))).unwrap();
    let manifest: Value = serde_json::from_str(&text).unwrap();
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&manifest).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "manifest violates schema: {errors:?}");
    assert_eq!(manifest["command"], command);
    assert_eq!(manifest["timestamp"], "2023-11-14T22:13:20Z");
    for file in manifest["outputs"].as_array().unwrap() {
        assert!(dir.join(file.as_str().unwrap()).is_file(), "missing output {file}");
    }
    manifest
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

#[test]
fn veff_writes_one_table_per_exponent_in_potential_order() {
    let (dir, manifest) = run_ok(&["veff", "--B0", "1e15", "--n", "1,0,-0.5,-1,-1.1"]);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 5);
    // At ρ = 1 pm the potentials rise as n decreases.
    let at_one = |n: &str| {
        let (header, rows) = csv_rows(&dir.path().join(format!("veff_n{n}.csv")));
        assert_eq!(header, "rho_pm,V_eff");
        let row = rows.iter().min_by(|a, b| (a[0] - 1.0).abs().total_cmp(&(b[0] - 1.0).abs())).unwrap();
        row[1]
    };
    let values: Vec<f64> = ["1", "0", "-0.5", "-1", "-1.1"].iter().map(|n| at_one(n)).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
}

#[test]
fn veff_warns_for_exponents_without_bound_states() {
    let dir = tempfile::tempdir().unwrap();
    let out = landau(dir.path(), &["veff", "--B0", "1e15", "--n", "-3"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("warning"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["spectrum", "--n", "0"][..],
        &["spectrum", "--B0", "-5", "--n", "0"],
        &["spectrum", "--B0", "abc", "--n", "0"],
        &["nonsense"],
    ] {
        let out = landau(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn spectrum_reports_spin_patterns() {
    let (_dir, manifest) = run_ok(&["spectrum", "--B0", "1e15", "--n", "2,0", "--nu-max", "2"]);
    let spectra = manifest["results"]["spectra"].as_array().unwrap();
    assert_eq!(spectra[0]["pattern"], "dud");
    assert_eq!(spectra[1]["pattern"], "d(du)");
}

#[test]
fn fit_recovers_uniform_field_constants() {
    let (dir, _) = run_ok(&["fit", "--B0", "1e15", "--n", "0", "--constants", "paper"]);
    let (header, rows) = csv_rows(&dir.path().join("fit.csv"));
    assert_eq!(header, "n,C3,C5,rms");
    assert!((rows[0][1] - 44.418).abs() < 1e-3, "{:?}", rows[0]);
    assert!((rows[0][2] - 0.5).abs() < 1e-6);
}

#[test]
fn variational_bound_lies_above_computed_level() {
    let (dir, _) = run_ok(&["variational", "--B0", "1e15", "--n", "4", "--constants", "paper"]);
    let (_, rows) = csv_rows(&dir.path().join("variational.csv"));
    let (computed, bound) = (rows[0][1], rows[0][2]);
    assert!((computed - 1.907).abs() < 0.01 && (bound - 3.953).abs() < 0.01, "{:?}", rows[0]);
}

#[test]
fn eos_manifest_lists_scheme_and_levels() {
    let (dir, manifest) = run_ok(&["eos", "--B0", "1e15", "--steps", "20", "--reference"]);
    let table = &manifest["results"]["tables"][0];
    assert_eq!(table["source"], "uniform");
    assert!(table["occupied_levels"].as_u64().unwrap() > 1);
    assert!(dir.path().join("eos_nonmagnetic.csv").is_file());
    let (header, rows) = csv_rows(&dir.path().join("eos_n0.csv"));
    assert_eq!(header, "eps_F,n_e_cm3,rho_g_cc,P_erg_cc");
    assert!(rows.windows(2).all(|w| w[1][3] > w[0][3]), "pressure must rise with eps_F");
}

#[test]
fn wd_writes_profiles_and_curve() {
    let (dir, manifest) = run_ok(&["wd", "--profile", "zero", "--curve", "eps_f=5,25", "--step", "1"]);
    let (header, rows) = csv_rows(&dir.path().join("wd_curve.csv"));
    assert_eq!(header, "rho_c_proxy,mass_msun,radius_km");
    assert_eq!(rows.len(), 2);
    assert!(rows[1][1] > rows[0][1] && rows[1][2] < rows[0][2]);
    assert!(manifest["results"]["max_mass_msun"].as_f64().unwrap() < 1.44);
}
