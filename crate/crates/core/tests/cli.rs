use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cglindblad::runner::RunConfig;

const COEFFS: &str = r#"{
  "scenario": "coefficients",
  "system": { "model": "driven_qubit", "omega0": 1.0 },
  "bath": { "kind": "ohmic_thermal", "eta": 1.0, "cutoff": 5.0, "temperature": 1.0 },
  "lambda": 0.1,
  "sweep": { "deltas": [0.5, 2.0] }
}"#;

const EVOLVE: &str = r#"{
  "scenario": "evolve",
  "system": { "model": "qutrit" },
  "bath": { "kind": "delta_correlated", "gamma0": 0.5, "cross": "shared" },
  "delta": 1.0,
  "lambda": 0.1,
  "evolution": { "horizon": 50.0, "steps": 25, "initial_state": { "basis": 2 } }
}"#;

fn run(dir: &Path, scenario: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cglindblad"))
        .arg(scenario)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn repeated_runs_are_byte_identical() {
    for (scenario, config) in [("coefficients", COEFFS), ("evolve", EVOLVE)] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(run(a.path(), scenario, config, &[]).status.success());
        assert!(run(b.path(), scenario, config, &[]).status.success());
        let (la, lb) = (listing(&a.path().join("out")), listing(&b.path().join("out")));
        assert_eq!(la.len(), 2);
        assert_eq!(la, lb);
    }
}

#[test]
fn artifact_names_carry_the_config_hash() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(d.path(), "evolve", EVOLVE, &[]).status.success());
    let hash = RunConfig::from_json(EVOLVE).unwrap().canonical_hash();
    let names: Vec<String> = listing(&d.path().join("out")).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, vec![format!("evolve_{}.json", &hash[..16]), format!("evolve_{}_trajectory.csv", &hash[..16])]);
    let text = fs::read_to_string(d.path().join("out").join(&names[1])).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("time,rho_00_re,rho_00_im,"));
    assert!(header.ends_with(",trace_error,min_eig,purity"));
    assert_eq!(text.lines().count(), 27);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("out").join(&names[0])).unwrap()).unwrap();
    assert_eq!(json["config_hash"], hash);
    assert_eq!(json["passed"], true);
}

#[test]
fn json_only_format() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(d.path(), "coefficients", COEFFS, &["--format", "json"]).status.success());
    let names: Vec<String> = listing(&d.path().join("out")).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names.len(), 1);
    assert!(names[0].ends_with(".json"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("out").join(&names[0])).unwrap()).unwrap();
    let entry = &json["payload"]["entries"][0];
    assert_eq!(entry["basis_labels"], serde_json::json!(["I", "X", "Y", "Z"]));
    assert!(entry["audit"]["route_difference"].as_f64().unwrap() < 1e-8);
    assert!(entry["t_B"].as_f64().is_some() && entry["t_S"].as_f64().is_some());
}

#[test]
fn quadrature_overrides_change_the_hash() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(a.path(), "evolve", EVOLVE, &[]).status.success());
    assert!(run(b.path(), "evolve", EVOLVE, &["--quad-points", "32", "--tol", "1e-9"]).status.success());
    let (la, lb) = (listing(&a.path().join("out")), listing(&b.path().join("out")));
    assert_ne!(la[0].0, lb[0].0);
}

#[test]
fn unknown_scenario_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), "thermalize", EVOLVE, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");
    assert!(!d.path().join("out").exists());
}

#[test]
fn non_hermitian_input_names_the_key() {
    let d = tempfile::tempdir().unwrap();
    let config = EVOLVE.replace(
        r#""system": { "model": "qutrit" }"#,
        r#""system": { "model": "custom", "hamiltonian": [[0, 0, 0], [0, 1, 0], [0, 0.5, 3]],
                      "couplings": [{ "label": "a", "matrix": [[0, 1, 0], [1, 0, 1], [0, 1, 0]] }] }"#,
    );
    let out = run(d.path(), "evolve", &config, &[]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["message"].as_str().unwrap().contains("system.hamiltonian"), "{err}");
}

#[test]
fn audit_failure_exits_nonzero_with_report() {
    let d = tempfile::tempdir().unwrap();
    // two-phonon truncation is too coarse at this coupling
    let config = r#"{
      "scenario": "oracle-compare",
      "system": { "model": "driven_qubit", "omega0": 1.0 },
      "delta": 2.0,
      "lambda": 0.2,
      "oracle": { "mode_count": 5, "band": [0.5, 1.5], "mode_coupling": 0.2, "fock_cutoff": 2, "sample_count": 41 }
    }"#;
    let out = run(d.path(), "oracle-compare", config, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "audit");
    assert!(!err["failures"].as_array().unwrap().is_empty());
}

#[test]
fn config_round_trip() {
    for text in [COEFFS, EVOLVE] {
        let cfg = RunConfig::from_json(text).unwrap();
        let again = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.canonical_hash(), again.canonical_hash());
    }
}
