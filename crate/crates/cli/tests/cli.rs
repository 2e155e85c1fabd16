use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn npwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npwave"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn result(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("result.json")).unwrap()).unwrap()
}

const TOY: &str = r#"{
    "domain": {"kind": "torus", "dim": 1},
    "operator": {"preset": "shifted_laplacian", "shift": "1"},
    "cutoffs": {"k_max": 0, "l_max": 0},
    "nonlinearity": [{"a": 1, "p": 4}],
    "weight": {"kind": "constant", "value": 1}
}"#;

#[test]
fn solve_toy_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), TOY);
    let out = tmp.path().join("out");
    let o = npwave(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = result(&out);
    assert!((r["solve"]["energy"].as_f64().unwrap() - PI * PI).abs() < 1e-6);
    assert_eq!(r["tool"], "npwave");
    assert!(r["config"]["domain"].is_object());
    assert!(out.join("field.csv").exists() && out.join("coefficients.json").exists());
}

#[test]
fn result_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
            "domain": {"kind": "torus", "dim": 1},
            "operator": {"preset": "polyharmonic", "m": 2},
            "cutoffs": {"k_max": 4, "l_max": 4},
            "nonlinearity": [{"a": 1, "p": 4}],
            "weight": {"kind": "constant", "value": 1},
            "seed": 11
        }"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let o = npwave(&[
            "solve",
            "--config",
            &cfg,
            "--out",
            d.to_str().unwrap(),
            "--threads",
            "2",
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in [
        "result.json",
        "coefficients.json",
        "field.csv",
        "iterations.jsonl",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn gram_identity_weight() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
            "domain": {"kind": "torus", "dim": 1},
            "operator": {"preset": "polyharmonic", "m": 1},
            "cutoffs": {"k_max": 6, "l_max": 6},
            "weight": {"kind": "constant", "value": 1}
        }"#,
    );
    let out = tmp.path().join("out");
    let o = npwave(&["gram", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!((result(&out)["gram"]["mu_min"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn series_torus_wave_diverges() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
            "domain": {"kind": "torus", "dim": 2},
            "operator": {"preset": "polyharmonic", "m": 1},
            "series": {"p": 4, "radius": 16}
        }"#,
    );
    let out = tmp.path().join("out");
    let o = npwave(&["series", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = result(&out);
    assert_eq!(r["series"]["verdict"], "diverges");
    assert!(!r["series"]["witness"].as_array().unwrap().is_empty());
    assert!(out.join("series.csv").exists());
}

#[test]
fn torus_wave_solve_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
            "domain": {"kind": "torus", "dim": 2},
            "operator": {"preset": "polyharmonic", "m": 1},
            "cutoffs": {"k_max": 2, "l_max": 2},
            "nonlinearity": [{"a": 1, "p": 4}],
            "weight": {"kind": "constant", "value": 1}
        }"#,
    );
    let o = npwave(&[
        "solve",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("compact embedding fails"));
}

#[test]
fn bad_config_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"domain": {"kind": "torus", "dim": 1}, "bogus": 1}"#,
    );
    let o = npwave(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let missing = npwave(&["solve", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn negative_grid_weight_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csv = String::from("x0,t,value\n");
    for i in 0..4 {
        for j in 0..4 {
            let v = if i == 1 && j == 2 { -0.5 } else { 1.0 };
            csv.push_str(&format!(
                "{},{},{v}\n",
                i as f64 * PI / 2.0,
                j as f64 * PI / 2.0
            ));
        }
    }
    fs::write(tmp.path().join("q.csv"), csv).unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
            "domain": {"kind": "torus", "dim": 1},
            "operator": {"preset": "polyharmonic", "m": 1},
            "cutoffs": {"k_max": 1, "l_max": 1},
            "weight": {"kind": "grid_file", "path": "q.csv"}
        }"#,
    );
    let o = npwave(&[
        "gram",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonnegative"));
}

#[test]
fn witness_requires_wave_operator() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"domain": {"kind": "torus", "dim": 2}, "operator": {"preset": "polyharmonic", "m": 2}}"#,
    );
    let o = npwave(&[
        "witness",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
}
