use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use spinres_cli::error::CliError;
use spinres_cli::ingest::{ingest_csv, Records, Schema};

fn spinres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinres")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn results(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("results.json")).unwrap()).unwrap()
}

fn value(doc: &Value, path: &[&str]) -> f64 {
    let mut v = doc;
    for key in path {
        v = &v[*key];
    }
    v["value"].as_f64().unwrap_or_else(|| panic!("no value at {path:?}"))
}

#[test]
fn three_row_trace_gives_three_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "t.csv",
        "freq_hz,re,im\n7.49e9,0.9,0.1\n7.5e9,0.2,0.0\n7.51e9,0.9,-0.1\n",
    );
    match ingest_csv(&path, Schema::Trace).unwrap() {
        Records::Trace(r) => {
            assert_eq!(r.len(), 3);
            assert_eq!(r[1].freq, 7.5e9);
            assert_eq!(r[2].s11.im, -0.1);
        }
        Records::Sweep(_) => panic!("wrong schema"),
    }
}

#[test]
fn wrong_header_names_the_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.csv", "freq,re,im\n7.5e9,1,0\n");
    let err = ingest_csv(&path, Schema::Trace).unwrap_err();
    assert_eq!(err.code(), "schema-mismatch");
    match &err {
        CliError::Schema { row, column, .. } => {
            assert_eq!(*row, 0);
            assert_eq!(column, "freq");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("freq"));
}

#[test]
fn bad_sweep_value_cites_its_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("b_tesla,angle_rad,f_r_hz,q_i,direction\n");
    for k in 0..10 {
        let b = if k == 6 {
            "0.3T".to_string()
        } else {
            format!("{}", 0.05 * k as f64)
        };
        text.push_str(&format!("{b},,7.48e9,,up\n"));
    }
    let path = write(dir.path(), "s.csv", &text);
    let err = ingest_csv(&path, Schema::Sweep).unwrap_err();
    match &err {
        CliError::Schema { row, column, .. } => {
            assert_eq!(*row, 7);
            assert_eq!(column, "b_tesla");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().contains("row 7"), "{err}");

    // Same failure through the binary: JSON on stdout, text on stderr.
    let out = spinres(&[
        "tune",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["error"]["code"], "schema-mismatch");
    assert_eq!(json["error"]["row"], 7);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinres(&[
        "design",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "design.colour=blue",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["error"]["code"], "unknown-key");
}

#[test]
fn dimensional_key_needs_a_unit() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinres(&[
        "design",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "design.f_r=7.5e9",
    ]);
    assert!(!out.status.success());
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["error"]["code"], "config-parse");
}

#[test]
fn design_reports_reference_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinres(&[
        "design",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "design.grid_spacing=10 nm",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = results(dir.path());
    let close = |got: f64, want: f64, tol: f64| (got / want - 1.0).abs() < tol;
    assert!(close(value(&doc, &["results", "circuit", "delta_i"]), 394.9e-9, 5e-3));
    assert!(close(value(&doc, &["results", "circuit", "impedance"]), 0.751, 5e-3));
    assert_eq!(doc["results"]["circuit"]["delta_i"]["unit"], "A");
    for name in ["field_map.csv", "field_map.svg"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn simulate_then_fit_recovers_the_injected_resonator() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let fit = dir.path().join("fit");
    let out = spinres(&["simulate", "--out", sim.to_str().unwrap(), "--set", "simulate.noise=0"]);
    assert!(out.status.success());
    let trace = sim.join("trace.csv");
    let out = spinres(&["fit", trace.to_str().unwrap(), "--out", fit.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = results(&fit);
    for (key, want) in [("f_r", 7.5e9), ("q_i", 2e4), ("q_c", 1e4)] {
        let got = value(&doc, &["results", "resonator", key]);
        assert!((got / want - 1.0).abs() < 1e-6, "{key}: {got}");
    }
    let delay = value(&doc, &["results", "background", "electrical_delay"]);
    assert!((delay / 50e-9 - 1.0).abs() < 1e-6);
}

#[test]
fn simulated_sweep_tunes_back() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let tune = dir.path().join("tune");
    assert!(spinres(&[
        "simulate",
        "--out",
        sim.to_str().unwrap(),
        "--set",
        "simulate.tune_noise=0 Hz"
    ])
    .status
    .success());
    let sweep = sim.join("sweep.csv");
    let out = spinres(&["tune", sweep.to_str().unwrap(), "--out", tune.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = results(&tune);
    let a = value(&doc, &["results", "quadratic_fit", "a_coeff"]);
    assert!((a / 0.0652 - 1.0).abs() < 1e-6, "{a}");
}

fn assert_units(v: &Value, path: &str) {
    match v {
        Value::Object(map) if map.contains_key("value") => {
            assert!(
                map["unit"].as_str().is_some_and(|u| !u.is_empty()),
                "{path} has no unit"
            );
        }
        Value::Object(map) => map.iter().for_each(|(k, v)| assert_units(v, &format!("{path}.{k}"))),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(k, v)| assert_units(v, &format!("{path}[{k}]"))),
        Value::Number(_) => panic!("{path} is a bare number"),
        _ => {}
    }
}

#[test]
fn every_number_carries_a_unit() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let sim = root.join("simulate");
    assert!(spinres(&["simulate", "--out", sim.to_str().unwrap()]).status.success());
    let trace = sim.join("trace.csv");
    let sweep = sim.join("sweep.csv");
    let runs: [&[&str]; 5] = [
        &["fit", trace.to_str().unwrap()],
        &["tune", sweep.to_str().unwrap()],
        &["design", "--set", "design.grid_spacing=20 nm"],
        &["protocol-count", "--set", "count.mc_trials=1000"],
        &["protocol-dispersive", "--set", "dispersive.mc_trials=1000"],
    ];
    assert_units(&results(&sim), "simulate");
    for args in runs {
        let out_dir = root.join(args[0]);
        let mut full = args.to_vec();
        full.extend(["--out", out_dir.to_str().unwrap()]);
        let out = spinres(&full);
        assert!(
            out.status.success(),
            "{}: {}",
            args[0],
            String::from_utf8_lossy(&out.stderr)
        );
        assert_units(&results(&out_dir), args[0]);
    }
}

#[test]
fn seed_changes_simulated_noise_but_not_layout() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        let out = dir.path().join(seed);
        assert!(spinres(&["simulate", "--out", out.to_str().unwrap(), "--seed", seed])
            .status
            .success());
        std::fs::read_to_string(out.join("trace.csv")).unwrap()
    };
    let (a, b, a2) = (run("1"), run("2"), run("1"));
    assert_eq!(a, a2);
    assert_ne!(a, b);
    assert_eq!(a.lines().count(), b.lines().count());
}

#[test]
fn config_file_and_overrides_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[count]\neta = 0.5\nt1 = \"1 ms\"\n");
    let out_dir = dir.path().join("o");
    let out = spinres(&[
        "protocol-count",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "count.eta=0.3",
        "--set",
        "count.mc_trials=1000",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = results(&out_dir);
    assert_eq!(value(&doc, &["results", "reference", "t1"]), 1e-3);
    assert_eq!(value(&doc, &["results", "reference", "eta"]), 0.3);
}
