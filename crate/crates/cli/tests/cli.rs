use std::process::{Command, Output};

use serde_json::Value;

fn qss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss")).args(args).output().expect("spawn qss")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = qss(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn ideal_access_table() {
    let v = json_stdout(&["access", "--ideal", "--json"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 15);
    let count = |c: &str| rows.iter().filter(|r| r["classification"] == c).count();
    assert_eq!(count("authorized"), 5);
    assert_eq!(count("partial"), 2);
    assert_eq!(count("unauthorized"), 8);
}

#[test]
fn witness_exact_and_sampled() {
    let v = json_stdout(&["witness", "--noise", "white:0.6903", "--json"]);
    assert!((v["ideal_value"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(v["value"].as_f64().unwrap() > -1.0);
    assert!(v.get("error").is_none());

    let v = json_stdout(&["--seed", "4", "witness", "--noise", "white:0.6903", "--shots", "4000", "--json"]);
    let (value, exact, err) = (v["value"].as_f64().unwrap(), v["exact_value"].as_f64().unwrap(), v["error"].as_f64().unwrap());
    assert!(err > 0.0);
    assert!((value - exact).abs() < 5.0 * err);
}

#[test]
fn sweep_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = qss(&["sweep", "--pair", "1,2", "--plane", "zy", "--steps", "24", "--csv", path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(&reader.headers().unwrap()[0], "angle_radians");
    assert_eq!(reader.records().count(), 24);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qss(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(qss(&["sweep", "--pair", "1,2,3"]).status.code(), Some(2));
    assert_eq!(qss(&["witness", "--csv", "/tmp/x.csv"]).status.code(), Some(2));
    assert_eq!(qss(&["--help"]).status.code(), Some(0));
}

#[test]
fn tampered_sqq_aborts() {
    let out = qss(&["sqq", "--rounds", "100", "--tamper", "XIIII"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qss(&["sqq", "--rounds", "20"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_replay_by_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = qss(&["--seed", seed, "qq", "--rounds", "50", "--noise", "white:0.6903", "--json", path.to_str().unwrap()]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    let a = run("a.json", "9");
    assert_eq!(a, run("b.json", "9"));
    assert_ne!(a, run("c.json", "10"));
}

#[test]
fn pair_counts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    let v = json_stdout(&["tomo", "--pair", "1,3", "--shots", "20000", "--csv", counts.to_str().unwrap(), "--json"]);
    assert!(v["trace_distance"].as_f64().unwrap() < 0.05);
    let w = json_stdout(&["tomo", "--counts", counts.to_str().unwrap(), "--json"]);
    assert_eq!(v["density"], w["density"]);
}

#[test]
fn build_state_stabilizers() {
    let v = json_stdout(&["build-state", "--json"]);
    assert_eq!(v["canonical_resource"], true);
    for s in v["stabilizers"].as_array().unwrap() {
        assert!((s["expectation"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}
