use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_arcmarkov"));
    // keep tolerance overrides from the calling environment out of the tests
    for var in [
        "ARCMARKOV_SLACK_C",
        "ARCMARKOV_RATIO_TOL",
        "ARCMARKOV_OMEGA_TOL",
        "ARCMARKOV_MASS_TOL",
        "ARCMARKOV_LEVEL_TOL",
        "ARCMARKOV_INFLATION_MAX",
        "ARCMARKOV_FAA_TOL",
    ] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("json on stderr")
}

const TRIG_SPEC: &str = r#"{"kind": "trigonometric", "peak": 0.0, "plateau": [-0.6, 0.6],
  "buffer": [-1.6, 1.6], "zeros": [2.2, -2.5, 3.0], "multiplicities": [1, 2, 3], "degree": 150}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn eq_measure_single_arc_constant() {
    let o = run(&["eq-measure", "--arcs", "[-1.5708,1.5708]", "--endpoint", "1.5708"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let omega = v["result"]["endpoint"]["omega_limit"].as_f64().unwrap();
    assert!((omega - 0.159155).abs() < 1e-6, "{omega}");
    assert!((v["result"]["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(v["seed"], 20_240_611);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn eq_measure_density_csv() {
    let o = run(&["eq-measure", "--arcs", "-2,-1,0.5,2", "--per-arc", "5", "--format", "csv", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,density,config_hash,seed"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        assert_eq!(f.len(), 4);
        assert!(f[1].parse::<f64>().unwrap() > 0.0);
        assert_eq!(f[3], "3");
    }
}

#[test]
fn markov_exactness_anchor() {
    let o = run(&["verify-markov", "--tset", "single", "--k", "1", "--l", "32", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let ratio = v["result"]["rows"][0]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-9, "{ratio}");
    let o = run(&["verify-markov", "--tset", "single", "--k", "1", "--l", "2,4,8,16,32", "--expect-ratio", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn missing_spec_is_a_config_error() {
    let o = run(&["fastdecay", "--spec", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "config");
    assert!(o.stdout.is_empty());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind": "trigonometric", "peak": 0.0}"#);
    let invalid = write(
        dir.path(),
        "invalid.json",
        &TRIG_SPEC.replace(r#""zeros": [2.2, -2.5, 3.0]"#, r#""zeros": [0.1, -2.5, 3.0]"#),
    );
    for args in [
        vec!["fastdecay", "--spec", bad.as_str()],
        vec!["fastdecay", "--spec", invalid.as_str()],
        vec!["verify-markov", "--k", "1"],
        vec!["verify-markov", "--l", "4", "--endpoint", "0.5"],
        vec!["eq-measure", "--arcs", "[1, 0]"],
        vec!["faa", "--outer", "1,2", "--inner-cos", "0,1", "--k", "40"],
        vec!["no-such-command"],
        vec!["--config", "nowhere.json"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stderr_json(&o)["error"], "config", "{args:?}");
    }
}

#[test]
fn failed_assertions_exit_one() {
    let o = run(&["verify-markov", "--l", "8", "--expect-ratio", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "assertion");
    assert_eq!(e["failures"].as_array().unwrap().len(), 1);
    // the table is still written
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("bound,"));

    // a fast decreasing polynomial at too small a degree
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "low.json", &TRIG_SPEC.replace("150", "13"));
    let o = run(&["fastdecay", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tolerance_env_overrides() {
    let args = ["verify-markov", "--l", "8", "--expect-ratio", "0.9999"];
    assert_eq!(run(&args).status.code(), Some(1));
    let o = bin().args(args).env("ARCMARKOV_RATIO_TOL", "1e-3").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    // the tolerance is part of the hashed config
    let h = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().nth(1).unwrap().split(',').nth(6).unwrap().to_string();
    let base = run(&["verify-markov", "--l", "8"]);
    assert_ne!(h(&o), h(&base));
}

#[test]
fn fastdecay_report_and_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "t.json", TRIG_SPEC);
    let o = run(&["fastdecay", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let checks = v["result"]["builds"][0]["report"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert_eq!(v["config"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let o = run(&["fastdecay", "--spec", &spec, "--ladder", "100,150,200,250"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!(v["result"]["fit"]["slope"].as_f64().unwrap() < 0.0);
    assert!(v["result"]["fit"]["delta_hat"].as_f64().unwrap() > 0.0);
}

#[test]
fn tset_identity_on_two_intervals() {
    let o = run(&["tset", "--tset", "two", "--c", "0.2", "--h", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["result"]["degree"], 2);
    let ids = v["result"]["endpoint_identity"].as_array().unwrap();
    assert_eq!(ids.len(), 4);
    for id in ids {
        assert!(id["relative_discrepancy"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn bernstein_and_symmetrize_pass() {
    let o = run(&["verify-bernstein", "--k", "2", "--points", "25"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 26);
    let o = run(&["symmetrize", "--k", "2", "--n", "64,128,256"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["faa", "--outer", "0,0,1", "--inner-cos", "0,1", "--t", "0.4", "--k", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    // (cos^2)' = -sin 2t
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((row[3].parse::<f64>().unwrap() + (0.8f64).sin()).abs() < 1e-14);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"command": "verify-markov", "seed": 9, "params": {"tset": "two", "k": 2, "l": [4, 8, 16]}}"#,
    );
    let a = run(&["--config", &cfg]);
    let b = run(&["verify-markov", "--tset", "two", "--k", "2", "--l", "4,8,16", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // command-line flags win over the file
    let c = run(&["--config", &cfg, "--k", "3"]);
    assert!(String::from_utf8(c.stdout).unwrap().lines().nth(1).unwrap().starts_with("markov_endpoint,3,"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "t.json", TRIG_SPEC);
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify-markov", "--suite", "--k", "3", "--corpus-size", "20", "--seed", "17"],
        vec!["symmetrize", "--k", "1", "--n", "64,128", "--seed", "17"],
        vec!["faa", "--random", "100", "--seed", "17"],
        vec!["verify-bernstein", "--random-degree", "24", "--seed", "17"],
        vec!["fastdecay", "--spec", &spec, "--ladder", "100,150,200,250", "--format", "csv"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|j| {
                let path = dir.path().join(format!("out{i}_{j}"));
                let mut a = args.clone();
                let p = path.to_str().unwrap().to_string();
                a.extend(["--output", p.as_str()]);
                let o = run(&a);
                assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
                std::fs::read(&path).unwrap()
            })
            .collect();
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
    // a different seed changes the data
    let a = run(&["faa", "--random", "5", "--seed", "1"]);
    let b = run(&["faa", "--random", "5", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn every_csv_row_carries_hash_and_seed() {
    let o = run(&["verify-markov", "--suite", "--k", "1", "--corpus-size", "5", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = text.lines();
    assert!(rows.next().unwrap().ends_with(",config_hash,seed"));
    let mut hashes = std::collections::BTreeSet::new();
    for r in rows {
        let f: Vec<&str> = r.rsplitn(3, ',').collect();
        assert_eq!(f[0], "4");
        hashes.insert(f[1].to_string());
    }
    assert_eq!(hashes.len(), 1);
}
