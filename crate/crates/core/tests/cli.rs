use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curved-duality"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn simulate_row_count_and_drift() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = run(&[
        "simulate", "--epsilon", "-1", "--dt", "0.01", "--t-end", "5", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count() - 1, 501);
    assert!(text.starts_with("t,re_z,im_z,re_pi,im_pi,H,J,I_re,I_im"));

    let out = run(&["simulate", "--t-end", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["curved_duality_schema"], 1);
    let drift = v["result"]["drifts"][0]["max_relative_drift"].as_f64().unwrap();
    assert!(drift < 1e-8);
}

#[test]
fn bad_parameters_are_usage_errors() {
    assert_eq!(run(&["simulate", "--radius", "0"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--radius", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--epsilon", "3"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--dt", "0"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn domain_exit_is_distinct_from_success() {
    // far above the continuum edge the Coulomb orbit reaches the disk boundary
    let out = run(&["simulate", "--system", "coulomb", "--gamma", "0.1", "--pi0", "0,20", "--t-end", "50", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("operative domain"));
}

#[test]
fn trajectory_file_round_trip_through_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let sim = run(&["simulate", "--t-end", "3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(sim.status.code(), Some(0));
    let out = run(&["map", "bohlin", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["max_surface_residual"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["result"]["samples"].as_array().unwrap().len(), 3001);
    assert!(v["result"]["params"]["r0"].as_f64().unwrap() == 1.0);
}

#[test]
fn map_variants() {
    let ks = run(&["map", "ks", "--points", "50"]);
    assert_eq!(ks.status.code(), Some(0));
    let rows = json(&ks)["result"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 27 + 6 + 1);
    let magnetic = run(&["map", "magnetic", "--points", "200"]);
    assert_eq!(magnetic.status.code(), Some(0));
    for row in json(&magnetic)["result"].as_array().unwrap() {
        assert_eq!(row["passed"], true);
    }
}

#[test]
fn spectrum_tables() {
    let v = json(&run(&["spectrum", "--alpha", "1", "--radius", "1", "--epsilon", "-1"]));
    let levels = v["result"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    for l in levels {
        assert!(l["duality_residual"].as_f64().unwrap() < 1e-12);
    }

    let v = json(&run(&["spectrum", "--system", "coulomb", "--gamma", "10", "--radius", "1", "--sigma", "0"]));
    let levels = v["result"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert_eq!(levels[2]["n_sigma"].as_f64(), Some(2.0));

    let out = run(&["spectrum", "--system", "coulomb", "--gamma", "0.01", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["levels"].as_array().unwrap().is_empty());
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn validate_exit_codes() {
    let out = run(&["validate", "--grid", "2048"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ratio = v["result"]["levels"][0]["order_ratio"].as_f64().unwrap();
    assert!((3.5..4.5).contains(&ratio));
    // the printed cutoff promises a second level the pseudosphere does not bind
    let out = run(&["validate", "--grid", "2048", "--cutoff", "printed"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn brackets_are_deterministic() {
    let a = run(&["brackets", "--points", "300", "--seed", "7"]);
    let b = run(&["brackets", "--points", "300", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["result"]["seed"], 7);
    let c = run(&["brackets", "--points", "300", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "alpha = 2\nradius = 3\nepsilon = 1\nn = 1\n").unwrap();
    let v = json(&run(&["spectrum", "--config", cfg.to_str().unwrap(), "--alpha", "1"]));
    assert_eq!(v["parameters"]["alpha"], 1.0);
    assert_eq!(v["parameters"]["radius"], 3.0);
    assert_eq!(v["result"]["levels"].as_array().unwrap().len(), 2);
    fs::write(&cfg, "alpah = 2\n").unwrap();
    assert_eq!(run(&["spectrum", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
