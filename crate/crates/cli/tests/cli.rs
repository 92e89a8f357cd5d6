use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use causalflow::measures::rate_window;
use causalflow::{
    bivariate_rates, estimate_window_covariance, rate_term, simulate, SimulationConfig, TermKind,
};
use causalflow_cli::io::{read_panel, read_spec};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_causalflow"));
    c.env_remove("CAUSALFLOW_THREADS");
    c
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_code(out: &Output) -> String {
    let line = String::from_utf8_lossy(&out.stderr).lines().last().unwrap_or_default().to_string();
    let v: Value = serde_json::from_str(&line).unwrap();
    v["error"]["code"].as_str().unwrap().to_string()
}

#[test]
fn measure_on_decoupled_spec_is_zero() {
    let s = spec("decoupled.json");
    let out = run(&["measure", "--spec", s.to_str().unwrap(), "--kind", "di", "--source", "x", "--target", "y", "--horizon", "8"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema"], "causalflow/v1");
    assert_eq!(v["report"]["measure_kind"], "DI");
    assert_eq!(v["report"]["horizon"], 8);
    assert_eq!(v["report"]["value_nats"].as_f64().unwrap(), 0.0);
    assert_eq!(v["config"]["horizon"], "8");
}

#[test]
fn bits_flag_converts_values() {
    let s = spec("example.json");
    let base = ["measure", "--spec", s.to_str().unwrap(), "--kind", "iie", "--source", "x", "--target", "y"];
    let nats = stdout_json(&run(&base))["report"]["value_nats"].as_f64().unwrap();
    let mut args = base.to_vec();
    args.push("--bits");
    let v = stdout_json(&run(&args));
    assert_eq!(v["unit"], "bits");
    let bits = v["report"]["value_bits"].as_f64().unwrap();
    assert!((bits - nats / std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn rates_match_closed_forms_on_the_example() {
    let s = spec("example.json");
    let v = stdout_json(&run(&["rates", "--spec", s.to_str().unwrap(), "--cond", "causal", "--format", "json"]));
    let truth = bivariate_rates(&read_spec(&s).unwrap()).unwrap();
    let rows = v["rates"]["directed"].as_array().unwrap();
    let get = |src: &str, key: &str| {
        rows.iter().find(|r| r["source"] == src).unwrap()[key].as_f64().unwrap()
    };
    assert!((get("x", "di_nats") - truth.di_xy).abs() < 1e-6);
    assert!((get("y", "di_nats") - truth.di_yx).abs() < 1e-6);
    assert!((get("x", "te_nats") - truth.te_xy).abs() < 1e-6);
    assert!((get("y", "te_nats") - truth.te_yx).abs() < 1e-6);
    let iie = v["rates"]["instantaneous"][0]["iie_nats"].as_f64().unwrap();
    assert!((iie - truth.iie).abs() < 1e-6);
}

#[test]
fn rates_table_lists_every_pair() {
    let s = spec("chain.json");
    let out = run(&["rates", "--spec", s.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.split_whitespace().count() == 4 && !l.starts_with("source")).count(), 6);
}

#[test]
fn infer_emits_dot() {
    let s = spec("chain.json");
    let out = run(&["infer", "--spec", s.to_str().unwrap(), "--policy", "conditioned"]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.contains("digraph"));
    assert!(dot.contains("\"x\" -> \"z\""));
    assert!(dot.contains("\"z\" -> \"y\""));
    assert!(!dot.contains("\"x\" -> \"y\""));
    assert!(dot.starts_with("// causalflow/v1 {"));

    let s = spec("example.json");
    let dot = String::from_utf8(run(&["infer", "--spec", s.to_str().unwrap()]).stdout).unwrap();
    assert!(dot.contains("dir=none"));
}

#[test]
fn csv_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("path.csv");
    let s = spec("example.json");
    let out = run(&["simulate", "--spec", s.to_str().unwrap(), "--length", "2000", "--seed", "42", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(causalflow_cli::sidecar(&csv).exists());

    let memory = simulate(&read_spec(&s).unwrap(), &SimulationConfig::new(2000, 1, 42)).unwrap();
    let disk = read_panel(&csv).unwrap();
    assert_eq!(memory.channels(), disk.channels());
    assert!(memory.as_row_major().iter().zip(disk.as_row_major()).all(|(a, b)| a.to_bits() == b.to_bits()));

    let estimate = |p| {
        let m = estimate_window_covariance(std::slice::from_ref(p), rate_window(8, &[])).unwrap();
        rate_term(&m, TermKind::DirectedInformation, "x", "y", &[]).unwrap()
    };
    assert_eq!(estimate(&memory).to_bits(), estimate(&disk).to_bits());

    let v = stdout_json(&run(&["measure", "--data", csv.to_str().unwrap(), "--kind", "di", "--source", "x", "--target", "y"]));
    let reported = serde_json::to_string(&v["report"]["value_nats"]).unwrap();
    assert_eq!(reported, serde_json::to_string(&estimate(&memory)).unwrap());
}

#[test]
fn reproduce_fig2_writes_both_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig2");
    let out = run(&["reproduce", "fig2", "--seed", "7", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["truth.dot", "pairwise.dot", "conditioned.dot", "summary.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema"], "causalflow/v1");
    assert_eq!(summary["conditioned_matches_truth"], true);
    assert_eq!(summary["pairwise_matches_truth"], false);
    assert_eq!(summary["spurious_pairwise_edges"], serde_json::json!(["x->y"]));
    assert_eq!(summary["config"]["inference"]["seed"], 7);

    let again = dir.path().join("again");
    run(&["reproduce", "fig2", "--seed", "7", "--out", again.to_str().unwrap()]);
    for f in ["pairwise.dot", "conditioned.dot"] {
        assert_eq!(std::fs::read(out_dir.join(f)).unwrap(), std::fs::read(again.join(f)).unwrap());
    }
}

#[test]
fn reproduce_tables() {
    let dir = tempfile::tempdir().unwrap();
    for (preset, file) in [("bivariate", "bivariate.json"), ("trivariate", "trivariate.json")] {
        let out = run(&["reproduce", preset, "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success());
        let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(file)).unwrap()).unwrap();
        assert_eq!(v["schema"], "causalflow/v1");
    }
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trivariate.json")).unwrap()).unwrap();
    for row in v["results"]["case_b"].as_array().unwrap() {
        let (a, b) = (row["numeric_nats"].as_f64().unwrap(), row["closed_form_nats"].as_f64().unwrap());
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn exit_codes_and_error_codes() {
    let out = run(&["measure", "--spec", "/does/not/exist.json", "--kind", "di", "--source", "x", "--target", "y"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "IO_ERROR");

    let s = spec("example.json");
    let out = run(&["measure", "--spec", s.to_str().unwrap(), "--kind", "di", "--source", "x", "--target", "q"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "UNKNOWN_CHANNEL");

    let out = run(&[
        "measure", "--spec", s.to_str().unwrap(), "--kind", "di", "--source", "x", "--target", "y",
        "--max-horizon", "16", "--tol", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "NO_CONVERGENCE");

    let out = run(&["measure", "--kind", "di"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "USAGE");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"channels":["a"],"coupling":[1.2],"noise_cov":[1.0]}"#).unwrap();
    let out = run(&["rates", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "NON_STATIONARY");
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let s = spec("example.json");
    let args = ["infer", "--spec", s.to_str().unwrap(), "--format", "json"];
    let capped = bin().args(args).env("CAUSALFLOW_THREADS", "1").output().unwrap();
    let free = bin().args(args).output().unwrap();
    assert!(capped.status.success());
    assert_eq!(capped.stdout, free.stdout);

    let bad = bin().args(args).env("CAUSALFLOW_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
