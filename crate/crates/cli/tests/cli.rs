use std::path::Path;
use std::process::{Command, Output};

fn covlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covlab")).args(args).output().expect("covlab runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn run_to(dir: &Path, scenario: &str, extra: &[&str]) -> (i32, String) {
    let report = dir.join(format!("{scenario}.json"));
    let mut args = vec!["run", "--scenario", scenario, "--report", report.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = covlab(&args);
    (code(&o), std::fs::read_to_string(report).unwrap_or_default())
}

#[test]
fn exit_codes_follow_the_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_to(dir.path(), "n2-nica", &[]).0, 0);

    let (c, text) = run_to(dir.path(), "s23-shift-T4", &[]);
    assert_eq!(c, 1);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    let t4 = report["verdicts"].as_array().unwrap().iter().find(|v| v["check"] == "t-conditions" && v["rep"] == "shift").unwrap();
    assert_eq!(t4["details"]["T4"]["witness"]["alpha"]["letters"], serde_json::json!([3, 2, 2, 3]));

    let (c, text) = run_to(dir.path(), "too-small", &[]);
    assert_eq!(c, 2);
    assert!(text.contains("interior empty"));
}

#[test]
fn reports_are_byte_stable_across_runs_and_cache_states() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let plain = run_to(dir.path(), "f2-collapsed-shift", &[]).1;
    assert_eq!(plain, run_to(dir.path(), "f2-collapsed-shift", &[]).1);
    let cold = run_to(dir.path(), "f2-collapsed-shift", &["--cache-dir", cache]).1;
    assert!(std::fs::read_dir(cache).unwrap().count() > 0);
    let hot = run_to(dir.path(), "f2-collapsed-shift", &["--cache-dir", cache]).1;
    assert_eq!(plain, cold);
    assert_eq!(plain, hot);
}

#[test]
fn replay_reproduces_every_witness() {
    let dir = tempfile::tempdir().unwrap();
    run_to(dir.path(), "s23-shift-T4", &[]);
    let report = dir.path().join("s23-shift-T4.json");
    let o = covlab(&["replay", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.lines().count() >= 3, "{out}");
    assert!(out.lines().all(|l| l.ends_with("reproduced")), "{out}");

    let one = covlab(&["replay", "--report", report.to_str().unwrap(), "--index", "3"]);
    assert_eq!(String::from_utf8(one.stdout).unwrap().lines().count(), 1);
}

#[test]
fn tampered_reports_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text) = run_to(dir.path(), "n-basic", &[]);
    let path = dir.path().join("tampered.json");
    let mut report: serde_json::Value = serde_json::from_str(&text).unwrap();
    report["document"]["bounds"]["L"] = 5.into();
    std::fs::write(&path, report.to_string()).unwrap();
    assert_eq!(code(&covlab(&["replay", "--report", path.to_str().unwrap()])), 3);
}

#[test]
fn overrides_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let (c, text) = run_to(dir.path(), "n-basic", &["--truncation", "3", "--word-length", "1", "--seed", "9", "--backend", "float"]);
    assert_eq!(c, 0);
    let r: serde_json::Value = serde_json::from_str(&text).unwrap();
    let s = &r["environment"]["bounds"];
    assert_eq!((s["L"].as_u64(), s["W"].as_u64(), s["seed"].as_u64()), (Some(3), Some(1), Some(9)));
    assert_eq!(s["backend"], "float");
}

#[test]
fn validate_and_list() {
    let o = covlab(&["validate", "--scenario", "crossed-n-z2"]);
    assert_eq!(code(&o), 0);
    let o = covlab(&["list-scenarios"]);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.lines().any(|l| l.starts_with("s23-shift-T4")));
    assert_eq!(out.lines().count(), 14);
}

#[test]
fn bad_scenarios_exit_with_errors() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = dir.path().join("ragged.json");
    std::fs::write(
        &ragged,
        r#"{"schema": 1, "name": "ragged", "monoid": {"family": "numerical", "generators": [1]},
            "product_system": {"dim": 2, "coefficients": [[[1, 0], [0]]], "fibers": []},
            "representations": [{"name": "lambda", "kind": "fock"}],
            "checks": [{"check": "fock-axioms"}]}"#,
    )
    .unwrap();
    let o = covlab(&["validate", "--scenario", ragged.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("product_system.coefficients[0][1]"), "{err}");

    assert_eq!(code(&covlab(&["run", "--scenario", "no-such-scenario"])), 3);
}

#[test]
fn nica_on_a_non_lcm_monoid_warns_then_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nica23.json");
    std::fs::write(
        &path,
        r#"{"schema": 1, "name": "nica23", "monoid": {"family": "numerical", "generators": [2, 3]},
            "representations": [{"name": "lambda", "kind": "fock"}],
            "bounds": {"L": 3, "L_big": 4},
            "checks": [{"check": "right-lcm"}, {"check": "nica"}]}"#,
    )
    .unwrap();
    let o = covlab(&["run", "--scenario", path.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("warning"), "{err}");
    assert_eq!(code(&o), 3, "{err}");
}
