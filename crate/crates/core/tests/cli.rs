use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn workbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_workbench")).args(args).env_remove("WORKBENCH_CONFIG").output().unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("workbench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn passing_check_exits_zero() {
    let out = workbench(&["--json", "signs", "verify", "--identity", "m", "--arity-max", "4", "--deg-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "pass");
}

#[test]
fn counterexample_exits_one() {
    let out = workbench(&["--json", "signs", "verify", "--identity", "fprime", "--arity-max", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "counterexample");
    assert_eq!(v["mu"], serde_json::json!([0, 0, 0]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(workbench(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(workbench(&["signs", "verify", "--identity", "nonsense"]).status.code(), Some(2));
    let bad = scratch("bad.json", r#"{"checks": ["signs"], "unknown_key": 1}"#);
    assert_eq!(workbench(&["suite", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn suite_reports_are_stable_modulo_timing() {
    let config = scratch("signs.json", r#"{"checks": ["signs", "trees", "grading"], "seed": 11}"#);
    let run = || {
        let out = workbench(&["--json", "suite", "--config", config.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
        strip_timing(&mut v);
        serde_json::to_string(&v).unwrap()
    };
    let first = run();
    assert_eq!(first, run());
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn failing_suite_exits_one() {
    let config = scratch("strict.json", r#"{"checks": ["beta"], "tolerances": {"beta": 1e-300}}"#);
    let out = workbench(&["--json", "suite", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn config_from_environment_and_out_file() {
    let config = scratch("env.json", r#"{"checks": ["facets"]}"#);
    let target = scratch("report.json", "");
    let out = Command::new(env!("CARGO_BIN_EXE_workbench"))
        .args(["--json", "--out", target.to_str().unwrap(), "suite"])
        .env("WORKBENCH_CONFIG", &config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["checks"][0]["name"], "facets");
}

#[test]
fn beta_build_reports_slit_tip() {
    let out = workbench(&["--json", "beta", "build", "--weights", "1,1", "--punctures", "0,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0.5"), "{text}");
}
