use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn itlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itlab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("itlab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn inspect_reports_dimension() {
    let out = itlab(&["--format", "json", "inspect", &fixture("f2")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "itlab/1");
    assert_eq!(v["algebra"]["dim"], 15);
}

#[test]
fn phi_of_periodic_module() {
    let out = itlab(&["--format", "json", "phi", &fixture("f3"), "--module", "Sum(S(1),S(loop))"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["phi"], 2);
    assert_eq!(v["report"]["rank_sequence"], serde_json::json!([2, 2, 1]));
}

#[test]
fn text_output_carries_the_json_values() {
    let f = fixture("f3");
    let args = ["phi", f.as_str(), "--module", "S(loop)", "--side", "r"];
    let text = String::from_utf8(itlab(&args).stdout).unwrap();
    let mut j = vec!["--format", "json"];
    j.extend(args);
    let v = json(&itlab(&j));
    assert!(text.lines().any(|l| l == format!("report.phi: {}", v["report"]["phi"])));
    assert!(text.lines().any(|l| l == "side: r"));
}

#[test]
fn ideal_report_round_trips() {
    let out = itlab(&["--format", "json", "ideal", &fixture("f2"), "--vertices", "3,4,5", "--printed", "phi_r_dim_gld_corner=5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let back: itlab::report::IdealSummary = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&back).unwrap(), v);
    assert_eq!(back.ideal_dim, 11);
    assert_eq!(back.bound_report.formula("phi_r_dim_gld_corner").unwrap().printed_agrees, Some(false));
}

#[test]
fn verify_passes_on_f1() {
    let out = itlab(&["--format", "json", "verify", &fixture("f1"), "--vertices", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out).get("timings_ms").map_or(true, Value::is_null));
}

#[test]
fn output_flag_writes_file() {
    let dir = scratch("output");
    let path = dir.join("inspect.json");
    let out = itlab(&["--format", "json", "-o", path.to_str().unwrap(), "inspect", &fixture("f1")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["algebra"]["dim"], 3);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn input_errors_exit_with_three() {
    assert_eq!(itlab(&["inspect", "/nonexistent/algebra.json"]).status.code(), Some(3));
    assert_eq!(itlab(&["ideal", &fixture("f1"), "--vertices", "9"]).status.code(), Some(3));
    assert_eq!(itlab(&["phi", &fixture("f1"), "--module", "S(9)"]).status.code(), Some(3));
    let dir = scratch("schema");
    let path = dir.join("bad.json");
    let body = std::fs::read_to_string(fixture("f1")).unwrap().replace("itlab/1", "itlab/0");
    std::fs::write(&path, body).unwrap();
    assert_eq!(itlab(&["inspect", path.to_str().unwrap()]).status.code(), Some(3));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn small_fuzz_run_is_reproducible() {
    let args = ["--format", "json", "fuzz", "--seed", "3", "--iterations", "3"];
    let dir = scratch("fuzz");
    let run = || Command::new(env!("CARGO_BIN_EXE_itlab")).args(args).current_dir(&dir).output().unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.stdout, b.stdout);
    assert!(matches!(a.status.code(), Some(0 | 1 | 2)));
    std::fs::remove_dir_all(dir).unwrap();
}
