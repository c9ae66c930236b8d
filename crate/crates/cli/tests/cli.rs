use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn polmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polmod")).args(args).env_remove("POLMOD_FIXTURES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn frobenius_text() {
    let o = polmod(&["frobenius", "--n", "3", "--ell", "2", "--gen", "p[2]"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("frobenius: (1 + s[1] + s[2]) s[n] + s[1] s[n-1,1]"), "{text}");
    assert!(text.contains("dimension: 10"));
}

#[test]
fn frobenius_json_shape() {
    let o = polmod(&["frobenius", "--n", "3", "--ell", "2", "--gen", "p[2]", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for key in ["n", "ell", "generators", "frobenius", "hilbert", "hilbert_h_basis", "dimension"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["dimension"], 10);
}

#[test]
fn classify_json() {
    let o = polmod(&["classify", "--n", "3", "--point", "2,-3,12", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let p = &json(&o)["points"][0];
    assert_eq!(p["class"], "P3");
    assert_eq!(p["exception"], true);
}

#[test]
fn exceptions_json() {
    let o = polmod(&["exceptions", "--n", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["equation"]["lhs"], "a(b+c)");
    assert_eq!(v["equation"]["rhs"], "b^2");
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["frobenius", "--n", "0", "--gen", "p[2]"][..],
        &["frobenius", "--gen", "p[2"],
        &["frobenius", "--bogus"],
        &["nonsense"],
        &["verify", "table:99"],
    ] {
        let o = polmod(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(polmod(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_fast_examples() {
    let o = polmod(&["verify", "examples:fast"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("summary: 10 checks, 10 passed, 0 failed"));
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polmod-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn fixture_override_reports_mismatch() {
    let dir = scratch_dir("fixtures");
    let bundled = include_str!("../fixtures/fast_examples.json");
    let mut v: Value = serde_json::from_str(bundled).unwrap();
    v["rows"].as_array_mut().unwrap().truncate(1);
    v["rows"][0]["series"] = Value::from("s[3]");
    std::fs::write(dir.join("fast_examples.json"), v.to_string()).unwrap();

    let o = Command::new(env!("CARGO_BIN_EXE_polmod"))
        .args(["verify", "examples:fast", "--format", "json"])
        .env("POLMOD_FIXTURES", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let report = json(&o);
    assert_eq!(report["summary"]["failed"], 1);
    assert_eq!(report["sets"][0]["results"][0]["status"], "FAIL");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_fixture_dir_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_polmod"))
        .args(["verify", "table:1"])
        .env("POLMOD_FIXTURES", "/nonexistent/polmod-fixtures")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
