use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_g2-forge")).args(args).output().expect("spawn");
    let code = out.status.code().unwrap_or(-1);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn verify_algebra_reports_tables() {
    let (code, v) = run(&["verify-algebra", "--samples", "10", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["table1"], "49/49");
    assert_eq!(v["g2_dim"], 14);
    assert_eq!(v["dcp"], "pass");
}

#[test]
fn solve_hitchin_preset() {
    let (code, v) = run(&["solve", "--preset", "hitchin", "--grid", "16"]);
    assert_eq!(code, 0);
    assert_eq!(v["converged"], "pass");
    assert!((v["norms"]["alpha_sq"]["mean"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    assert!((v["norms"]["beta_sq"]["mean"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn solve_writes_json_file() {
    let path = std::env::temp_dir().join(format!("g2-forge-solve-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, _) = run(&["solve", "--preset", "flat-constant", "--grid", "8", "--json", p]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let b = v["norms"]["beta_sq"]["mean"].as_f64().unwrap();
    assert!((b - 2f64.powf(-1.0 / 3.0)).abs() < 1e-9);
    let _ = std::fs::remove_file(path);
}

#[test]
fn certify_polynomials() {
    let (code, v) = run(&["certify", "--case", "pho-polynomials"]);
    assert_eq!(code, 0);
    for k in ["C_XX", "C_XY", "C_YY"] {
        assert_eq!(v[k], "positive");
    }
}

#[test]
fn sample_fiber_counts() {
    let (code, v) = run(&["sample-fiber", "--kind", "pho", "--resolution", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 64);
    assert_eq!(v["membership_failures"], 0);
}

#[test]
fn classify_single_row() {
    let (code, v) = run(&["classify", "--genus", "2", "--degree", "1", "--alpha", "--beta"]);
    assert_eq!(code, 0);
    assert_eq!(v["genus"], 2);
    assert!(v["stability"].is_string());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["sample-fiber", "--kind", "ein", "--resolution", "0"]).0, 2);
    assert_eq!(run(&["solve", "--data", "/nonexistent/grid.csv"]).0, 2);
    assert_eq!(run(&["bogus"]).0, 2);
}
