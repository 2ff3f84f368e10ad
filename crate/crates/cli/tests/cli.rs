use std::process::{Command, Output};

use serde_json::Value;

fn mb(args: &[&str]) -> Output {
    mb_env(args, None)
}

fn mb_env(args: &[&str], precision: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mb"));
    c.args(args).env_remove("MB_PRECISION");
    if let Some(p) = precision {
        c.env("MB_PRECISION", p);
    }
    c.output().expect("spawn mb")
}

fn json_ok(args: &[&str]) -> Value {
    let o = mb(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn f(v: &Value) -> f64 {
    v.as_str().expect("numeric string").parse().expect("decimal")
}

/// Every finite numeric string carries at least 17 significant digits.
fn assert_digits(v: &Value) {
    match v {
        Value::String(s) => {
            if let Ok(x) = s.parse::<f64>() {
                if x.is_finite() {
                    let mantissa = s.split(['e', 'E']).next().unwrap();
                    let digits = mantissa.chars().filter(char::is_ascii_digit).count();
                    assert!(digits >= 17, "'{s}' has {digits} digits");
                }
            }
        }
        Value::Number(n) => assert!(!n.is_f64(), "bare float {n} in output"),
        Value::Array(a) => a.iter().for_each(assert_digits),
        Value::Object(o) => o.values().for_each(assert_digits),
        _ => {}
    }
}

#[test]
fn selberg_two_points() {
    let v = json_ok(&["selberg", "--n", "2", "--a1", "1", "--a2", "1", "--tau", "1"]);
    assert_eq!(v["schema"], "mb/1");
    assert_eq!(v["sign"], 1);
    let want = (1.0f64 / 6.0).ln();
    assert!((f(&v["log_value"]) - want).abs() < 1e-15 * want.abs());
    assert_digits(&v);
}

#[test]
fn laguerre_selberg_when_a2_omitted() {
    // ∫∫ e^{-x-y} (x-y)² = 2·2! - 2·1·1 = 2.
    let v = json_ok(&["selberg", "--n", "2", "--a1", "1", "--tau", "1"]);
    assert_eq!(v["integral"], "laguerre_selberg");
    assert!((f(&v["value"]) - 2.0).abs() < 1e-15);
}

#[test]
fn decimal_strings_round_trip() {
    let v = json_ok(&["selberg", "--n", "3", "--a1", "0.7", "--a2", "1.3", "--tau", "0.45"]);
    let s = v["value"].as_str().unwrap();
    let x: f64 = s.parse().unwrap();
    assert_eq!(format!("{:.16e}", x).parse::<f64>().unwrap(), x);
    assert_eq!(f(&v["a1"]), 0.7);
    assert_eq!(f(&v["tau"]), 0.45);
}

#[test]
fn q_poly_laguerre_degree_two() {
    let v = json_ok(&["poly", "--side", "q", "--weight", "laguerre", "--a", "0", "--theta", "1", "--k", "2"]);
    let c: Vec<f64> = v["coeffs"].as_array().unwrap().iter().map(f).collect();
    assert_eq!(c.len(), 3);
    for (got, want) in c.iter().zip([2.0, -4.0, 1.0]) {
        assert!((got - want).abs() < 1e-14, "{c:?}");
    }
    assert_eq!(v["side"], "q");
    assert_digits(&v);
}

#[test]
fn poly_oracle_and_double_precision() {
    let args = ["poly", "--side", "p", "--weight", "jacobi", "--a", "0.5", "--b", "1.5", "--theta", "2", "--k", "3"];
    let ext: Value = serde_json::from_slice(&mb_env(&args, Some("extended")).stdout).unwrap();
    let dbl: Value = serde_json::from_slice(&mb_env(&args, Some("double")).stdout).unwrap();
    assert_eq!(ext["precision"], "extended");
    assert_eq!(dbl["precision"], "double");
    for (a, b) in ext["coeffs"].as_array().unwrap().iter().zip(dbl["coeffs"].as_array().unwrap()) {
        assert!((f(a) - f(b)).abs() < 1e-12 * f(a).abs().max(1.0));
    }
    let mut with_oracle = args.to_vec();
    with_oracle.push("--oracle");
    let v = json_ok(&with_oracle);
    assert!(f(&v["oracle"]["max_rel_diff"]) < 1e-9);
}

#[test]
fn invalid_precision_is_a_usage_error() {
    let o = mb_env(&["selberg", "--n", "2", "--a1", "1", "--tau", "1"], Some("quad"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("MB_PRECISION"));
}

#[test]
fn norm_with_oracle() {
    // θ = 1 Laguerre, N = 2: ∫∫ e^{-x-y} (x-y)² = 2.
    let v = json_ok(&["norm", "--weight", "laguerre", "--a", "0", "--n", "2", "--theta", "1", "--oracle"]);
    assert!((f(&v["value"]) - 2.0).abs() < 1e-14);
    assert!(f(&v["oracle"]["rel_diff"]) < 1e-12);
    assert_digits(&v);
}

#[test]
fn spec_json_round_trip() {
    let args = ["norm", "--weight", "gen-cauchy", "--c", "0.3", "--alpha", "9", "--n", "3", "--theta", "1.5"];
    let v = json_ok(&args);
    let spec = serde_json::to_string(&v["spec"]).unwrap();
    let w = json_ok(&["norm", "--spec", &spec]);
    assert_eq!(v["log_value"], w["log_value"]);
    let wj = serde_json::to_string(&v["spec"]["weight"]).unwrap();
    let h = json_ok(&["hk", "--weight-json", &wj, "--theta", "1.5", "--k", "0"]);
    assert_eq!(h["weight"], v["spec"]["weight"]);
}

#[test]
fn jacobi_prime_bound_is_named() {
    let o = mb(&["norm", "--weight", "jacobi-prime", "--alpha", "0", "--beta", "3", "--n", "3", "--theta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("beta > alpha + N + theta*(N-1)"), "{e}");
}

#[test]
fn missing_and_irrelevant_parameters() {
    let o = mb(&["norm", "--weight", "jacobi", "--a", "1", "--n", "2", "--theta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--b is required"));
    let o = mb(&["norm", "--weight", "laguerre", "--a", "1", "--c", "2", "--n", "2", "--theta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--c does not apply"));
    let o = mb(&["norm", "--weight", "laguerre", "--a", "-1.5", "--n", "2", "--theta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mb(&["selberg", "--n", "2", "--a1", "1", "--a2", "1", "--tau", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flags_and_help() {
    let o = mb(&["selberg", "--n", "2", "--bogus", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(mb(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mb(&[]).status.code(), Some(2));
    let o = mb(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verify"));
}

#[test]
fn hk_reports_jacobi_erratum() {
    let v = json_ok(&["hk", "--weight", "jacobi", "--a", "0.5", "--b", "1", "--theta", "2", "--k-max", "3"]);
    assert_eq!(v["norms"].as_array().unwrap().len(), 4);
    let checks = v["erratum_checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        assert_eq!(c["status"], "expected_discrepancy");
        // 1/((k + a + b + 1)/θ + k)
        let k = c["k"].as_u64().unwrap() as f64;
        let want = 1.0 / ((k + 2.5) / 2.0 + k);
        assert!((f(&c["observed_factor"]) - want).abs() < 1e-12 * want);
    }
    let v = json_ok(&["hk", "--weight", "laguerre", "--a", "0.5", "--theta", "2", "--k", "4"]);
    assert_eq!(v["erratum_checks"][0]["status"], "agrees");
}

#[test]
fn kernel_grid_and_csv() {
    let base = ["kernel", "--weight", "laguerre", "--a", "1", "--n", "3", "--theta", "2"];
    let mut a = base.to_vec();
    a.extend(["--x", "0.5:1.5:3", "--y", "0.25,2"]);
    let v = json_ok(&a);
    let grid = v["grid"].as_array().unwrap();
    assert_eq!(grid.len(), 6);
    assert_eq!(f(&grid[2]["x"]), 1.0);
    assert!(v["convention"].as_str().unwrap().contains("weighted"));
    assert_digits(&v);
    a.extend(["--output", "csv"]);
    let o = mb(&a);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "x,y,K_bare,K_weighted");
    assert_eq!(lines.len(), 8);
}

#[test]
fn kernel_correlation() {
    let base = ["kernel", "--weight", "gen-gaussian", "--c", "0", "--n", "2", "--theta", "1"];
    let mut a = base.to_vec();
    a.extend(["--points", "0.3"]);
    let one = json_ok(&a);
    let mut g = base.to_vec();
    g.extend(["--x", "0.3"]);
    let grid = json_ok(&g);
    // The one-point function is the weighted diagonal.
    assert_eq!(one["correlation"]["weighted"], grid["grid"][0]["weighted"]);
    let mut three = base.to_vec();
    three.extend(["--points", "0.1,0.2,0.3"]);
    assert_eq!(mb(&three).status.code(), Some(2));
}

#[test]
fn sample_summary_and_csv() {
    let base = ["sample", "--weight", "laguerre", "--a", "1", "--n", "3", "--theta", "2", "--seed", "7"];
    let mut a = base.to_vec();
    a.extend(["--steps", "40000", "--count-below", "1"]);
    let v = json_ok(&a);
    let est = &v["statistics"]["sum_x"];
    let (mean, se) = (f(&est["mean"]), f(&est["stderr"]));
    let pred = f(&v["kernel_prediction"]["sum_x"]);
    assert!((mean - pred).abs() < 4.0 * se, "{mean} +- {se} vs {pred}");
    assert_eq!(v["burn_in"], 8000);
    assert!(v["statistics"]["count_below"]["mean"].is_string());
    let mut c = base.to_vec();
    c.extend(["--steps", "50", "--burn-in", "10", "--output", "csv"]);
    let o = mb(&c);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# spec: "));
    assert_eq!(lines[1], "# seed: 7");
    assert!(lines.contains(&"step,x_1,x_2,x_3"));
    // 50 sweeps in total, the first 10 discarded.
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#') && !l.starts_with("step")).count(), 40);
}

#[test]
fn verify_all_passes() {
    let o = mb(&["verify", "--suite", "all", "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for want in [
        "z_oracle",
        "parity",
        "hk_z_ratio",
        "hk_printed",
        "gram",
        "theta1_collapse",
        "f_nu_subsets",
        "kernel_trace",
        "kernel_projection",
    ] {
        assert!(names.contains(&want), "missing {want}");
    }
    let errata = v["erratum_checks"].as_array().unwrap();
    assert!(!errata.is_empty());
    assert!(errata.iter().all(|e| e["status"] == "expected_discrepancy"));
    assert!(stderr(&o).contains("PASS"));
    assert_digits(&v);
}

#[test]
fn verify_failure_and_bad_overrides() {
    let o = mb(&["verify", "--suite", "z", "--n-max", "3", "--tol", "z_oracle=1e-300"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"][0]["pass"], false);
    assert!(stderr(&o).contains("FAIL"));
    assert_eq!(mb(&["verify", "--tol", "nope=1"]).status.code(), Some(2));
    assert_eq!(mb(&["verify", "--n-max", "11"]).status.code(), Some(2));
    assert_eq!(mb(&["verify", "--suite", "fnu,collapse", "--n-max", "3"]).status.code(), Some(0));
}
