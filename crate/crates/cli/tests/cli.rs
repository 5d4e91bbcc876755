use std::process::{Command, Output};

use serde_json::Value;

fn ibf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibf")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = ibf(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gehan_report() {
    let r = json(&["gehan", "--scheme", "smts", "--L", "210", "--seed", "7"]);
    let bf = r["bf10"].as_f64().unwrap();
    assert!((440.0..=660.0).contains(&bf), "{bf}");
    assert!(r["posterior_prob_m1"].as_f64().unwrap() >= 0.995);
    assert_eq!(r["L"], 210);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["scheme"], "smts");
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["command", "parameters", "log_bf10", "bf10", "mc_std_error", "posterior_prob_m1", "scheme", "L", "seed", "skipped_samples", "warnings"] {
        assert!(keys.contains(&k), "{k}");
    }
}

#[test]
fn spec_examples() {
    let q = json(&["intrinsic", "--family", "poisson", "--theta0", "2", "--quantile", "0.5"]);
    assert!((q["values"]["quantile"].as_f64().unwrap() - 3.40).abs() < 0.01);
    let o = json(&["ohagan", "--n", "10", "--mode", "smts-exact"]);
    assert!((o["bf10"].as_f64().unwrap() - 0.51111).abs() < 1e-5);
}

#[test]
fn warnings_are_reported() {
    let w = |v: &Value| v["warnings"].as_array().unwrap().len();
    let improper = json(&["intrinsic", "--family", "bernoulli-haldane-mts", "--theta0", "0.3"]);
    assert_eq!(w(&improper), 1);
    let boundary = json(&["bernoulli", "--bits", "0,0,0,1", "--theta0", "0", "--epsilon", "1e-6"]);
    assert_eq!(w(&boundary), 1);
    let dir = std::env::temp_dir().join(format!("ibf-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("flat.csv");
    std::fs::write(&path, "y,x\n1,0\n1,1\n1,2\n2.5,3\n0.2,4\n").unwrap();
    let lin = json(&["linreg", "--data", path.to_str().unwrap(), "--complex", "x"]);
    assert_eq!(lin["skipped_samples"], 1);
    assert_eq!(w(&lin), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(ibf(&["gehan", "--scheme", "nope"]).status.code(), Some(2));
    assert_eq!(ibf(&["poisson", "--count", "3", "--exposure", "1"]).status.code(), Some(2));
    assert_eq!(ibf(&["bernoulli", "--bits", "0,1", "--theta0", "0"]).status.code(), Some(1));
    let bad = ibf(&["one-sample-exp", "--group", "treated", "--theta0", "-1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn study_csv() {
    let out = ibf(&["findley", "--grid", "100,1000", "--L", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n_or_m,param,median_log_bf,slope_to_here,seeds"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["gehan", "--scheme", "random-mts", "--seed", "3"][..],
        &["poisson", "--count", "4", "--exposure", "2", "--theta0", "1", "--L", "500", "--seed", "5"][..],
        &["appendix"][..],
    ] {
        assert_eq!(ibf(args).stdout, ibf(args).stdout);
    }
}
