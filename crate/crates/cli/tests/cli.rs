use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fyamabe")).args(args).output().expect("spawn fyamabe")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn f_integral_reports_exact_coefficient() {
    let out = run(&["f-integral", "--kind", "1", "--alpha", "1", "--beta", "2", "--n", "25", "--gamma", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["coeff"], "55/42");
    assert_eq!(v["printed_agrees"], true);
    assert!(v["config"]["command"].as_str().unwrap().contains("gamma: 1/2"));
}

#[test]
fn identities_rows_all_equal() {
    let out = run(&["verify-identities", "--dim", "5", "--trials", "3", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3 * 13);
    assert!(rows.iter().all(|r| r["equal"] == true));
}

#[test]
fn same_arguments_give_identical_reports() {
    let args = ["verify-identities", "--dim", "4", "--trials", "2", "--seed", "11", "--format", "csv"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn gamma_star_interval() {
    let v = json(&run(&["gamma-star", "--width", "1/10000000"]));
    let lo: f64 = v["lo_decimal"].as_str().unwrap().parse().unwrap();
    let hi: f64 = v["hi_decimal"].as_str().unwrap().parse().unwrap();
    assert!(hi - lo <= 1e-7);
    assert!((lo - 0.940197).abs() < 1e-5 && (hi - 0.940197).abs() < 1e-5);
}

#[test]
fn build_p_lists_coefficients() {
    let v = json(&run(&["build-p", "--n", "25", "--gamma", "1/2", "--d0", "1", "--f", "1,-1", "--hessian"]));
    let p = v["P"].as_array().unwrap();
    assert_eq!(p.len(), 5);
    assert_eq!((&p[0], &p[1]), (&Value::from("0/1"), &Value::from("0/1")));
    assert_eq!(v["P_tilde_1"].as_array().unwrap().len(), 4);
    assert_eq!(v["unit"], "|S^{n-1}| |W|^2 A1 B2");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["disc", "--n", "24", "--gamma", "one/half"]).status.code(), Some(1));
    assert_eq!(run(&["disc", "--n", "24", "--gamma", "1/2", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["disc", "--n", "24", "--gamma", "1/2", "--format", "csv"]).status.code(), Some(1));
    // no real critical coefficient at (24, 19/20): a failed check, not a usage error
    let out = run(&["check-minimizer", "--n", "24", "--gamma", "95/100"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["c1_ok"], false);
    let out = run(&["check-minimizer", "--n", "52", "--gamma", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sweep_csv_schema() {
    let out = run(&["sweep", "--n-min", "23", "--n-max", "23", "--grid", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,gamma,d0,disc_sign,c1,c2,c3");
    assert_eq!(lines[1], "23,1/4,4,-,,,");
    assert_eq!(lines.len(), 4);
}

#[test]
fn errata_lists_both_values() {
    let v = json(&run(&["errata"]));
    let rows = v["errata"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r["printed_value"] != r["engine_value"]));
}
