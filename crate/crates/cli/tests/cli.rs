//! End-to-end runs of the `g2forge` binary.

use std::path::Path;
use std::process::{Command, Output};

use g2forge::json::parse_form;
use g2forge_core::{KForm, Rational};
use serde_json::Value;

fn g2forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2forge"))
        .args(args)
        .env_remove("G2FORGE_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn soliton_at_quarter_is_shrinking_with_c_minus_eleven_eighths() {
    let out = g2forge(&["compute", "--what", "soliton", "--instance", "gs:1/4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["backend"], "rational");
    assert_eq!(v["results"]["c"], "-11/8");
    assert_eq!(v["results"]["classification"], "shrinking");
    assert_eq!(v["results"]["singularity_time"], 12.0 / 11.0);

    let float = json(&g2forge(&["compute", "--what", "soliton", "--instance", "gs:0.25"]));
    assert_eq!(float["backend"], "float");
    let c: f64 = float["results"]["c"].as_str().unwrap().parse().unwrap();
    assert!((c + 11.0 / 8.0).abs() < 1e-12);
}

#[test]
fn fr_laplacian_round_trips() {
    let v = json(&g2forge(&["compute", "--what", "laplacian", "--instance", "fr"]));
    let lap: KForm<Rational> = parse_form(3, &v["results"]["laplacian"]).unwrap();
    let m8 = Rational::from_integer((-8).into());
    let expected = (KForm::e(&[1, 4, 6]) + KForm::e(&[2, 4, 5]) - KForm::e(&[5, 6, 7])).scale(&m8);
    assert_eq!(lap, expected);
    assert_eq!(v["results"]["family_formula_difference"], 0.0);
}

#[test]
fn zero_structure_constants_have_zero_torsion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "flat.json", r#"{"kind":"structure-constants","c":[]}"#);
    let v = json(&g2forge(&["compute", "--what", "torsion", "--config", &cfg]));
    for key in ["tau1", "tau2", "tau3"] {
        assert_eq!(v["results"][key], Value::Object(Default::default()), "{key}");
    }
    assert_eq!(v["results"]["tau0"], "0");
    assert_eq!(v["results"]["torsion_free"], true);
}

#[test]
fn family_config_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "gs.json",
        r#"{"kind":"family",
            "A1":[["3/8",0],[0,"-1/8"]],
            "A":[["3/8",0,0,0],[0,"-1/8",0,0],[0,0,"1/4",0],[0,0,0,"3/4"]],
            "B":[[0,0,0,0],[0,0,0,0],[0,-1,0,0],[-1,0,0,0]],
            "C":[[0,0,0,0],[0,0,0,0],[-1,0,0,0],[0,0,0,0]]}"#,
    );
    let a = json(&g2forge(&["compute", "--what", "torsion", "--config", &cfg]));
    let b = json(&g2forge(&["compute", "--what", "torsion", "--instance", "gs:0"]));
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn reports_are_byte_deterministic() {
    let args = ["compute", "--what", "ricci", "--instance", "sa:1/3"];
    assert_eq!(g2forge(&args).stdout, g2forge(&args).stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // bad input
    assert_eq!(code(&g2forge(&["compute", "--what", "nope", "--instance", "fr"])), 2);
    assert_eq!(code(&g2forge(&["compute", "--what", "torsion", "--instance", "xx:1"])), 2);
    assert_eq!(code(&g2forge(&["compute", "--what", "torsion", "--instance", "gs"])), 2);
    let bad = write(dir.path(), "bad.json", r#"{"kind":"family","A1":[[1]]}"#);
    assert_eq!(code(&g2forge(&["compute", "--what", "torsion", "--config", &bad])), 2);
    assert_eq!(
        code(&g2forge(&["--mode", "rational", "compute", "--what", "torsion", "--instance", "gs:0.5"])),
        2
    );
    // domain violations
    let not_lie = write(
        dir.path(),
        "nl.json",
        r#"{"kind":"structure-constants","c":[[1,2,3,1],[1,3,1,1]]}"#,
    );
    assert_eq!(code(&g2forge(&["compute", "--what", "torsion", "--config", &not_lie])), 3);
    let trace = write(
        dir.path(),
        "tr.json",
        r#"{"kind":"family","A1":[[0,0],[0,0]],"A":[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            "B":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],"C":[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    );
    assert_eq!(code(&g2forge(&["compute", "--what", "torsion", "--config", &trace])), 3);
    // verification failure names the check
    let out = g2forge(&["--mode", "float", "--tol", "1e-300", "verify-paper", "--only", "gs-laplacian"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("gs-laplacian"));
}

#[test]
fn erp_needs_closed_phi() {
    // the abelian structure is closed and torsion-free, hence ERP-trivial
    let v = json(&g2forge(&["compute", "--what", "erp", "--instance", "abelian"]));
    assert_eq!(v["results"]["residual"], 0.0);
    let fr = json(&g2forge(&["compute", "--what", "erp", "--instance", "fr"]));
    assert!(fr["results"]["residual"].as_f64().unwrap() > 0.1);
    assert_eq!(fr["results"]["rhs"]["e127"], "4/3");
}

#[test]
fn verify_only_runs_one_check_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = g2forge(&["verify-paper", "--only", "gs-torsion", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 1);
    assert_eq!(v["checks"][0]["name"], "gs-torsion");
    assert_eq!(v["checks"][0]["tolerance"], "exact");
    assert_eq!(code(&g2forge(&["verify-paper", "--only", "nope"])), 2);
}

#[test]
fn tolerance_env_override_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_g2forge"))
        .args(["--mode", "float", "verify-paper", "--only", "gs-laplacian", "--json"])
        .env("G2FORGE_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["checks"][0]["tolerance"], "< 1e-300");
}

#[test]
fn scan_gs_hits_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gs.csv");
    let out = g2forge(&[
        "scan", "--family", "gs", "--from", "0", "--to", "1", "--step", "1/100", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["param", "scal", "ric_norm", "F", "c", "classification", "laplacian_residual", "ricci_soliton_residual"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 102);
    let f = |r: &csv::StringRecord| r[3].parse::<f64>().unwrap();
    assert!((f(&rows[0]) - 75.0 / 23.0).abs() < 1e-12);
    // F crosses 135/49 in the grid cell containing sqrt(15)/8
    let s0 = 15f64.sqrt() / 8.0;
    let cell = rows
        .windows(2)
        .find(|w| f(&w[0]) >= 135.0 / 49.0 && f(&w[1]) < 135.0 / 49.0)
        .unwrap();
    let p = |r: &csv::StringRecord| g2forge::config::parse_literal(&r[0]).unwrap().to_f64();
    assert!(p(&cell[0]) <= s0 && s0 <= p(&cell[1]));
    let at = rows.iter().find(|r| &r[0] == "5/8").unwrap();
    assert_eq!(&at[3], "2.5");
    assert_eq!(at[7].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn scan_sa_flips_at_three_quarters() {
    let out = g2forge(&["scan", "--family", "sa", "--from", "0.7", "--to", "0.8", "--step", "0.05"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let classes: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(classes, ["shrinking", "steady", "expanding"]);
}

#[test]
fn empty_scan_is_header_only() {
    let out = g2forge(&["scan", "--family", "gs", "--from", "1", "--to", "0", "--step", "1/10"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn flow_from_gs0_completes_before_singularity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let out = g2forge(&[
        "flow", "--instance", "gs:0", "--t-end", "0.7", "--dt", "1e-4", "--sample-interval", "0.1", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("T = 0.800000"), "{summary}");
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap().len(), 10);
    let norms: Vec<f64> = rdr.records().map(|r| r.unwrap()[8].parse().unwrap()).collect();
    assert_eq!(norms.len(), 8);
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "blow-up indicator trends up: {norms:?}");
}

#[test]
fn flow_reports_blow_up_time() {
    let out = g2forge(&["flow", "--instance", "gs:0", "--t-end", "1", "--dt", "1e-3"]);
    assert_eq!(code(&out), 0);
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("singularity detected at t = 0.78"), "{summary}");
}

#[test]
fn flat_flow_is_constant() {
    let out = g2forge(&["flow", "--instance", "abelian", "--t-end", "0.5", "--dt", "0.1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let fields: Vec<&str> = r.split(',').collect();
        assert_eq!(&fields[1..8], ["1", "1", "1", "1", "-1", "-1", "-1"]);
    }
}

#[test]
fn adaptive_underflow_is_a_domain_error_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let out = g2forge(&[
        "flow", "--instance", "gs:0", "--t-end", "0.79", "--dt", "1e-3", "--stepper", "adaptive", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("underflow"));
    assert!(std::fs::read_to_string(&path).unwrap().lines().count() > 100);
}

#[test]
fn bad_flow_inputs() {
    assert_eq!(code(&g2forge(&["flow", "--instance", "gs:0", "--t-end", "1", "--dt", "0"])), 2);
    assert_eq!(code(&g2forge(&["flow", "--instance", "gs:0", "--t-end", "1", "--dt", "0.1", "--stepper", "euler"])), 2);
}
