use std::process::{Command, Output};

use serde_json::Value;

fn mdcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdcf")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn parse_f64(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn mn_golden_ratio_rows_approach_limit() {
    let out = mdcf(&["mn", "[0;(1)]", "--n-max", "30", "--digits", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 31);
    for row in &rows[10..] {
        assert!((parse_f64(&row["value_lo"]) - 0.47360680).abs() < 1e-6);
        assert_eq!(row["class"], "consecutive");
    }
}

#[test]
fn mn_silver_ratio_rows() {
    let out = mdcf(&["mn", "[0;(2)]", "--n-max", "30"]);
    let rows = json(&out);
    for row in &rows.as_array().unwrap()[10..] {
        assert!((parse_f64(&row["value_hi"]) - 0.42677669).abs() < 1e-6);
    }
}

#[test]
fn mn_reports_one_skip_row() {
    let rows = json(&mdcf(&["mn", "[0;3,1,1,(100)]", "--n-max", "10"]));
    let skips = rows.as_array().unwrap().iter().filter(|r| r["class"] == "skip").count();
    assert_eq!(skips, 1);
}

#[test]
fn csv_columns_match_json_order() {
    let out = mdcf(&["mn", "[0;(1)]", "--n-max", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,class,nu,value_lo,value_hi"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(mdcf(&["mn", "[0;1,x]"]).status.code(), Some(2));
    assert_eq!(mdcf(&["mn", "--no-such-flag"]).status.code(), Some(2));
    let exhausted = mdcf(&["mn", "[0;1,1,1,1,...]", "--n-max", "10"]);
    assert_eq!(exhausted.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&exhausted.stderr).contains("index"));
    assert_eq!(mdcf(&["construct", "--m", "0.6"]).status.code(), Some(4));
    assert_eq!(mdcf(&["construct", "--m", "0.25"]).status.code(), Some(4));
    assert_eq!(mdcf(&["omega0", "--digits", "0"]).status.code(), Some(2));
}

#[test]
fn omega0_decimal() {
    let v = json(&mdcf(&["omega0", "--r0", "6", "--digits", "12"]));
    assert_eq!(v["omega0"], "0.328953102076");
    assert_eq!(v["exact"], "(32231 - 432√5)/95044");
}

#[test]
fn tau_depth_8_passes() {
    let out = mdcf(&["tau", "--depth", "8", "--tau", "1.788"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn tau_above_threshold_fails_with_code_1() {
    let out = mdcf(&["tau", "--depth", "3", "--tau", "1.8", "--exact"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn covering_ok() {
    let v = json(&mdcf(&["covering", "--r0", "6", "--r-max", "60"]));
    assert_eq!(v["ok"], true);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn construct_writes_alpha_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alpha.cf");
    let out = mdcf(&["construct", "--m", "0.30", "--eps", "1e-10", "--blocks", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["invariants_hold"], true);
    assert_eq!((v["r1"].as_u64(), v["r2"].as_u64()), (Some(9), Some(10)));
    assert!(parse_f64(&v["final_distance"]) < 1e-6);
    let literal = std::fs::read_to_string(&path).unwrap();
    let alpha = mdcf::cf_parse(literal.trim()).unwrap();
    assert_eq!(alpha.known_len(), v["alpha_len"].as_u64().map(|n| n as usize));
}

#[test]
fn construct_at_omega0_uses_corner_digits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corner.cf");
    let v = json(&mdcf(&["construct", "--m", "0.3289531020760920", "--out", path.to_str().unwrap()]));
    assert_eq!((v["r1"].as_u64(), v["r2"].as_u64()), (Some(6), Some(6)));
    assert!(v["b_digits"].as_str().unwrap().starts_with("5,1,"));
    assert!(v["c_digits"].as_str().unwrap().starts_with("5,1,"));
}

#[test]
fn vahlen_is_deterministic_per_seed() {
    let a = mdcf(&["vahlen", "--samples", "40", "--seed", "7"]);
    let b = mdcf(&["vahlen", "--samples", "40", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["ok"], true);
}
