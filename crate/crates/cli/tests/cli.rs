use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn logskel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logskel")).args(args).env_remove("LOGSKEL_OUT_DIR").output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = logskel(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    assert_eq!(v["schema"], "1");
    v
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("logskel-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn weight_lists_the_example_values() {
    let v = report(&["weight", "--pair", "fixture:example_pair", "--form", "fixture:example_form"]);
    let ws: Vec<&str> = v["values"].as_array().unwrap().iter().map(|r| r["weight"].as_str().unwrap()).collect();
    assert_eq!(ws, ["2", "3", "3"]);
    let labels: Vec<&str> = v["values"].as_array().unwrap().iter().map(|r| r["point"]["kato_point"].as_str().unwrap()).collect();
    assert_eq!(labels, ["{D1}", "{D2}", "{D3}"]);
}

#[test]
fn gl2_character_variety_is_a_homology_three_sphere() {
    let v = report(&["character-variety", "--group", "gl", "--n", "2"]);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0, 1]));
    assert_eq!(v["sphere_profile"], true);
}

#[test]
fn gauss_exponents() {
    let v = report(&["gauss", "--c", "1", "--a", "1", "--l", "2", "--m", "1"]);
    assert_eq!((v["log_r"].as_str(), v["log_triv"].as_str(), v["log_disc"].as_str()), (Some("-2"), Some("-2"), Some("-4")));
    assert_eq!(v["holds"], true);
}

#[test]
fn ks_and_residue_of_the_example() {
    let ks = report(&["ks", "--pair", "fixture:example_pair", "--form", "fixture:example_form"]);
    assert_eq!(ks["min_value"], "2");
    assert_eq!(ks["faces"].as_array().unwrap().len(), 1);
    assert_eq!(ks["faces"][0]["vertices"], serde_json::json!([["1/2"]]));
    let res = report(&["residue", "--pair", "fixture:example_pair", "--form", "fixture:example_form", "--along", "D4"]);
    assert_eq!(res["form"]["charts"][0]["numerator"]["num"][0]["coeff"], "6");
    assert_eq!(res["ks"]["min_value"], "3");
}

#[test]
fn tate_cases() {
    assert_eq!(report(&["tate", "--n", "2", "--alpha", "1,1"])["classification"]["case"], "generic_only");
    assert_eq!(report(&["tate", "--n", "2", "--alpha", "1,-1"])["classification"]["case"], "single_divisor");
    let v = report(&["tate", "--n", "2", "--alpha", "-1,-1"]);
    let contained: Vec<usize> = v["classification"]["strata"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["contained"] == true)
        .map(|s| s["j_set"].as_array().unwrap().len())
        .collect();
    assert_eq!(contained, [2, 2]);
}

#[test]
fn dwork_slice_with_off_export() {
    let dir = scratch("slice");
    let out = Command::new(env!("CARGO_BIN_EXE_logskel"))
        .args(["slice", "--pair", "fixture:dwork_pair", "--form", "fixture:dwork_form", "--off", "d.off", "--out", "d.json"])
        .env("LOGSKEL_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("d.json")).unwrap()).unwrap();
    assert_eq!(v["betti"], serde_json::json!([1, 1]));
    assert!(std::fs::read_to_string(dir.join("d.off")).unwrap().starts_with("OFF\n"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn closure_classifies_points_of_p2() {
    let dir = scratch("closure");
    let pts = dir.join("pts.json");
    std::fs::write(&pts, r#"[{"kato_point": "{r0,r1}", "weights": ["inf", "inf"]}, {"kato_point": "{r2}", "weights": ["3"]}]"#).unwrap();
    let v = report(&["closure", "--fan", "fixture:p2_fan", "--points", pts.to_str().unwrap()]);
    assert_eq!(v["strata"].as_array().unwrap().len(), 7);
    assert_eq!(v["classified"][0]["stratum"], "{r0,r1}");
    assert_eq!(v["classified"][1]["stratum"], "{}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn homology_and_dual_complex() {
    let dir = scratch("homology");
    let c = dir.join("c.json");
    std::fs::write(&c, r#"{"vertices": ["a", "b", "c", "d"], "facets": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]}"#).unwrap();
    assert_eq!(report(&["homology", "--complex", c.to_str().unwrap()])["betti"], serde_json::json!([1, 0, 1]));
    assert_eq!(report(&["dual-complex", "--fan", "fixture:p2_fan"])["betti"], serde_json::json!([1, 1]));
    assert_eq!(report(&["dual-complex", "--pair", "fixture:dwork_pair"])["betti"], serde_json::json!([1, 1]));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    let args = ["essential", "--pair", "fixture:a2_pair", "--form", "fixture:a2_forms#sum", "--form", "fixture:a2_forms#z1"];
    assert_eq!(logskel(&args).stdout, logskel(&args).stdout);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = scratch("invalid");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"mode": "trivial", "charts": [], "strata": [["D"]], "extra": 1}"#).unwrap();
    let out = logskel(&["skeleton", "--pair", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));
    assert_eq!(logskel(&["weight", "--pair", "missing.json", "--form", "missing.json"]).status.code(), Some(2));
    assert_eq!(logskel(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(logskel(&["character-variety", "--group", "gl", "--n", "7"]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn fixtures_suite_passes() {
    let out = logskel(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failed"], 0);
}
