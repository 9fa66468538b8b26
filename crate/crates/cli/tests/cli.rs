use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn instance(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../instances");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn gpw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpw")).args(args).output().expect("gpw runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn certify_h_10_1_at_order_one() {
    let out = gpw(&["certify", "--instance", &instance("H_10_1.json"), "--order", "1", "--points", "20"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["worst_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["points"].as_array().unwrap().len(), 20);
}

#[test]
fn classify_symmetric_instance() {
    let out = gpw(&["classify", "--instance", &instance("S_10.json")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["classification"]["symmetric"], true);
    assert_eq!(v["classification"]["curvature_homogeneity"], "inf-flat");
}

#[test]
fn weyl_invariants_vanish_for_exponential_psi() {
    let out = gpw(&["weyl", "--instance", &instance("N_10_exp.json"), "--max-slots", "8"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["all_zero"], true);
    assert_eq!(v["max_abs"].as_f64(), Some(0.0));
}

#[test]
fn too_many_slots_is_a_structured_error() {
    let out = gpw(&["weyl", "--instance", &instance("N_10_exp.json"), "--max-slots", "14"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "scheme");
}

#[test]
fn parse_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"name\": \"bad\", \"p\": 1,\n \"f\": \"(* z1 (^ z0 2)\"}").unwrap();
    let out = gpw(&["describe", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let e = &json(&out)["error"];
    assert_eq!(e["kind"], "parse");
    assert!(e["line"].is_u64() && e["column"].is_u64());
}

#[test]
fn reports_are_byte_identical_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = gpw(&[
            "isometry",
            "--instance",
            &instance("H_10_1.json"),
            "--points",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
        (o.stdout, std::fs::read(out.join("isometry.json")).unwrap(), out.join("isometry.md").exists())
    };
    let (a, file_a, md) = run("a");
    let (b, _, _) = run("b");
    assert_eq!(a, b);
    assert_eq!(a, file_a);
    assert!(md);
}

#[test]
fn distinct_alpha_skips_the_map() {
    let out = gpw(&["isometry", "--instance", &instance("N_10_mix.json")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["decision"]["verdict"], "distinct");
    assert_eq!(v["decision"]["k"], 2);
    assert!(v["isometry"].is_null());
}

#[test]
fn geodesic_emits_csv() {
    let out = gpw(&["geodesic", "--instance", "H_10_1.json", "--points", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("t,x,z0,z1,"));
    assert_eq!(lines[1].split(',').count(), 11);
}

#[test]
fn verify_all_respects_instance_selection() {
    let out = gpw(&["verify-all", "--instance", &instance("N_10_mix.json")]);
    assert!(out.status.success());
    let v = json(&out);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["alpha-invariants", "classification"]);
    assert_eq!(v["passed"], true);
}
