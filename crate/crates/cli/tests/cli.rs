use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn warpcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn export(name: &str, dir: &Path) -> String {
    let path = dir.join(format!("{name}.json"));
    let out = warpcert(&["catalog", "export", name, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn catalog_list_names_every_entry() {
    let out = warpcert(&["catalog", "list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in warpcert::grw::catalog_names() {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn exported_frw_dust_certifies_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = export("frw-dust", dir.path());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = warpcert(&["certify", &spec, "--points", "6", "--json", a.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("∇_m C_{jkl}^m = 0"));
    assert!(text.contains("verdict: PASS"));
    let out = warpcert(&[
        "certify",
        &spec,
        "--points",
        "6",
        "--quiet",
        "--workers",
        "3",
        "--json",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(read_json(&a)["verdict"], "pass");
}

#[test]
fn negative_control_exits_one() {
    let out = warpcert(&["catalog", "run", "kasner-negative", "--points", "4"]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("conclusion checks are informational"));
}

#[test]
fn missing_dimension_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = export("minkowski", dir.path());
    let mut value: Value = read_json(Path::new(&spec));
    value.as_object_mut().unwrap().remove("dimension");
    std::fs::write(&spec, value.to_string()).unwrap();
    let out = warpcert(&["certify", &spec]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&warpcert(&["catalog", "run", "no-such-metric"])), 2);
    assert_eq!(code(&warpcert(&["certify", "/nonexistent/spec.json"])), 2);
    assert_eq!(
        code(&warpcert(&["catalog", "run", "minkowski", "--checks", "bogus"])),
        2
    );
    assert_eq!(code(&warpcert(&["catalog", "run", "minkowski", "--points", "0"])), 2);
    assert_eq!(code(&warpcert(&["certify"])), 2);
}

#[test]
fn selection_marks_the_rest_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = warpcert(&[
        "catalog",
        "run",
        "einstein-static",
        "--points",
        "3",
        "--checks",
        "div_weyl,physics",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = read_json(&json);
    let checks = report["checks"].as_array().unwrap();
    let find = |n: &str| checks.iter().find(|c| c["name"] == n).unwrap();
    assert_eq!(find("div_weyl")["status"], "pass");
    assert_eq!(find("homothetic_equivalence")["status"], "pass");
    assert_eq!(find("chen_vector")["skipped_reason"], "not selected");
}

#[test]
fn ladder_subcommand_reports_the_nine_identities() {
    let dir = tempfile::tempdir().unwrap();
    let spec = export("frw-k+1", dir.path());
    let json = dir.path().join("l.json");
    let out = warpcert(&["ladder", &spec, "--points", "3", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = read_json(&json);
    let evaluated: Vec<&Value> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] != "skipped")
        .collect();
    assert_eq!(evaluated.len(), 9);
    assert!(evaluated
        .iter()
        .all(|c| c["name"].as_str().unwrap().starts_with("ladder.")));
}
