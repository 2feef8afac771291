use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mishchenko"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(out: &Path) -> Value {
    let text = std::fs::read_to_string(out.join("summary.json")).expect("summary written");
    serde_json::from_str(&text).expect("summary is JSON")
}

fn check<'a>(s: &'a Value, name: &str) -> &'a Value {
    s["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn config_at(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--task", "selftest"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let s = summary(dir.path());
    assert_eq!(s["passed"], true);
    assert!(s["checks"].as_array().unwrap().len() >= 40);
}

#[test]
fn circle_z3_flatness() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--config", &config_at("s1_z3_flatness.json")], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let s = summary(dir.path());
    assert!(check(&s, "degree0")["value"].as_f64().unwrap() < 1e-10);
    assert!(check(&s, "identity_degree2")["value"].as_f64().unwrap() < 1e-8);
    assert!(check(&s, "coboundary_degree2")["value"].as_f64().unwrap() < 1e-6);
    assert!((s["details"]["phi_q"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    for f in ["p_a.csv", "cochain_degree0.csv", "cochain_degree2.csv"] {
        let mut rows = csv::Reader::from_path(dir.path().join(f)).unwrap();
        assert!(rows.records().count() > 0, "{f} is empty");
    }
}

#[test]
fn malformed_cocycle_names_the_violation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--config", &config_at("malformed_cocycle.json")], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL cocycle"), "{stdout}");
    let s = summary(dir.path());
    assert_eq!(s["passed"], false);
    assert_eq!(check(&s, "cocycle")["passed"], false);
    assert_eq!(check(&s, "unitarity")["passed"], true);
    assert!(!s["details"]["cocycle_violations"].as_array().unwrap().is_empty());
}

#[test]
fn config_errors_carry_json_pointers() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--config", &config_at("bad_pointer.json")], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/cocycle/group/1/g"));
    assert_eq!(summary(dir.path())["error"]["pointer"], "/cocycle/group/1/g");

    let bad = dir.path().join("typo.json");
    std::fs::write(&bad, r#"{"task": "chern", "budgets": {"seed": 1, "contour_nodes": "many"}}"#).unwrap();
    let o = run(&["--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/budgets/contour_nodes"));

    std::fs::write(&bad, r#"{"space": {"circle": 12}}"#).unwrap();
    let o = run(&["--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/task"));

    std::fs::write(&bad, r#"{"task": "flatness", "budgets": {"pairs": 0}}"#).unwrap();
    let o = run(&["--config", bad.to_str().unwrap()], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/budgets/pairs"));
}

#[test]
fn summaries_are_byte_identical_across_runs() {
    for name in ["s1_z3_flatness.json", "z3_mishchenko.json", "cover_lemma.json"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(run(&["--config", &config_at(name)], a.path()).status.success());
        assert!(run(&["--config", &config_at(name)], b.path()).status.success());
        for entry in std::fs::read_dir(a.path()).unwrap() {
            let file = entry.unwrap().file_name();
            let x = std::fs::read(a.path().join(&file)).unwrap();
            let y = std::fs::read(b.path().join(&file)).unwrap();
            assert!(x == y, "{name}: {file:?} differs");
        }
    }
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_at("s1_z3_flatness.json");
    let o = run(&["--config", &cfg, "--task", "mishchenko-verify", "--seed", "99"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let s = summary(dir.path());
    assert_eq!(s["task"], "mishchenko-verify");
    assert_eq!(s["seed"], 99);
    assert!(check(&s, "phi_isometry")["value"].as_f64().unwrap() < 1e-10);

    // A vanishing tolerance scale fails residuals that are merely tiny.
    let o = run(&["--config", &cfg, "--tol-scale", "1e-30"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bundled_fixtures() {
    for (name, code) in [
        ("bott_chern.json", 0),
        ("z3_mishchenko.json", 0),
        ("explicit_bundle.json", 0),
        ("half_trace_index.json", 0),
        ("cover_lemma.json", 0),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(&["--config", &config_at(name)], dir.path());
        assert_eq!(o.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&o.stdout));
    }
    let dir = tempfile::tempdir().unwrap();
    run(&["--config", &config_at("bott_chern.json")], dir.path());
    let s = summary(dir.path());
    assert!((s["details"]["pairing"].as_f64().unwrap() - 1.0).abs() < 0.05);
    let dir = tempfile::tempdir().unwrap();
    run(&["--config", &config_at("half_trace_index.json")], dir.path());
    let r = &summary(dir.path())["details"]["report"];
    assert_eq!(r["ind_simple"], 2);
    assert!((r["ind_a"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(r["phi_q"], 0.5);
}
