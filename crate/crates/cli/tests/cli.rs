use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn igp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igp"))
        .args(args)
        .env("IGP_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn emit(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let out = igp(&["compendium", "emit", name, "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn kzh(dir: &TempDir) -> String {
    emit(dir.path(), "kzh_minimal_has_only_crazy_perturbation_1").display().to_string()
}

#[test]
fn minimality_of_kzh() {
    let dir = TempDir::new().unwrap();
    let out = igp(&["minimality", &kzh(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "minimal: true\n");
}

#[test]
fn non_minimal_exits_with_one_and_names_violations() {
    let dir = TempDir::new().unwrap();
    let path = emit(dir.path(), "gomory_fractional");
    let out = igp(&["minimality", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("minimal: false\n"));
    assert!(text.contains("violation: symmetry"));
}

#[test]
fn extremality_protocol() {
    let dir = TempDir::new().unwrap();
    let out = igp(&["extremality", "--assume-pwc", &kzh(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("before merge: 2 components, uncovered: (219/800, 269/800) (371/800, 421/800)\n"));
    assert!(text.contains("linearly independent over Q"));
    assert!(text.contains("\ndimension: 0\n"));
    assert!(text.ends_with("verdict: extreme relative to piecewise continuous perturbations\n"));
}

#[test]
fn extremality_without_dense_merge_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let out = igp(&["extremality", &kzh(&dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("verdict: inconclusive"));
}

#[test]
fn verify_perturbation_reports_epsilon() {
    let dir = TempDir::new().unwrap();
    let pi = kzh(&dir);
    let pbar = emit(dir.path(), "kzh_crazy_perturbation");
    let out = igp(&["verify-perturbation", &pi, pbar.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("effective: yes\n"));
    let line = text.lines().find(|l| l.starts_with("epsilon (decimal): ")).unwrap();
    let eps: f64 = line["epsilon (decimal): ".len()..].parse().unwrap();
    assert!(eps >= 0.0003);
    assert!((eps - 0.0003958663221935161).abs() < 1e-12);
}

#[test]
fn json_output_parses() {
    let dir = TempDir::new().unwrap();
    let path = emit(dir.path(), "nonextreme_fixture");
    let out = igp(&["--format", "json", "extremality", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "not_extreme");
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["perturbations"].as_array().unwrap().len(), 2);
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"breakpoints\": [").unwrap();
    let out = igp(&["minimality", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let missing = igp(&["minimality", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(igp(&["compendium", "emit", "no_such_entry"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let pi = kzh(&dir);
    let a = igp(&["covering", "--assume-pwc", &pi]);
    let b = igp(&["covering", "--assume-pwc", &pi]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let again = emit(dir.path(), "kzh_minimal_has_only_crazy_perturbation_1");
    assert_eq!(std::fs::read(&pi).unwrap(), std::fs::read(again).unwrap());
}

#[test]
fn show_complex_and_polygons() {
    let dir = TempDir::new().unwrap();
    let path = emit(dir.path(), "gmic");
    let csv = dir.path().join("faces.csv");
    let out = igp(&["show-complex", path.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let faces = v["faces"].as_array().unwrap();
    let additive = faces.iter().filter(|f| f["additive"] == true).count();
    assert!(additive > 0);
    let polygons = std::fs::read_to_string(csv).unwrap();
    assert!(polygons.lines().any(|l| l == "face,dimension,vertex,x,y"));
}

#[test]
fn plot_data_lists_cosets() {
    let dir = TempDir::new().unwrap();
    let pi = kzh(&dir);
    let pbar = emit(dir.path(), "kzh_crazy_perturbation");
    let out = igp(&["plot-data", &pi, "--perturbation", pbar.to_str().unwrap(), "--samples", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# on (219/800, 269/800): value 1 on 219/800 + T"));
    // 40 breakpoints, each with 2 samples, for pi and for the zero pwl part
    assert_eq!(text.lines().filter(|l| l.starts_with("function_")).count(), 120);
}

#[test]
fn compendium_list_names_entries() {
    let out = igp(&["compendium", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["gmic", "gomory_fractional", "kzh_minimal_has_only_crazy_perturbation_1", "kzh_crazy_perturbation"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name} ("))), "{name}");
    }
}
