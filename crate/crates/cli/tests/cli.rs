use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use ymblow::PotentialForm;
use ymblow_cli::config::{canonical, PhysRunConfig};
use ymblow_cli::criteria::eigenpair_identity;
use ymblow_cli::run::{check_manifest, RunDir};

fn ymblow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ymblow")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn params_prints_model_constants() {
    let o = ymblow(&["params", "--d", "7"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 9);
    assert!((v["beta"].as_f64().unwrap() - (2.0 + 5f64.sqrt())).abs() < 1e-12);
}

#[test]
fn low_dimension_is_a_usage_error() {
    let o = ymblow(&["params", "--d", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[dimension]"), "{}", stderr(&o));
}

#[test]
fn missing_and_malformed_configs_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    let missing = tmp.path().join("nope.json");
    let o = ymblow(&["evolve-phys", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config_missing"));

    let bad = write_config(tmp.path(), "bad.json", r#"{"nodes": 512, "colour": "red"}"#);
    let o = ymblow(&["evolve-phys", "--config", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config_parse"));

    let old = write_config(tmp.path(), "old.json", r#"{"config_version": "0"}"#);
    let o = ymblow(&["evolve-phys", "--config", &old, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config_version"));
}

#[test]
fn exact_data_run_writes_a_verified_record() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    let o = ymblow(&["evolve-phys", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = out.join("evolve-phys-001");
    assert!(check_manifest(&dir).unwrap());
    let fit = read_json(&dir.join("blowup_fit.json"));
    let t = fit["fit"]["t_est"].as_f64().unwrap();
    assert!((t - 1.0).abs() < 1e-3, "T = {t}");
    for name in ["config.json", "origin.csv", "profile_error.csv", "rescaled_snapshots.csv", "manifest.json"] {
        assert!(dir.join(name).exists(), "{name}");
    }
}

#[test]
fn zero_data_does_not_blow_up() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    let cfg = write_config(tmp.path(), "zero.json", r#"{"nodes": 512, "data": {"kind": "zero"}}"#);
    let o = ymblow(&["evolve-phys", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("no blowup"));
    let fit = read_json(&out.join("evolve-phys-001/blowup_fit.json"));
    assert!(fit["fit"].is_null());
}

#[test]
fn spectrum_counts_one_eigenvalue_near_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    let o = ymblow(&["spectrum", "--box", "0.5,1.5,-0.5,0.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_json(&out.join("spectrum-001/scan.json"))["count"], 1);
}

#[test]
fn empty_box_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let o = ymblow(&["spectrum", "--box", "1.5,0.5,-0.5,0.5", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unperturbed_modulation_returns_unit_time() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    let o = ymblow(&["modulate", "--v", "zero", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_json(&out.join("modulate-001/modulation.json"));
    assert!((m["t_star"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn inequality_suite_with_another_seed() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    let cfg = write_config(tmp.path(), "ineq.json", r#"{"monte_carlo_samples": 1000000}"#);
    let o =
        ymblow(&["inequalities", "--suite", "all", "--seed", "7", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&out.join("inequalities-001/ratios.json"));
    assert_eq!(r["seed"], 7);
    assert_eq!(r["passed"], true);
}

#[test]
fn run_directories_are_numbered_and_frozen() {
    let tmp = TempDir::new().unwrap();
    for expected in ["spectrum-001", "spectrum-002"] {
        let mut dir = RunDir::create(tmp.path(), "spectrum").unwrap();
        assert!(dir.path().ends_with(expected));
        dir.write_bytes("a.txt", b"x").unwrap();
        dir.finish("1", "ok", 0).unwrap();
    }
    let file = tmp.path().join("spectrum-002/a.txt");
    assert!(fs::metadata(&file).unwrap().permissions().readonly());
}

#[test]
fn manifest_detects_tampering() {
    let tmp = TempDir::new().unwrap();
    let mut dir = RunDir::create(tmp.path(), "evolve-sim").unwrap();
    dir.write_bytes("data.csv", b"1,2\n").unwrap();
    let rec = dir.finish("1", "ok", 0).unwrap();
    assert!(check_manifest(&rec.dir).unwrap());
    let file = rec.dir.join("data.csv");
    fs::set_permissions(&file, fs::Permissions::from_mode(0o644)).unwrap();
    fs::write(&file, b"1,3\n").unwrap();
    assert!(!check_manifest(&rec.dir).unwrap());
}

#[test]
fn stored_config_is_canonical() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    let cfg = write_config(tmp.path(), "zero.json", r#"{"data": {"kind": "zero"}, "nodes": 512}"#);
    assert!(ymblow(&["evolve-phys", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let stored = fs::read_to_string(out.join("evolve-phys-001/config.json")).unwrap();
    let expected = PhysRunConfig { nodes: 512, data: ymblow_cli::config::PhysData::Zero, ..PhysRunConfig::default() };
    assert_eq!(stored, canonical(&expected));
}

#[test]
fn identical_runs_have_identical_manifests() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("runs");
    for _ in 0..2 {
        assert!(ymblow(&["evolve-sim", "--out", out.to_str().unwrap()]).status.success());
    }
    let a = fs::read(out.join("evolve-sim-001/manifest.json")).unwrap();
    let b = fs::read(out.join("evolve-sim-002/manifest.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bracket_variant_fails_the_eigenpair_check() {
    assert!(eigenpair_identity(PotentialForm::Linearized).unwrap().passed);
    assert!(!eigenpair_identity(PotentialForm::Printed).unwrap().passed);
}
