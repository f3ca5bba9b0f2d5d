use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semitent"))
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
    let path = dir.path().join("scenario.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn validate_accepts_default_scenario_and_rejects_garbage() {
    let default = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/default.toml");
    let out = bin().args(["validate", default]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(&dir, "[fixture]\nnames = [\"TP\"]\n[check]\nids = [\"bogus\"]\n");
    assert_eq!(bin().args(["validate", bad.to_str().unwrap()]).status().unwrap().code(), Some(2));
    let unknown = write_config(&dir, "[fixture]\nnames = [\"TP\"]\n[check]\nids = []\ncolour = 1\n");
    assert_eq!(bin().args(["run", unknown.to_str().unwrap()]).status().unwrap().code(), Some(2));
}

#[test]
fn run_writes_csv_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "[fixture]\nnames = [\"TP\"]\n[check]\nids = [\"TP-semigroup-axioms\"]\n");
    let out = dir.path().join("out");
    let status = bin().args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "4"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(out.join("reports.csv")).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("checkId,fixture,sweepKey,lhs,rhs,ratio,budget,pass,seed\n"));

    let status = bin()
        .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "jsonl"])
        .env("SEMITENT_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(out.join("reports.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 6);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["checkId"], "semigroup-axioms");
    }
}

#[test]
fn exact_failures_exit_one_and_strict_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "[fixture]\nnames = [\"TP\"]\n[check]\nids = [\"TP-lhalf-necessity-display\"]\n");
    let out = bin().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let cfg = write_config(&dir, "[fixture]\nnames = [\"TP\"]\n[line]\nn = 1000\n[check]\nids = [\"dyadic-nesting\"]\n");
    assert_eq!(bin().args(["run", cfg.to_str().unwrap()]).output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(["run", cfg.to_str().unwrap(), "--strict"]).output().unwrap().status.code(), Some(3));
}

#[test]
fn listings_name_every_check_and_fixture_family() {
    let out = bin().arg("list-checks").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["semigroup-axioms", "tent-duality-bound", "carleson-pairing-factor-3", "line-lhalf-uniformity"] {
        assert!(text.contains(id), "{id}");
    }
    let out = bin().arg("list-fixtures").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for f in ["TP", "CYC_N", "TORUS_N", "SM_N"] {
        assert!(text.contains(f), "{f}");
    }
}
