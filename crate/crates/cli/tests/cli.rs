use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fbl_cli::{read_manifest, verify_checksums};

fn fbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbl"))
        .args(args)
        .env("FBL_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

const SOLVE: &str = r#"{
  "kind": "solve",
  "solver": {"points": 64, "alpha": 1.0, "nu": 1.0, "t_end": 0.2, "snapshot_stride": 5},
  "initial": {"profile": "sine", "amplitude": 1.0}
}"#;

fn run_solve(tmp: &Path, out: &str) -> std::path::PathBuf {
    let cfg = write_config(tmp, "solve.json", SOLVE);
    let dir = tmp.join(out);
    let o = fbl(&["run", &cfg, "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

#[test]
fn solve_writes_manifest_snapshots_and_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_solve(tmp.path(), "run");
    let m = read_manifest(&dir).unwrap();
    assert_eq!(m.exit_status.code, 0);
    assert!(dir.join("diagnostics.csv").is_file());
    assert!(m.files.iter().any(|f| f.path.starts_with("snapshots/")));
    assert!(m.files.iter().any(|f| f.path == "diagnostics.csv"));
    assert!(verify_checksums(&dir, &m).is_empty());
    // defaults are materialized in the echo
    let echo = serde_json::to_value(&m.config).unwrap();
    assert_eq!(echo["solver"]["cfl"], 0.4);
}

#[test]
fn same_config_same_seed_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run_solve(tmp.path(), "a");
    let b = run_solve(tmp.path(), "b");
    assert_eq!(
        fs::read(a.join("diagnostics.csv")).unwrap(),
        fs::read(b.join("diagnostics.csv")).unwrap()
    );
}

#[test]
fn alpha_out_of_range_exits_3_naming_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", r#"{"kind": "solve", "solver": {"alpha": 3.0}}"#);
    let o = fbl(&["run", &cfg, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
}

#[test]
fn unreadable_or_malformed_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = fbl(&["run", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(tmp.path(), "bad.json", r#"{"kind": "solve", "bogus": 1}"#);
    assert_eq!(fbl(&["run", &cfg]).status.code(), Some(2));
}

#[test]
fn blow_up_exits_4_with_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "blow.json",
        r#"{"kind": "solve", "solver": {"points": 64, "nu": 0.0, "t_end": 50.0, "cfl": 40.0}, "initial": {"amplitude": 5.0}}"#,
    );
    let dir = tmp.path().join("blow");
    let o = fbl(&["run", &cfg, "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_manifest(&dir).unwrap();
    assert_eq!(m.exit_status.code, 4);
    assert!(dir.join("diagnostics.csv").is_file());
}

#[test]
fn report_has_headline_keys_and_is_idempotent() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_solve(tmp.path(), "run");
    let d = dir.to_str().unwrap();
    assert!(fbl(&["report", d]).status.success());
    let first = fs::read(dir.join("summary.json")).unwrap();
    let series = fs::read(dir.join("series/sup_norm.csv")).unwrap();
    let s: serde_json::Value = serde_json::from_slice(&first).unwrap();
    for key in ["t_end", "sup_norm_final", "blowup_integral"] {
        assert!(s[key].is_number(), "{key}");
    }
    assert!(fbl(&["report", d]).status.success());
    assert_eq!(first, fs::read(dir.join("summary.json")).unwrap());
    assert_eq!(series, fs::read(dir.join("series/sup_norm.csv")).unwrap());
}

#[test]
fn report_rejects_missing_or_corrupt_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(fbl(&["report", tmp.path().to_str().unwrap()]).status.code(), Some(2));
    fs::write(tmp.path().join("manifest.json"), "{not json").unwrap();
    assert_eq!(fbl(&["report", tmp.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn report_rejects_tampered_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = run_solve(tmp.path(), "run");
    fs::write(dir.join("diagnostics.csv"), "t\n").unwrap();
    assert_eq!(fbl(&["report", dir.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn negativity_scan_csv_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "neg.json",
        r#"{"kind": "negativity-scan", "analysis": {"xi_grid": {"lo": 0.01, "hi": 100.0, "count": 5}}}"#,
    );
    let dir = tmp.path().join("neg");
    assert!(fbl(&["run", &cfg, "--out", dir.to_str().unwrap()]).status.success());
    let csv = fs::read_to_string(dir.join("negativity.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("xi,omega,omega_prime,J,sum"));
    assert_eq!(csv.lines().count(), 6);
    assert!(fbl(&["report", dir.to_str().unwrap()]).status.success());
    let s: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("summary.json")).unwrap()).unwrap();
    assert!(s["negativity_max"].as_f64().unwrap() < 0.0);
}

#[test]
fn every_kind_runs_and_checksums_validate() {
    let tmp = tempfile::tempdir().unwrap();
    let small = r#""solver": {"points": 32, "t_end": 0.05, "dt": 0.005, "snapshot_stride": 1}, "initial": {"amplitude": 0.1}"#;
    for kind in ["picard", "lp-analyze", "modulus-check", "commutator-test", "apriori-scan"] {
        let extra = r#", "analysis": {"pairs": 2, "members": 2, "picard_iters": 2}"#;
        let cfg = write_config(tmp.path(), "k.json", &format!(r#"{{"kind": "{kind}", {small}{extra}}}"#));
        let dir = tmp.path().join(kind);
        let o = fbl(&["run", &cfg, "--out", dir.to_str().unwrap()]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        let m = read_manifest(&dir).unwrap();
        assert!(verify_checksums(&dir, &m).is_empty(), "{kind}");
        assert!(fbl(&["report", dir.to_str().unwrap()]).status.success(), "{kind}");
    }
}

#[test]
fn ensemble_fans_out_with_consecutive_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "ens.json",
        r#"{"kind": "solve", "solver": {"points": 32, "t_end": 0.05}, "initial": {"profile": "two-mode"}}"#,
    );
    let dir = tmp.path().join("ens");
    let o = fbl(&["run", &cfg, "--out", dir.to_str().unwrap(), "--seed", "7", "--ensemble", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let seeds: Vec<u64> = (0..3)
        .map(|i| read_manifest(&dir.join(format!("member_{i:03}"))).unwrap().config.initial.seed)
        .collect();
    assert_eq!(seeds, [7, 8, 9]);
    assert_ne!(
        fs::read(dir.join("member_000/diagnostics.csv")).unwrap(),
        fs::read(dir.join("member_001/diagnostics.csv")).unwrap()
    );
}
