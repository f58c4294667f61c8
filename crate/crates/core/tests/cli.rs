//! End-to-end checks of the command-line interface.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coblotto"))
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("coblotto-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn check_reports_the_witness_game() {
    let out = bin()
        .args(["check", "1.2", "1", "1.5", "2", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["case"], "C1a");
    assert_eq!(report["region"], "A1");
    assert_eq!(report["gv"]["member"], true);
    assert_eq!(report["gb"], false);
    assert_eq!(report["joint"], true);
    assert_eq!(report["measure_zero"], false);
    let cert = &report["gv"]["certificates"][0];
    assert_eq!(cert["prop"], 4);
    assert!((cert["lo"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((cert["hi"].as_f64().unwrap() - 0.4).abs() < 1e-9);
    assert!((report["allocation"]["xa1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((report["payoffs"]["u1"].as_f64().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn check_reports_the_symmetric_game() {
    let out = bin().args(["check", "1", "1", "1", "1", "--json"]).output().unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["case"], "C4");
    assert_eq!(report["gv"]["member"], false);
    assert_eq!(report["gb"], false);
    assert_eq!(report["joint"], false);
    assert_eq!(report["measure_zero"], true);
}

#[test]
fn check_rejects_invalid_input_with_exit_2() {
    let out = bin().args(["check", "1.2", "1", "0", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("x1 must be > 0"), "stderr: {stderr}");
}

#[test]
fn sweep_writes_the_expected_csv() {
    let path = temp_path("sweep.csv");
    let out = bin()
        .args(["sweep", "1.2", "1", "1.5", "2", "-n", "2201", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let data = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = data.lines();
    assert_eq!(lines.next().unwrap(), "tau_v,delta_u1,delta_u2");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2201);
    // Both deltas positive exactly on roughly (1/3, 0.4).
    let both: Vec<f64> = rows
        .iter()
        .filter(|r| r[1] > 0.0 && r[2] > 0.0)
        .map(|r| r[0])
        .collect();
    assert!(!both.is_empty());
    let lo = both.first().unwrap();
    let hi = both.last().unwrap();
    assert!((lo - 1.0 / 3.0).abs() < 5e-3, "lo = {lo}");
    assert!((hi - 0.4).abs() < 5e-3, "hi = {hi}");
}

#[test]
fn sweep_of_the_symmetric_game_has_no_win_win_rows() {
    let path = temp_path("sweep-sym.csv");
    let out = bin()
        .args(["sweep", "1", "1", "1", "1", "-n", "501", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let data = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    for line in data.lines().skip(1) {
        let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(!(vals[1] > 0.0 && vals[2] > 0.0), "win-win row: {line}");
    }
}

#[test]
fn mc_is_reproducible_and_scan_emits_the_schema() {
    let a = temp_path("mc-a.csv");
    let b = temp_path("mc-b.csv");
    for path in [&a, &b] {
        let out = bin()
            .args(["mc", "--phi1", "1.2", "--phi2", "1", "--samples", "200", "--seed", "7", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let da = std::fs::read(&a).unwrap();
    let db = std::fs::read(&b).unwrap();
    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();
    assert_eq!(da, db, "same seed must give byte-identical files");

    let path = temp_path("scan.csv");
    let svg = temp_path("scan.svg");
    let out = bin()
        .args([
            "scan", "--phi1", "1.2", "--phi2", "1", "--x1-max", "1", "--x2-max", "1", "--step",
            "0.25", "--gb-grid", "1001", "--out",
        ])
        .arg(&path)
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let data = std::fs::read_to_string(&path).unwrap();
    let svg_data = std::fs::read_to_string(&svg).unwrap();
    std::fs::remove_file(&path).ok();
    std::fs::remove_file(&svg).ok();
    assert_eq!(data.lines().next().unwrap(), "x1,x2,in_gv,in_gb,joint,measure_zero,case,region");
    assert_eq!(data.lines().count(), 1 + 16);
    assert!(svg_data.starts_with("<svg"));
    // Rows are ordered by x2 then x1.
    let first = data.lines().nth(1).unwrap();
    assert!(first.starts_with("0.25,0.25,"));
    let second = data.lines().nth(2).unwrap();
    assert!(second.starts_with("0.5,0.25,"));
}

#[test]
fn scan_rejects_bad_ranges_and_unwritable_paths() {
    let out = bin()
        .args(["scan", "--phi1", "1.2", "--phi2", "1", "--step", "-0.1", "--out", "/tmp/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args([
            "scan", "--phi1", "1.2", "--phi2", "1", "--x1-max", "0.5", "--x2-max", "0.5",
            "--step", "0.25", "--gb-grid", "1001", "--out", "/nonexistent-dir/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
