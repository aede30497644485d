//! End-to-end runs of the `hpdg` binary.

use std::process::Command;

fn hpdg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hpdg"))
}

#[test]
fn csv_report_on_stdout() {
    let out = hpdg().args(["--n", "4", "--p", "2", "--no-timing"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("method,p,n,h,alpha,beta,K_A,K_TDG,cg_iters,pcg_iters"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), header.split(',').count());
    assert_eq!(&row[..6], &["sipg", "2", "4", "0.5", "10", "0;0"]);
    assert_eq!(row.last(), Some(&""));
}

#[test]
fn json_report_file_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = hpdg()
            .args(["--method", "ldg", "--n", "4", "--p", "2:3", "--format", "json", "--no-timing", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(path).unwrap()
    };
    let first = run("a.json");
    assert_eq!(first, run("b.json"));
    let rows: serde_json::Value = serde_json::from_str(&first).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["method"], "ldg");
    assert_eq!(rows[1]["p"], 3);
    assert!(rows[1]["K_TDG"].as_f64().unwrap() > 1.0);
    assert!(rows[1]["c2_jacobi_kerQ"].as_f64().is_some());
}

#[test]
fn matrix_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    let status = hpdg()
        .args(["--n", "2", "--p", "2", "--tasks", "iterations", "--no-timing", "--export-matrix"])
        .arg(&path)
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let a = hpdg::sparse::CsrMatrix::read_matrix_market(&path).unwrap();
    assert_eq!(a.nrows(), 36);
    assert!(a.symmetry_defect() < 1e-12);
    let rhs = std::fs::read_to_string(dir.path().join("a_rhs.mtx")).unwrap();
    assert!(rhs.starts_with("%%MatrixMarket matrix coordinate real general"));
}

#[test]
fn convergence_task_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = hpdg()
        .args(["--p", "2", "--tasks", "convergence", "--no-timing", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("H1 error"));
    let json = std::fs::read_to_string(dir.path().join("r.convergence.json")).unwrap();
    let tables: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(tables[0]["p"], 2);
}

#[test]
fn invalid_arguments_exit_with_code_two() {
    for args in [&["--alpha", "0.5"][..], &["--p", "3:2"], &["--method", "ldg", "--beta", "1"], &["--n", "1"]] {
        let out = hpdg().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
