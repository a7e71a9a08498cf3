use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn divflow(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divflow")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn summary(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is the JSON summary")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn linf_on_two_cells() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "d.json", r#"{"cells": [[0, 0], [1, 0]], "h": 1, "connectivity": 4}"#);
    let f = write(&dir, "f.csv", "index,value\n0,1\n1,-1\n");
    let out = dir.path().join("run");
    let s = summary(&divflow(&out, &["solve-linf", "--domain", path(&d), "--f", path(&f), "--check"]));
    assert_eq!(s["value"], 1.0);
    assert_eq!(s["residual"], 0.0);
    let written: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(written, s);
    let flow = fs::read_to_string(out.join("flow.csv")).unwrap();
    assert_eq!(flow, "index,tail,head,value\n0,0,1,1.0\n");
}

#[test]
fn free_norm_of_dipole_matches_l1_cost() {
    let dir = TempDir::new().unwrap();
    let atoms = write(&dir, "atoms.csv", "x,y,weight\n0.5,0.5,1\n4.5,3.5,-1\n");
    let free = summary(&divflow(&dir.path().join("a"), &["free-norm", "--rect", "6x6", "--atoms", path(&atoms)]));
    let l1 = summary(&divflow(&dir.path().join("b"), &["solve-l1", "--rect", "6x6", "--atoms", path(&atoms)]));
    let (fv, lv) = (free["value"].as_f64().unwrap(), l1["value"].as_f64().unwrap());
    assert!((fv - lv).abs() <= 1e-12 * lv);
    // Graph distance: three diagonal steps and one axis step.
    assert!((fv - (1.0 + 3.0 * 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn sch_norm_rejects_nonzero_mean() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.csv", "index,value\n0,1\n");
    let out = divflow(&dir.path().join("run"), &["sch-norm", "--rect", "3x3", "--f", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotMeanZero"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = divflow(&dir.path().join("run"), &["solve-l1", "--random"]);
    assert_eq!(out.status.code(), Some(2));
    let out = divflow(&dir.path().join("run"), &["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    let out = divflow(&dir.path().join("run"), &["cheeger", "--domain", "/nonexistent/mask.pgm"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = divflow(&dir.path().join("run"), &["poincare", "--rect", "3x3", "--p", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("BadExponent"));
    let out = divflow(&dir.path().join("run"), &["pencil", "--rect", "3x3", "--from", "0,0", "--to", "5,5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("CellOutside"));
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let runs: &[&[&str]] = &[
        &["--seed", "7", "whitney", "--rect", "16x16", "--h", "0.0625", "--tau", "0.5", "--samples", "500"],
        &["--seed", "7", "sch-norm", "--rect", "5x4", "--random"],
        &["--seed", "3", "poincare", "--rect", "6x6", "--heuristic", "--trials", "8"],
        &["weaklq", "--profile", "log", "--truncate", "10,100"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let a = dir.path().join(format!("{k}a"));
        let b = dir.path().join(format!("{k}b"));
        summary(&divflow(&a, args));
        summary(&divflow(&b, args));
        assert_eq!(files(&a), files(&b), "run {args:?}");
    }
}

#[test]
fn sweeps_do_not_depend_on_worker_count() {
    let dir = TempDir::new().unwrap();
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    let args = ["experiment", "nikodym", "--max-length", "6", "--trials", "8", "--jobs"];
    summary(&divflow(&one, &[&args[..], &["1"]].concat()));
    summary(&divflow(&many, &[&args[..], &["4"]].concat()));
    assert_eq!(files(&one), files(&many));

    let args = ["experiment", "refine", "--sizes", "4,6,8", "--check", "--jobs"];
    summary(&divflow(&one, &[&args[..], &["1"]].concat()));
    let s = summary(&divflow(&many, &[&args[..], &["3"]].concat()));
    assert_eq!(files(&one), files(&many));
    for row in s["rows"].as_array().unwrap() {
        assert!((row["free_norm"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn domain_round_trip() {
    let dir = TempDir::new().unwrap();
    let src = write(
        &dir,
        "d.json",
        r#"{"cells": [[0,0],[1,0],[2,0],[0,1],[2,1],[0,2],[1,2],[2,2],[4,4]], "h": 0.5, "connectivity": 8, "basepoint": [2,1]}"#,
    );
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let s = summary(&divflow(&first, &["domain", "build", "--domain", path(&src)]));
    assert_eq!(s["components"], 2);
    summary(&divflow(&second, &["domain", "build", "--domain", path(&first.join("domain.json"))]));
    let edges = |d: &Path| fs::read_to_string(d.join("edges.csv")).unwrap();
    assert_eq!(edges(&first), edges(&second));
    assert_eq!(fs::read(first.join("domain.json")).unwrap(), fs::read(second.join("domain.json")).unwrap());

    // The exported mask loses h and connectivity but keeps the cells.
    let third = dir.path().join("third");
    let s = summary(&divflow(&third, &["domain", "info", "--domain", path(&first.join("mask.pgm"))]));
    assert_eq!(s["cells"], 9);
}

#[test]
fn bitmap_masks() {
    let dir = TempDir::new().unwrap();
    let pbm = write(&dir, "m.pbm", "P1\n# ring\n3 3\n1 1 1\n1 0 1\n1 1 1\n");
    let s = summary(&divflow(&dir.path().join("run"), &["cheeger", "--domain", path(&pbm), "--connectivity", "4"]));
    assert_eq!(s["cells"], 8);
    assert_eq!(s["exact"], true);
    // Cutting the ring twice splits off four cells with two crossing edges.
    assert_eq!(s["value"], 2.0);
}

#[test]
fn check_flag_runs_oracles() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["--seed", "11", "solve-linf", "--rect", "4x4", "--connectivity", "4", "--random", "--check"][..],
        &["--seed", "11", "--mode", "mesh", "sch-norm", "--rect", "3x5", "--h", "0.2", "--random", "--check"],
        &["free-norm", "--rect", "5x5", "--dipole", "0,0:4,3", "--check"],
        &["pencil", "--rect", "6x4", "--from", "0,0", "--to", "5,3", "--theta", "2", "--check"],
        &["cheeger", "--rect", "4x4", "--heuristic", "--check"],
        &["koch", "--level", "4", "--decay", "0.5", "--check"],
    ] {
        summary(&divflow(&dir.path().join("run"), args));
    }
    let koch = dir.path().join("koch");
    summary(&divflow(&koch, &["koch", "--level", "3", "--angle", "0.5"]));
    let s = summary(&divflow(
        &dir.path().join("mz"),
        &["mz", "--atoms", path(&koch.join("atoms.csv")), "--r-min", "0.01", "--centers", "midpoints", "--check"],
    ));
    assert_eq!(s["atoms"], 64);
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_divflow"))
        .env("DIVFLOW_OUT", &target)
        .args(["domain", "info", "--rect", "2x2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("summary.json").exists());
    assert!(target.join("cells.csv").exists());
}
