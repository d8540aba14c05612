use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ietlab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("IETLAB_PRECISION_BITS")
        .env_remove("IETLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn run_dir(o: &Output) -> PathBuf {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    PathBuf::from(String::from_utf8_lossy(&o.stderr).trim())
}

fn read_csv_body(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn classify_prints_json() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["classify", "A B C D / D C B A"]);
    run_dir(&o);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rotation_class"], false);
    assert_eq!(v["genus"], 2);
    assert_eq!(v["kappa"], 1);
    assert_eq!(v["class_size"], 7);
    let o = run(tmp.path(), &["classify", "A B C / C B A"]);
    run_dir(&o);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rotation_class"], true);
    assert_eq!(v["genus"], 1);
}

#[test]
fn golden_induction_has_unit_blocks() {
    let tmp = TempDir::new().unwrap();
    let dir = run_dir(&run(tmp.path(), &["induce", "--fixture", "golden", "--steps", "60"]));
    let rows = read_csv_body(&dir.join("zorich.csv"));
    assert_eq!(rows.len(), 60);
    assert!(rows.iter().all(|r| r[2] == "1"));
    // blocks alternate in type
    assert!(rows.windows(2).all(|w| w[0][1] != w[1][1]));
}

#[test]
fn rational_blocks_follow_euclid() {
    // 355/113 = [3; 7, 16]; the last digit stops one step short at a tie
    let tmp = TempDir::new().unwrap();
    let dir = run_dir(&run(tmp.path(), &["induce", "--perm", "A B / B A", "--lengths", "355 113", "--steps", "25"]));
    let lens: Vec<String> = read_csv_body(&dir.join("zorich.csv")).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(lens, ["3", "7", "15"]);
    let o = run(tmp.path(), &["induce", "--perm", "A B / B A", "--lengths", "355 113", "--steps", "26"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn replay_is_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["correlate", "--fixture", "rev3", "--grid", "4..9"];
    let da = run_dir(&run(a.path(), &args));
    let db = run_dir(&run(b.path(), &args));
    assert_eq!(da.file_name(), db.file_name());
    let mut names: Vec<_> = fs::read_dir(&da).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 3);
    for n in names {
        assert_eq!(fs::read(da.join(&n)).unwrap(), fs::read(db.join(&n)).unwrap(), "{n:?} differs");
    }
}

#[test]
fn outputs_are_listed_and_linked() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["induce", "--fixture", "rev3", "--steps", "30"][..],
        &["veech-freq", "--n", "200"][..],
        &["lower-bound", "--n", "4096"][..],
        &["good-word", "--perm", "A B C / C B A"][..],
    ] {
        let dir = run_dir(&run(tmp.path(), args));
        let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        let hash = manifest["hash"].as_str().unwrap();
        assert_eq!(dir.file_name().unwrap().to_str().unwrap(), hash);
        let mut listed: Vec<String> = manifest["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
        listed.sort();
        let mut present: Vec<String> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .filter(|n| n != "manifest.json")
            .collect();
        present.sort();
        assert_eq!(listed, present, "{args:?}");
        for name in &present {
            let text = fs::read_to_string(dir.join(name)).unwrap();
            if name.ends_with(".csv") {
                assert_eq!(text.lines().next().unwrap(), format!("# manifest={hash}"));
            } else {
                let v: Value = serde_json::from_str(&text).unwrap();
                assert_eq!(v["manifest"], hash);
            }
        }
    }
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["classify", "A B / A B"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"].is_string());

    assert_eq!(run(tmp.path(), &["--bogus"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), &["induce", "--fixture", "nope"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), &["lower-bound", "--n", "3"]).status.code(), Some(3));

    let o = Command::new(env!("CARGO_BIN_EXE_ietlab"))
        .args(["--out", tmp.path().to_str().unwrap(), "classify", "A B / B A"])
        .env("IETLAB_PRECISION_BITS", "eight")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    // failed runs leave no directory behind
    let dirs = fs::read_dir(tmp.path()).unwrap().count();
    assert_eq!(dirs, 0);
}

#[test]
fn precision_changes_the_run_hash() {
    let tmp = TempDir::new().unwrap();
    let plain = run_dir(&run(tmp.path(), &["induce", "--fixture", "golden", "--steps", "5"]));
    let o = Command::new(env!("CARGO_BIN_EXE_ietlab"))
        .args(["--out", tmp.path().to_str().unwrap(), "induce", "--fixture", "golden", "--steps", "5"])
        .env("IETLAB_PRECISION_BITS", "512")
        .output()
        .unwrap();
    let wide = run_dir(&o);
    assert_ne!(plain, wide);
    assert_eq!(fs::read_to_string(plain.join("zorich.csv")).unwrap().lines().skip(1).collect::<Vec<_>>(),
               fs::read_to_string(wide.join("zorich.csv")).unwrap().lines().skip(1).collect::<Vec<_>>());
}
