use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn solab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solab"))
        .args(args)
        .env("SOLAB_OUTPUT_DIR", out)
        .output()
        .unwrap()
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn cylinder_simulation_passes_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cyl = config("cylinder.conf");
    let args = ["simulate", "--config", cyl.to_str().unwrap()];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = solab(&args, &a);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(solab(&args, &b).status.code(), Some(0));
    let (fa, fb) = (read_dir(&a), read_dir(&b));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"manifest.json") && names.contains(&"profiles.svg"));
    assert_eq!(names.iter().filter(|n| n.starts_with("snapshot_")).count(), 11);
    // Only the echoed output directory differs between the two manifests.
    for ((na, ca), (nb, cb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        if na != "manifest.json" {
            assert!(ca == cb, "{na} differs");
        }
    }
    let manifest = String::from_utf8(fa.iter().find(|(n, _)| n == "manifest.json").unwrap().1.clone()).unwrap();
    assert!(manifest.contains("\"command\": \"simulate\"") && manifest.contains("snapshot_010.csv"));
}

#[test]
fn usage_and_config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(solab(&["frobnicate"], tmp.path()).status.code(), Some(2));
    assert_eq!(solab(&[], tmp.path()).status.code(), Some(2));
    let bad = tmp.path().join("bad.conf");
    std::fs::write(&bad, "flow.s0 = 100\nflow.s1 = 50\n").unwrap();
    let out = solab(&["simulate", "--config", bad.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
    let missing = tmp.path().join("nope.conf");
    assert_eq!(solab(&["bryant", "--config", missing.to_str().unwrap()], tmp.path()).status.code(), Some(2));
    assert_eq!(solab(&["--version"], tmp.path()).status.code(), Some(0));
}

#[test]
fn formats_select_the_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("json.conf");
    std::fs::write(&cfg, "grid.n = 64\nflow.snapshots = 3\nerror.model = zero\noutput.formats = json\n").unwrap();
    let out = tmp.path().join("out");
    assert_eq!(solab(&["simulate", "--config", cfg.to_str().unwrap()], &out).status.code(), Some(0));
    let names: Vec<String> = read_dir(&out).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["manifest.json", "trajectory.json"]);
}

#[test]
fn barrier_verification_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("svg.conf");
    std::fs::write(&cfg, "output.formats = csv, svg\n").unwrap();
    let out = solab(&["barrier", "verify", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("barrier a = 50: verified"));
    assert!(tmp.path().join("barrier.csv").exists() && tmp.path().join("barrier.svg").exists());
}

#[test]
fn neutral_window_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let neutral = config("neutral.conf");
    let out = solab(&["verify-asymptotics", "--config", neutral.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"overall\": \"warn\""), "{stdout}");
    let verdict = std::fs::read_to_string(tmp.path().join("verdict.json")).unwrap();
    assert!(stdout.starts_with(&verdict));
}
