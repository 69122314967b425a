use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mvwave(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvwave"))
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("MVWAVE_OUT")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mvwave(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    mvwave(dir, args).status.code().expect("exit code")
}

#[test]
fn single_voxel_golden_pgm() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("dot.obj"), "# one voxel\nv 0 0 2\n").unwrap();
    ok(dir.path(), &["--pitch", "4", "--max-plane", "2", "synth", "dot.obj"]);

    let mut golden = b"P5\n12 12\n255\n".to_vec();
    for y in 0..12 {
        for x in 0..12 {
            let lit = |t: usize| t < 2 || (6..8).contains(&t);
            golden.push(if lit(x) && lit(y) { 255 } else { 0 });
        }
    }
    assert_eq!(fs::read(dir.path().join("dot.pgm")).unwrap(), golden);
    assert_eq!(fs::read_to_string(dir.path().join("dot.voxels.csv")).unwrap(), "cx,cy,k\n0,0,2\n");
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        ok(dir, &["synth", "cube8", "--noise", "51", "--seed", "9"]);
        ok(dir, &["analyze", "cube8.pgm", "--truth", "cube8.voxels.csv"]);
        ok(dir, &["cwt", "cube8.pgm", "--plane", "-3"]);
        ok(dir, &["kernels", "--plane", "4"]);
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 14);
    for name in names {
        let left = fs::read(a.path().join(&name)).unwrap();
        let right = fs::read(b.path().join(&name)).unwrap();
        assert!(left == right, "{name:?} differs");
    }
}

#[test]
fn zero_noise_matches_clean_render() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--out-dir", "clean", "synth", "tetra"]);
    ok(dir.path(), &["--out-dir", "noisy0", "synth", "tetra", "--noise", "0", "--seed", "42"]);
    ok(dir.path(), &["--out-dir", "noisy", "synth", "tetra", "--noise", "51", "--seed", "42"]);
    let clean = fs::read(dir.path().join("clean/tetra.pgm")).unwrap();
    assert_eq!(clean.len(), "P5\n2700 2700\n255\n".len() + 2700 * 2700);
    assert_eq!(clean, fs::read(dir.path().join("noisy0/tetra.pgm")).unwrap());
    assert_ne!(clean, fs::read(dir.path().join("noisy/tetra.pgm")).unwrap());
}

#[test]
fn out_dir_defaults_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mvwave"))
        .current_dir(dir.path())
        .env("MVWAVE_OUT", "from-env")
        .args(["kernels", "--plane=-2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("from-env/kernel-2.reference1d.csv")).unwrap();
    let row: Vec<i32> = csv.trim().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), 120);
    assert_eq!(row.iter().sum::<i32>(), 60);
    assert_eq!(&row[..31], &[[0; 30].as_slice(), &[1]].concat()[..]);
}

#[test]
fn analyze_reports_scores_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "cube8"]);
    let stdout = ok(dir.path(), &["analyze", "cube8.pgm", "--fraction", "7/10", "--truth", "cube8.voxels.csv"]);
    assert!(stdout.contains("recall 1.0000 (32/32)"), "{stdout}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cube8.analyze.json")).unwrap()).unwrap();
    assert_eq!(manifest["details"]["threshold_value"], 918000);
    assert_eq!(manifest["details"]["paper_units"], "2.359296");
    assert_eq!(manifest["details"]["score"]["true_positives"], 32);
    assert_eq!(manifest["timestamp"], 1700000000u64);
    let depth = fs::read(dir.path().join("cube8.depth.pgm")).unwrap();
    assert!(depth.starts_with(b"P5\n12 12\n255\n"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(dir.path(), &["selftest"]);
    assert!(!stdout.contains("FAIL"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn exit_codes_by_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("short.pgm"), b"P5\n4 4\n255\n").unwrap();
    fs::write(d.join("bad.obj"), "v 0 0 0\n").unwrap();
    assert_eq!(code(d, &["kernels", "--plane", "0"]), 2);
    assert_eq!(code(d, &["kernels", "--plane", "7"]), 2);
    assert_eq!(code(d, &["synth", "sphere"]), 2);
    assert_eq!(code(d, &["analyze", "short.pgm", "--fraction", "1.5"]), 2);
    assert_eq!(code(d, &["analyze", "short.pgm"]), 3);
    assert_eq!(code(d, &["synth", "bad.obj"]), 3);
    assert_eq!(code(d, &["--pitch", "50", "kernels", "--plane", "3"]), 4);
    assert_eq!(code(d, &["--levels", "300", "selftest"]), 4);
    assert_eq!(code(d, &["analyze", "missing.pgm"]), 5);
}
