use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorlight"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn runs_and_reports_written_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "irradiance-field",
        "--out",
        path(dir.path()),
        "--grid",
        "8",
        "--mesh",
        "32",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("irradiance_grid.csv") && stdout.contains("manifest.json"));
    let csv = fs::read_to_string(dir.path().join("irradiance_grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 64);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.txt");
    fs::write(&config, "# small run\ngrid.n = 30\nseed = 3\nblockage.users = 500\n").unwrap();
    let out_dir = dir.path().join("run");
    let out = run(&[
        "blockage-map",
        "--config",
        path(&config),
        "--out",
        path(&out_dir),
        "--seed",
        "9",
        "--grid",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 9"));
    assert!(manifest.contains("\"grid.n\": \"6\""));
    assert!(manifest.contains("\"blockage.users\": \"500\""));
}

#[test]
fn manifest_reruns_to_identical_data() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run(&["snr-cdf", "--out", path(&a), "--grid", "6", "--mesh", "24"]);
    assert_eq!(first.status.code(), Some(0));
    let second = run(&["snr-cdf", "--config", path(&a.join("manifest.json")), "--out", path(&b)]);
    assert_eq!(
        second.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&second.stderr)
    );
    assert_eq!(
        fs::read(a.join("snr_cdf.csv")).unwrap(),
        fs::read(b.join("snr_cdf.csv")).unwrap()
    );
}

#[test]
fn configuration_problems_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "photodetector.area = -1\n").unwrap();
    let out = run(&["irradiance-field", "--config", path(&bad), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("photodetector.area"));

    let missing = run(&["irradiance-field", "--config", path(&dir.path().join("nope.txt"))]);
    assert_eq!(missing.status.code(), Some(1));

    let mesh = run(&["irradiance-field", "--mesh", "fine", "--out", path(dir.path())]);
    assert_eq!(mesh.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&mesh.stderr).contains("mesh.resolution"));

    assert_eq!(run(&["no-such-experiment"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("wide.txt");
    fs::write(&config, "mirror.width = 5\n").unwrap();
    let out = run(&["irradiance-field", "--config", path(&config), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    let file = dir.path().join("occupied");
    fs::write(&file, "").unwrap();
    let out = run(&["blockage-map", "--grid", "4", "--out", path(&file.join("sub"))]);
    assert_eq!(out.status.code(), Some(2));
}
