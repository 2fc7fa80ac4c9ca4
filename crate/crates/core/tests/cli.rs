//! End-to-end runs of the `smatpi` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

fn smatpi(dir: &Path, config: &str, args: &[&str]) -> std::process::Output {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_smatpi"))
        .args(args)
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn csv(dir: &Path, name: &str) -> Vec<Vec<String>> {
    fs::read_to_string(dir.join("out").join(name))
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn kernels_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = smatpi(dir.path(), "n_modes=20, dk=3", &["kernels"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv(dir.path(), "kernels.csv");
    assert_eq!(rows[0], ["family", "k", "row", "col", "re", "im"]);
    assert_eq!(rows.len(), 1 + 2 * 3 * 16);
    assert_eq!(rows[1][..4], ["col0", "1", "0", "0"]);
    assert!(rows.iter().any(|r| r[0] == "col1" && r[1] == "3"));
    // 17 significant digits
    assert_eq!(rows[1][4].split('e').next().unwrap().len(), 18);
}

#[test]
fn evolve_decoupled_matches_rabi() {
    let dir = tempfile::tempdir().unwrap();
    let out = smatpi(
        dir.path(),
        "xi=0\nepsilon=0\ndelta=1\nn_modes=10\ndk=3\nn_steps=60",
        &["evolve"],
    );
    assert!(out.status.success());
    let rows = csv(dir.path(), "evolve.csv");
    assert_eq!(rows[0].len(), 11);
    assert_eq!(rows[0][0], "step");
    assert_eq!(rows[0][10], "sigma_z");
    assert_eq!(rows.len(), 62);
    for r in &rows[1..] {
        let t: f64 = r[1].parse().unwrap();
        let sz: f64 = r[10].parse().unwrap();
        assert!((sz - (2.0 * t).cos()).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "n_modes=30, dk=5, n_steps=30, threads=2";
    assert!(smatpi(dir.path(), cfg, &["evolve"]).status.success());
    let first = fs::read(dir.path().join("out/evolve.csv")).unwrap();
    assert!(smatpi(dir.path(), cfg, &["evolve"]).status.success());
    assert_eq!(first, fs::read(dir.path().join("out/evolve.csv")).unwrap());
}

#[test]
fn validate_passes_at_desk_scale() {
    let dir = tempfile::tempdir().unwrap();
    let out = smatpi(dir.path(), "n_modes=40, dk=5, threads=2", &["validate"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(!stdout.contains("FAIL"));
    assert!(stdout.lines().count() >= 7);
}

#[test]
fn bench_reports_exact_node_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = smatpi(
        dir.path(),
        "n_modes=10, bench_dk_min=2, bench_dk_max=6, bench_window=0",
        &["bench"],
    );
    assert!(out.status.success());
    let rows = csv(dir.path(), "bench.csv");
    assert_eq!(rows[0], ["dk", "wall_ns", "node_count", "model_cost"]);
    for r in &rows[1..] {
        let dk: u32 = r[0].parse().unwrap();
        let nodes: u64 = r[2].parse().unwrap();
        assert_eq!(nodes, 2 * 4 * (1..=dk).map(|k| 4u64.pow(k)).sum::<u64>());
    }
}

#[test]
fn bath_info_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = smatpi(dir.path(), "n_modes=25, dk=4", &["bath-info"]);
    assert!(out.status.success());
    assert_eq!(csv(dir.path(), "modes.csv").len(), 26);
    let eta = csv(dir.path(), "eta.csv");
    assert_eq!(
        eta[0],
        [
            "d",
            "re_eta_init",
            "im_eta_init",
            "re_eta_int",
            "im_eta_int"
        ]
    );
    assert_eq!(eta.len(), 1 + 6);
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = smatpi(dir.path(), "dk=9, method=fullsum", &["evolve"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dk"));
    let out = smatpi(dir.path(), "gamma=1", &["kernels"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
}
