use std::path::Path;
use std::process::{Command, Output};

use fringelab::io::config::RunConfig;
use fringelab::io::tables::{read_fringe_pattern, read_stats, read_visibility_curve};

fn fringelab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fringelab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("FRINGELAB_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn coherence_prints_both_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let o = fringelab(&["coherence", "--gaussian-fwhm-nm", "1.5", "--lambda-nm", "660"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("181.2 µm") && text.contains("290.4 µm"), "{text}");
    let curve = read_visibility_curve(dir.path().join("visibility_curve.csv")).unwrap();
    assert_eq!(curve.len(), 1001);
    assert_eq!(curve[0], (0.0, 1.0));
}

#[test]
fn fringes_with_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = fringelab(&["fringes", "--paper-defaults", "--svg"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("1.6632 mm"));
    let (x, intensity) = read_fringe_pattern(dir.path().join("fringes.csv")).unwrap();
    // peak spacing measured from the CSV itself
    let step = x[1] - x[0];
    let peaks: Vec<f64> = (1..intensity.len() - 1)
        .filter(|&i| intensity[i] > intensity[i - 1] && intensity[i] >= intensity[i + 1])
        .map(|i| x[i])
        .collect();
    let spacing = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    assert!((spacing - 1.663e-3).abs() <= step, "{spacing}");
    assert!(dir.path().join("fringes.svg").exists());
}

#[test]
fn timing_reports_delay_and_note() {
    let dir = tempfile::tempdir().unwrap();
    let o = fringelab(&["timing", "--dl", "600", "--n", "1.4677"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("Δt = n(p₂ − p₁)/c = 2.9374 µs"), "{text}");
    assert!(text.contains("29.3 µs"), "{text}");
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn seed_from_environment_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[simulation]\nduration_s = 2e-9\nn_seeds = 3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let by_flag = fringelab(&["simulate", "--modes", "2", "--config", cfg, "--seed", "9"], &dir.path().join("a"));
    assert!(by_flag.status.success(), "{}", String::from_utf8_lossy(&by_flag.stderr));
    let by_env = Command::new(env!("CARGO_BIN_EXE_fringelab"))
        .args(["simulate", "--modes", "2", "--config", cfg, "--out"])
        .arg(dir.path().join("b"))
        .env("FRINGELAB_SEED", "9")
        .output()
        .unwrap();
    assert!(by_env.status.success());
    let a = std::fs::read(dir.path().join("a/stats.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/stats.csv")).unwrap();
    assert_eq!(a, b);
    let other = fringelab(&["simulate", "--modes", "2", "--config", cfg, "--seed", "10"], &dir.path().join("c"));
    assert!(other.status.success());
    let rows = read_stats(dir.path().join("c/stats.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].n_modes, 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fringelab(&["nonsense"], dir.path()).status.code(), Some(2));
    assert_eq!(fringelab(&[], dir.path()).status.code(), Some(2));
    assert_eq!(fringelab(&["timing", "--dl", "abc"], dir.path()).status.code(), Some(2));
    let missing = fringelab(&["fringes", "--config", "/nonexistent.toml"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nonexistent.toml"));
    assert_eq!(fringelab(&["timing", "--n", "0.5"], dir.path()).status.code(), Some(1));
}

#[test]
fn print_config_reparses_equal() {
    let dir = tempfile::tempdir().unwrap();
    let o = fringelab(&["--print-config", "--seed", "77"], dir.path());
    assert!(o.status.success());
    let cfg = RunConfig::from_toml_str(&stdout(&o), None).unwrap();
    assert_eq!(cfg.simulation.seed, 77);
    assert_eq!(cfg.output.directory, dir.path());
    let again = RunConfig::from_toml_str(&cfg.to_toml(), None).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn spectrum_synthesize_then_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let o = fringelab(&["spectrum", "synthesize", "--points", "2001"], dir.path());
    assert!(o.status.success());
    let csv = dir.path().join("spectrum.csv");
    let o = fringelab(&["spectrum", "inspect", csv.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("centroid = 660.0000 nm"), "{}", stdout(&o));
}
