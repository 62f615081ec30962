use std::fs;
use std::path::Path;
use std::process::Command;

use scatlab::cli::read_snapshot;
use scatlab::config::RunConfig;
use scatlab::jost::Mode;
use scatlab::Error;

/// Small grids so each subcommand finishes in seconds.
const SMALL: &str = r#"
x_max = 40.0
n = 801
xi_min = 0.05
xi_max = 4.0
m = 200
nls_n = 4096
nls_core_half_width = 20.0
fit_t_min = 2.0
fit_t_max = 10.0
fit_samples = 6
t_end = 6.0
snapshot_x_max = 200.0
v_max = 3.0
v_count = 61
"#;

fn scatlab(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_scatlab")).current_dir(dir).args(args).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("small.toml");
    fs::write(&p, SMALL).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn config_round_trip_and_hash() {
    let cfg = RunConfig::default();
    cfg.validate().unwrap();
    let back = RunConfig::parse(&cfg.canonical()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
    assert_eq!(cfg.hash().len(), 64);
    let other = RunConfig { epsilon: 0.04, ..cfg.clone() };
    assert_ne!(other.hash(), cfg.hash());
    let small = RunConfig::parse(SMALL).unwrap();
    assert_eq!(small.mode, Mode::Potential);
    assert_eq!(small.epsilon, 0.05);
}

#[test]
fn config_errors() {
    assert!(matches!(RunConfig::parse("nonsense = 1"), Err(Error::Config(_))));
    assert!(matches!(RunConfig::parse("gamma = 0.3"), Err(Error::Config(_))));
    assert!(matches!(RunConfig::parse("mu = 3"), Err(Error::Config(_))));
    assert!(matches!(RunConfig::parse("epsilon_small = 0.5"), Err(Error::Config(_))));
    assert!(matches!(RunConfig::parse("mode = \"free\"").map(|c| c.mode), Ok(Mode::Free)));
    assert_eq!(Error::Config(String::new()).exit_code(), 2);
    assert_eq!(Error::BlowUp(1.0).exit_code(), 3);
}

#[test]
fn exit_code_two_on_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "x_max = -1.0").unwrap();
    assert_eq!(scatlab(dir.path(), &["--config", bad.to_str().unwrap(), "scatter"]).0, 2);
    assert_eq!(scatlab(dir.path(), &["--config", "missing.toml", "scatter"]).0, 2);
    assert_eq!(scatlab(dir.path(), &["--mode", "sideways", "scatter"]).0, 2);
    assert_eq!(scatlab(dir.path(), &["extract-profile", "--snapshots", "."]).0, 2);
}

#[test]
fn scatter_and_basis_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let hash = RunConfig::parse(SMALL).unwrap().hash();
    let (code, text) = scatlab(dir.path(), &["--config", &cfg, "--out", "o", "scatter"]);
    assert_eq!(code, 0, "{text}");
    let csv = fs::read_to_string(dir.path().join("o/scatter.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), format!("# config_hash={hash}"));
    assert!(lines.next().unwrap().starts_with("xi,re_t"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 8);
    // 17 significant digits
    assert_eq!(row[0].split('e').next().unwrap().len(), 18);
    assert_eq!(csv.lines().count(), 2 + 200);

    let (code, text) = scatlab(dir.path(), &["--config", &cfg, "--out", "o", "basis", "--xi", "0.2,1"]);
    assert_eq!(code, 0, "{text}");
    assert!(dir.path().join("o/basis_xi_0.2.csv").exists());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/basis.json")).unwrap()).unwrap();
    // --xi is part of the effective configuration
    let effective = RunConfig { basis_xi: vec![0.2, 1.0], ..RunConfig::parse(SMALL).unwrap() };
    assert_eq!(json["config_hash"], effective.hash());
    let freqs = json["frequencies"].as_array().unwrap();
    assert_eq!(freqs.len(), 2);
    assert!(freqs[0]["eigen_residual"].as_f64().unwrap() < 1e-3);
}

#[test]
fn free_mode_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (code, _) = scatlab(dir.path(), &["--config", &cfg, "--mode", "free", "--out", "o", "scatter"]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("o/scatter.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(2).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!((row[1], row[2], row[3], row[4]), (1.0, 0.0, 0.0, 0.0));
}

#[test]
fn linear_and_galilei_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (code, text) = scatlab(dir.path(), &["--config", &cfg, "--out", "o", "evolve-linear"]);
    assert_eq!(code, 0, "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/evolve_linear.json")).unwrap()).unwrap();
    assert!(json["global_slope"].as_f64().unwrap() < -0.3);
    // beyond the truncation horizon of the grid
    let (code, _) = scatlab(dir.path(), &["--config", &cfg, "--out", "o", "evolve-linear", "--times", "10,100"]);
    assert_eq!(code, 3);
    let (code, text) = scatlab(dir.path(), &["--config", &cfg, "--out", "o", "galilei-report", "--times", "1,5"]);
    assert_eq!(code, 0, "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/galilei.json")).unwrap()).unwrap();
    assert_eq!(json["fields"].as_array().unwrap().len(), 2);
}

#[test]
fn nls_snapshots_feed_profile_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (code, text) = scatlab(dir.path(), &["--config", &cfg, "--out", "run", "evolve-nls"]);
    assert_eq!(code, 0, "{text}");
    let mut snaps: Vec<_> = fs::read_dir(dir.path().join("run"))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("snapshot_"))
        .collect();
    snaps.sort();
    let (t, u) = read_snapshot(snaps.last().unwrap()).unwrap();
    assert!((t - 6.0).abs() < 1e-12);
    assert!((u.grid.x_max() - 200.0).abs() < 0.125);
    let diag = fs::read_to_string(dir.path().join("run/diagnostics.jsonl")).unwrap();
    assert_eq!(diag.lines().count(), snaps.len());
    for line in diag.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["nullform_residual"].as_f64().unwrap() < 1e-6);
    }

    let (code, text) = scatlab(dir.path(), &["--config", &cfg, "--out", "prof", "extract-profile", "--snapshots", "run"]);
    assert_eq!(code, 0, "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("prof/profile.json")).unwrap()).unwrap();
    assert_eq!(json["t_b"].as_f64().unwrap(), 6.0);
    assert!(dir.path().join("prof/profile.csv").exists());
}

#[test]
fn free_mode_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = scatlab(dir.path(), &["--mode", "free", "--out", "v", "verify"]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(text.lines().filter(|l| l.contains("[PASS]")).count(), 2);
}
