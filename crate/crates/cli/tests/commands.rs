use std::path::Path;
use std::process::Command;

use triphoton_cli::config::{DispersionSpec, SourceConfig};
use triphoton_cli::presets::preset;
use triphoton_cli::{run, sweep_pulse_duration, sweep_pump_bandwidth, sweep_pump_wavelength, RunSummary};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_triphoton"))
}

fn small(name: &str, n: usize) -> triphoton_cli::RunConfig {
    let mut cfg = preset(name).unwrap();
    cfg.grid.n_points = Some(n);
    cfg
}

#[test]
fn run_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("ideal-waveguide", 41);
    let a = run(&cfg, Path::new("."), &dir.path().join("a")).unwrap();
    let b = run(&cfg, Path::new("."), &dir.path().join("b")).unwrap();
    let ja = std::fs::read(dir.path().join("a/summary.json")).unwrap();
    let jb = std::fs::read(dir.path().join("b/summary.json")).unwrap();
    assert_eq!(ja, jb);
    assert_eq!(a, b);
    let parsed = RunSummary::from_json(std::str::from_utf8(&ja).unwrap()).unwrap();
    assert_eq!(parsed, a);
    for f in &a.files {
        assert!(dir.path().join("a").join(f).exists(), "{f}");
    }
    let fractions = std::fs::read_to_string(dir.path().join("a/fractions.csv")).unwrap();
    assert!(fractions.starts_with("n,r_n\n"));
    let mode = std::fs::read_to_string(dir.path().join("a/mode_0.csv")).unwrap();
    assert!(mode.starts_with("omega,re_f,im_f\n"));
    assert_eq!(mode.lines().count(), 42);
    assert!(a.eta.as_ref().unwrap().converged);
}

#[test]
fn single_ratio_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("ideal-waveguide", 31);
    cfg.detection = None;
    let table = sweep_pump_bandwidth(&cfg, Path::new("."), &[1.7]).unwrap();
    if let SourceConfig::Waveguide(w) = &mut cfg.source {
        w.pump.sigma_ratio = Some(1.7);
    }
    let summary = run(&cfg, Path::new("."), dir.path()).unwrap();
    assert_eq!(table.rows[0].kappa, Some(summary.kappa));
}

#[test]
fn sweep_errors_are_recorded_per_row() {
    let mut cfg = small("ideal-waveguide", 21);
    if let SourceConfig::Waveguide(w) = &mut cfg.source {
        w.triplet_dispersion = DispersionSpec::Sellmeier {
            material: Some("fused_silica".into()),
            geo2_fraction: None,
        };
        w.pump_dispersion = w.triplet_dispersion.clone();
        w.pump.sigma_ratio = None;
        w.pump.sigma = Some(4e13);
    }
    // The Sellmeier data ends at 0.21 µm, so a 150 nm pump cannot be evaluated.
    let table = sweep_pump_wavelength(&cfg, Path::new("."), &[458.7, 150.0]).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows[0].kappa.is_some() && table.rows[0].error.is_none());
    assert!(table.rows[1].kappa.is_none() && table.rows[1].error.is_some());
    let csv = table.to_csv();
    assert!(csv.starts_with("pump_lambda,kappa,error\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn matched_velocity_wavelength_sweep_is_symmetric() {
    let cfg = small("ideal-waveguide", 41);
    let t = sweep_pump_wavelength(&cfg, Path::new("."), &[457.7, 458.7, 459.7]).unwrap();
    // Equal detunings in frequency, not in wavelength, are mirror images.
    let w = |nm: f64| triphoton::numerics::omega_from_wavelength(nm * 1e-9);
    let mid = w(458.7);
    let lam = |omega: f64| triphoton::numerics::wavelength_from_omega(omega) * 1e9;
    let d = w(457.7) - mid;
    let t2 = sweep_pump_wavelength(&cfg, Path::new("."), &[lam(mid + d), lam(mid - d)]).unwrap();
    let (a, b) = (t2.rows[0].kappa.unwrap(), t2.rows[1].kappa.unwrap());
    assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
    assert!(t.rows.iter().all(|r| r.kappa.is_some()));
}

#[test]
fn ring_duration_sweep_decreases_toward_short_pulses() {
    let cfg = small("ring-mismatched-Q", 61);
    let durations = [1e-9, 1e-10, 1e-11, 1e-12];
    let t = sweep_pulse_duration(&cfg, Path::new("."), &durations).unwrap();
    let k: Vec<f64> = t.rows.iter().map(|r| r.kappa.unwrap()).collect();
    for pair in k.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-3, "{k:?}");
    }
    assert!(k[0] > k[3]);
    assert!(sweep_pump_bandwidth(&cfg, Path::new("."), &[1.0]).is_err());
}

#[test]
fn binary_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["presets", "list"]).output().unwrap();
    assert!(out.status.success());
    let names = String::from_utf8(out.stdout).unwrap();
    assert!(names.contains("ring-equal-Q") && names.contains("geo2-taper-taylor"));

    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, small("ideal-waveguide", 21).to_json()).unwrap();
    let out_dir = dir.path().join("run");
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_dir)
        .env("TRIPHOTON_WORKERS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("summary.json").exists());

    let rate = bin()
        .args(["rate", "--rep-rate", "1e7", "--summary"])
        .arg(out_dir.join("summary.json"))
        .output()
        .unwrap();
    assert!(rate.status.success());
    let value: f64 = String::from_utf8(rate.stdout).unwrap().trim().parse().unwrap();
    assert!(value > 0.0);

    let sweep_dir = dir.path().join("sweep");
    let status = bin()
        .args(["sweep", "--param", "pump_sigma", "--values", "0.5,1,2", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&sweep_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    std::fs::write(&cfg_path, r#"{"source": {"waveguide": {"length_m": 0.3}}}"#).unwrap();
    let status = bin().args(["run", "--config"]).arg(&cfg_path).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // Valid config whose filter removes everything: numeric failure.
    let mut cfg = small("ideal-waveguide", 21);
    cfg.filter = Some([1.0, 2.0]);
    std::fs::write(&cfg_path, cfg.to_json()).unwrap();
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("empty"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}
