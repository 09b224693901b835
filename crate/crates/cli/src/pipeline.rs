//! `run`: source → JSA → separability → detection, with file exports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use triphoton::detection::{
    optimize_lo_basinhopping, optimize_lo_gd, LocalOscillator, OptimizerReport,
};
use triphoton::jsa::{apply_filter, build_ring_jsa, build_waveguide_jsa, project_s, retained_power, Jsa};
use triphoton::numerics::{csv_float, FrequencyGrid};
use triphoton::separability::{analyze_rho, reduced_density_matrix, SchmidtDecomposition, SeparabilityReport};

use crate::config::{DetectionConfig, OptimizerKind, RunConfig, Source};
use crate::error::CliError;

/// How many leading fractions and modes are reported.
pub const REPORTED_MODES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub n_points: usize,
    pub omega_min: f64,
    pub omega_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSummary {
    pub optimizer: OptimizerKind,
    pub eta_abs: f64,
    pub eta_phase: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    /// `|⟨g, f₀⟩|` against the principal mode.
    pub principal_overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config_hash: String,
    pub source: String,
    pub grid: GridSummary,
    pub epsilon_sq: f64,
    /// Power kept by the filter, when one is configured.
    pub filter_retained: Option<f64>,
    pub kappa: f64,
    pub kappa_eigen: f64,
    pub concurrence: f64,
    pub mode_count: usize,
    /// `r₀ … r₉`.
    pub fractions: Vec<f64>,
    pub eta: Option<EtaSummary>,
    /// Files written, relative to the output directory.
    pub files: Vec<String>,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// SHA-256 of the canonical config, with the output location removed so the
/// hash only reflects the physics.
pub fn config_hash(config: &RunConfig) -> String {
    let mut c = config.clone();
    c.output_dir = None;
    let digest = Sha256::digest(serde_json::to_vec(&c).expect("config serializes"));
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// The JSA requested by `config` for an already resolved source.
pub fn build_jsa(config: &RunConfig, src: &Source) -> Result<(Jsa, Option<f64>), CliError> {
    let grid = config.resolve_grid(src)?;
    build_jsa_on(config, src, &grid)
}

fn build_jsa_on(config: &RunConfig, src: &Source, grid: &FrequencyGrid) -> Result<(Jsa, Option<f64>), CliError> {
    let jsa = match src {
        Source::Waveguide(w) => build_waveguide_jsa(w, grid)?,
        Source::Ring(r) => build_ring_jsa(r, grid)?,
    };
    match config.filter {
        Some([lo, hi]) => {
            let kept = retained_power(&jsa, (lo, hi));
            Ok((apply_filter(&jsa, (lo, hi))?, Some(kept)))
        }
        None => Ok((jsa, None)),
    }
}

/// Separability of the configured source, without detection or files.
pub fn kappa_of(config: &RunConfig, src: &Source) -> Result<f64, CliError> {
    let (jsa, _) = build_jsa(config, src)?;
    let rho = reduced_density_matrix(&jsa);
    Ok(triphoton::separability::kappa(&rho, jsa.grid())?)
}

fn optimize(jsa: &Jsa, f0: &LocalOscillator, det: &DetectionConfig) -> Result<OptimizerReport, CliError> {
    let mut starts = vec![(f0.clone(), det.rng_seed)];
    for s in 0..det.seeds as u64 {
        let seed = det.rng_seed.wrapping_add(s + 1);
        starts.push((LocalOscillator::random_uniform(*jsa.grid(), seed)?, seed));
    }
    let mut best: Option<OptimizerReport> = None;
    for (lo, seed) in starts {
        let r = match det.optimizer {
            OptimizerKind::Gd => optimize_lo_gd(jsa, &lo, &det.gd_options())?,
            OptimizerKind::Bh => optimize_lo_basinhopping(jsa, &lo, &det.bh_options(seed))?,
        };
        if best.as_ref().is_none_or(|b| r.eta_abs > b.eta_abs) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}

/// `|⟨g, f⟩| = |∫ g* f|`.
pub fn mode_overlap(grid: &FrequencyGrid, g: &[triphoton::Complex64], f: &[triphoton::Complex64]) -> f64 {
    grid.weights()
        .iter()
        .zip(g.iter().zip(f))
        .map(|(w, (a, b))| a.conj() * b * *w)
        .sum::<triphoton::Complex64>()
        .norm()
}

struct Writer {
    dir: PathBuf,
    files: Vec<String>,
}

impl Writer {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        std::fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn rho_csv(grid: &FrequencyGrid, rho: &triphoton::numerics::HermitianMatrix) -> String {
    let om = grid.omegas();
    let mut out = String::from("omega1,omega2,re,im\n");
    for (a, wa) in om.iter().enumerate() {
        for (b, wb) in om.iter().enumerate() {
            let v = rho.get(a, b);
            let _ = writeln!(out, "{},{},{},{}", csv_float(*wa), csv_float(*wb), csv_float(v.re), csv_float(v.im));
        }
    }
    out
}

fn fractions_csv(report: &SeparabilityReport) -> String {
    let mut out = String::from("n,r_n\n");
    for (n, r) in report.fractions.iter().enumerate() {
        let _ = writeln!(out, "{n},{}", csv_float(*r));
    }
    out
}

fn mode_csv(schmidt: &SchmidtDecomposition, n: usize) -> String {
    let mut out = String::from("omega,re_f,im_f\n");
    for (w, f) in schmidt.grid.omegas().iter().zip(&schmidt.modes[n]) {
        let _ = writeln!(out, "{},{},{}", csv_float(*w), csv_float(f.re), csv_float(f.im));
    }
    out
}

#[derive(Serialize)]
struct JsaMeta<'a> {
    source: &'a str,
    grid: GridSummary,
    epsilon: f64,
    epsilon_sq: f64,
    pump_omega: f64,
    pump_sigma: f64,
    pump_photons: f64,
    filter: Option<[f64; 2]>,
}

/// Runs the whole pipeline and writes every artifact to `out_dir`.
///
/// `base_dir` anchors relative paths inside the config.
pub fn run(config: &RunConfig, base_dir: &Path, out_dir: &Path) -> Result<RunSummary, CliError> {
    let src = config.resolve_source(base_dir)?;
    let (jsa, filter_retained) = build_jsa(config, &src)?;
    let grid = *jsa.grid();
    log::info!(
        "{} source: {} points on [{:.6e}, {:.6e}] rad/s, |eps|^2 = {:.3e}",
        src.kind(),
        grid.len(),
        grid.omega_min(),
        grid.omega_max(),
        jsa.epsilon_sq()
    );
    let rho = reduced_density_matrix(&jsa);
    let (report, schmidt) = analyze_rho(&rho, &grid, jsa.epsilon_sq())?;
    log::info!("kappa = {:.6}, modes = {}", report.kappa, report.mode_count);

    std::fs::create_dir_all(out_dir)?;
    let mut w = Writer {
        dir: out_dir.to_path_buf(),
        files: Vec::new(),
    };
    w.write("projection_s.csv", &project_s(&jsa).to_csv())?;
    w.write("jsa_center_slice.csv", &jsa.slice_abs2_csv(grid.len() / 2))?;
    w.write("rho.csv", &rho_csv(&grid, &rho))?;
    w.write("fractions.csv", &fractions_csv(&report))?;
    let n_modes = report.mode_count.clamp(1, REPORTED_MODES);
    for n in 0..n_modes {
        w.write(&format!("mode_{n}.csv"), &mode_csv(&schmidt, n))?;
    }
    let grid_summary = GridSummary {
        n_points: grid.len(),
        omega_min: grid.omega_min(),
        omega_max: grid.omega_max(),
    };
    let meta = JsaMeta {
        source: src.kind(),
        grid: grid_summary.clone(),
        epsilon: jsa.epsilon(),
        epsilon_sq: jsa.epsilon_sq(),
        pump_omega: src.pump().omega_p,
        pump_sigma: src.pump().sigma,
        pump_photons: src.pump().n_photons,
        filter: config.filter,
    };
    w.write("jsa_meta.json", &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"))?;

    let eta = match &config.detection {
        Some(det) => {
            let f0 = LocalOscillator::new(grid, schmidt.modes[0].clone())?;
            let r = optimize(&jsa, &f0, det)?;
            log::info!("|eta| = {:.6} after {} iterations", r.eta_abs, r.iterations);
            w.write("lo.csv", &r.lo.to_csv())?;
            let summary = EtaSummary {
                optimizer: det.optimizer,
                eta_abs: r.eta_abs,
                eta_phase: r.eta_phase,
                iterations: r.iterations,
                converged: r.converged,
                gradient_norm: r.gradient_norm,
                principal_overlap: mode_overlap(&grid, r.lo.amplitude(), f0.amplitude()),
            };
            w.write("optimizer.json", &(serde_json::to_string_pretty(&summary).expect("serializes") + "\n"))?;
            Some(summary)
        }
        None => None,
    };

    let mut files = w.files.clone();
    files.push("summary.json".into());
    files.sort();
    let summary = RunSummary {
        config_hash: config_hash(config),
        source: src.kind().into(),
        grid: grid_summary,
        epsilon_sq: jsa.epsilon_sq(),
        filter_retained,
        kappa: report.kappa,
        kappa_eigen: report.kappa_eigen,
        concurrence: report.concurrence,
        mode_count: report.mode_count,
        fractions: report.fractions.iter().take(REPORTED_MODES).copied().collect(),
        eta,
        files,
    };
    w.write("summary.json", &summary.to_json())?;
    Ok(summary)
}

/// Expected triplets per second: `|ε|² × repetition rate`.
pub fn report_rate(epsilon_sq: f64, rep_rate_hz: f64) -> f64 {
    epsilon_sq * rep_rate_hz
}
