//! One-parameter sweeps of κ.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use triphoton::jsa::{sigma_from_fwhm, PumpSpec};
use triphoton::numerics::{csv_float, omega_from_wavelength};

use crate::config::{RunConfig, Source, SweepParameter};
use crate::error::{CliError, ConfigError};
use crate::pipeline::{config_hash, kappa_of};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub kappa: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub config_hash: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `<param>,kappa,error`; failed rows leave κ empty.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},kappa,error\n", self.parameter.name());
        for r in &self.rows {
            let kappa = r.kappa.map(csv_float).unwrap_or_default();
            let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            let _ = writeln!(out, "{},{kappa},{err}", csv_float(r.value));
        }
        out
    }

    /// Row with the smallest κ among the successful ones.
    pub fn argmin(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.kappa.is_some())
            .min_by(|a, b| a.kappa.unwrap().total_cmp(&b.kappa.unwrap()))
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("sweep.csv"), self.to_csv())?;
        std::fs::write(
            dir.join("sweep.json"),
            serde_json::to_string_pretty(self).expect("table serializes") + "\n",
        )?;
        Ok(())
    }
}

fn with_pump(src: &Source, pump: PumpSpec) -> Source {
    match src {
        Source::Waveguide(w) => Source::Waveguide(triphoton::jsa::WaveguideSource { pump, ..w.clone() }),
        Source::Ring(r) => Source::Ring(triphoton::jsa::RingSource { pump, ..r.clone() }),
    }
}

/// Source for one sweep point. Dispersion expansion points stay where the
/// base config put them.
fn point_source(base: &Source, parameter: SweepParameter, value: f64) -> Result<Source, CliError> {
    let pump = base.pump();
    let err = |msg: &str| CliError::Config(ConfigError::new("sweep.values", msg));
    if !(value > 0.0 && value.is_finite()) {
        return Err(err("values must be positive"));
    }
    let new_pump = match (parameter, base) {
        (SweepParameter::PumpSigma, Source::Waveguide(w)) => pump.with_sigma(value * w.pmf_bandwidth()?)?,
        (SweepParameter::PumpLambda, Source::Waveguide(_)) => {
            PumpSpec::new(omega_from_wavelength(value * 1e-9), pump.sigma, pump.n_photons)?
        }
        (SweepParameter::PulseDuration, _) => pump.with_sigma(sigma_from_fwhm(value))?,
        (_, Source::Ring(_)) => {
            return Err(CliError::Config(ConfigError::new(
                "sweep.parameter",
                format!("{} needs a waveguide source", parameter.name()),
            )))
        }
    };
    Ok(with_pump(base, new_pump))
}

/// κ at every value; points run in parallel and failures are kept per row.
pub fn sweep(
    config: &RunConfig,
    base_dir: &Path,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<SweepTable, CliError> {
    if values.is_empty() {
        return Err(ConfigError::new("sweep.values", "must not be empty").into());
    }
    let base = config.resolve_source(base_dir)?;
    if parameter != SweepParameter::PulseDuration && matches!(base, Source::Ring(_)) {
        return Err(ConfigError::new(
            "sweep.parameter",
            format!("{} needs a waveguide source", parameter.name()),
        )
        .into());
    }
    let rows = values
        .par_iter()
        .map(|&value| match point_source(&base, parameter, value).and_then(|s| kappa_of(config, &s)) {
            Ok(k) => SweepRow {
                value,
                kappa: Some(k),
                error: None,
            },
            Err(e) => {
                log::warn!("{} = {value:e}: {e}", parameter.name());
                SweepRow {
                    value,
                    kappa: None,
                    error: Some(e.to_string()),
                }
            }
        })
        .collect();
    Ok(SweepTable {
        parameter,
        config_hash: config_hash(config),
        rows,
    })
}

pub fn sweep_pump_bandwidth(config: &RunConfig, base_dir: &Path, ratios: &[f64]) -> Result<SweepTable, CliError> {
    sweep(config, base_dir, SweepParameter::PumpSigma, ratios)
}

pub fn sweep_pump_wavelength(config: &RunConfig, base_dir: &Path, lambdas_nm: &[f64]) -> Result<SweepTable, CliError> {
    sweep(config, base_dir, SweepParameter::PumpLambda, lambdas_nm)
}

pub fn sweep_pulse_duration(config: &RunConfig, base_dir: &Path, durations_s: &[f64]) -> Result<SweepTable, CliError> {
    sweep(config, base_dir, SweepParameter::PulseDuration, durations_s)
}
