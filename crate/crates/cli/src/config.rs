//! JSON run configuration and its resolution into library types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use triphoton::detection::{BasinHoppingOptions, GdOptions};
use triphoton::dispersion::{
    fs2_per_mm, DispersionModel, SellmeierFamily, SellmeierMaterial, TabulatedDispersion,
    TaylorDispersion,
};
use triphoton::jsa::{
    sigma_from_fwhm, PumpSpec, RingResonance, RingSource, WaveguideSource,
    DEFAULT_RING_POINTS, DEFAULT_WAVEGUIDE_POINTS,
};
use triphoton::numerics::{omega_from_wavelength, FrequencyGrid, HBAR};

use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub source: SourceConfig,
    #[serde(default)]
    pub grid: GridConfig,
    /// Box filter `[ω_lo, ω_hi]` in rad/s applied to all three photons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Waveguide(WaveguideConfig),
    Ring(RingConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideConfig {
    pub pump_dispersion: DispersionSpec,
    pub triplet_dispersion: DispersionSpec,
    pub length_m: f64,
    pub gamma: f64,
    #[serde(default)]
    pub gamma_phase: f64,
    pub pump: PumpConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circumference_m: Option<f64>,
    pub q_pump: f64,
    pub q_triplet: f64,
    /// Bus couplings |γ_P|, |γ_F|; critical coupling when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triplet_coupling: Option<f64>,
    pub gamma: f64,
    #[serde(default)]
    pub gamma_phase: f64,
    pub pump: PumpConfig,
}

/// Exactly one entry of each group must be given:
/// `lambda_nm | omega_p`, `sigma | sigma_ratio | duration_fwhm_s`,
/// `n_photons | pulse_energy_j`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// σ in units of the phase-matching bandwidth σ_PM (waveguides only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_fwhm_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_photons: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse_energy_j: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DispersionSpec {
    /// Second-order expansion; `omega0` defaults to the wave's nominal
    /// frequency (ω̄_P or ω̄_P/3).
    Taylor {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega0: Option<f64>,
        k0: f64,
        inv_v: f64,
        beta2_fs2_per_mm: f64,
    },
    /// `omega_rad_s,n_eff` table, from a file (relative to the config) or inline.
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omegas: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_eff: Option<Vec<f64>>,
    },
    /// Bulk glass: `fused_silica`, or GeO₂-doped silica at a mole fraction.
    Sellmeier {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        geo2_fraction: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    /// `[ω_min, ω_max]` in rad/s, replacing the source's default window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Gd,
    Bh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub optimizer: OptimizerKind,
    /// Extra random starts besides the principal mode.
    #[serde(default)]
    pub seeds: usize,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_hops")]
    pub n_hops: usize,
    #[serde(default = "default_perturb")]
    pub perturb_scale: f64,
}

fn default_tol() -> f64 {
    GdOptions::default().tol
}
fn default_max_iter() -> usize {
    GdOptions::default().max_iter
}
fn default_hops() -> usize {
    BasinHoppingOptions::default().n_hops
}
fn default_perturb() -> f64 {
    BasinHoppingOptions::default().perturb_scale
}

impl DetectionConfig {
    pub fn gd_options(&self) -> GdOptions {
        GdOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn bh_options(&self, seed: u64) -> BasinHoppingOptions {
        BasinHoppingOptions {
            n_hops: self.n_hops,
            perturb_scale: self.perturb_scale,
            seed,
            gd: self.gd_options(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// σ/σ_PM ratio.
    PumpSigma,
    /// Pump wavelength in nm.
    PumpLambda,
    /// Intensity FWHM in s.
    PulseDuration,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::PumpSigma => "pump_sigma",
            SweepParameter::PumpLambda => "pump_lambda",
            SweepParameter::PulseDuration => "pulse_duration",
        }
    }

    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name {
            "pump_sigma" => Ok(Self::PumpSigma),
            "pump_lambda" => Ok(Self::PumpLambda),
            "pulse_duration" => Ok(Self::PulseDuration),
            other => Err(ConfigError::new(
                "sweep.parameter",
                format!("unknown parameter {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// A configured source ready for the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Waveguide(WaveguideSource),
    Ring(RingSource),
}

impl Source {
    pub fn kind(&self) -> &'static str {
        match self {
            Source::Waveguide(_) => "waveguide",
            Source::Ring(_) => "ring",
        }
    }

    pub fn pump(&self) -> &PumpSpec {
        match self {
            Source::Waveguide(w) => &w.pump,
            Source::Ring(r) => &r.pump,
        }
    }

    pub fn default_points(&self) -> usize {
        match self {
            Source::Waveguide(_) => DEFAULT_WAVEGUIDE_POINTS,
            Source::Ring(_) => DEFAULT_RING_POINTS,
        }
    }

    pub fn default_grid(&self, n_points: usize) -> triphoton::Result<FrequencyGrid> {
        match self {
            Source::Waveguide(w) => w.default_grid(n_points),
            Source::Ring(r) => r.default_grid(n_points),
        }
    }
}

fn positive(path: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(path, format!("must be positive and finite, got {v}")))
    }
}

fn exactly_one<'a, T: Copy>(
    path: &str,
    options: &[(&'a str, Option<T>)],
) -> Result<(&'a str, T), ConfigError> {
    let given: Vec<_> = options
        .iter()
        .filter_map(|(name, v)| v.map(|v| (*name, v)))
        .collect();
    match given.as_slice() {
        [one] => Ok(*one),
        [] => Err(ConfigError::new(
            path,
            format!(
                "one of {} is required",
                options.iter().map(|o| o.0).collect::<Vec<_>>().join(", ")
            ),
        )),
        _ => Err(ConfigError::new(
            path,
            format!(
                "only one of {} may be given",
                given.iter().map(|o| o.0).collect::<Vec<_>>().join(", ")
            ),
        )),
    }
}

impl PumpConfig {
    pub fn omega_p(&self, path: &str) -> Result<f64, ConfigError> {
        let (name, v) = exactly_one(
            path,
            &[("lambda_nm", self.lambda_nm), ("omega_p", self.omega_p)],
        )?;
        let v = positive(&format!("{path}.{name}"), v)?;
        Ok(if name == "lambda_nm" {
            omega_from_wavelength(v * 1e-9)
        } else {
            v
        })
    }

    /// `sigma_pm` is required only when `sigma_ratio` is used.
    fn resolve(&self, path: &str, sigma_pm: Option<f64>) -> Result<PumpSpec, ConfigError> {
        let omega_p = self.omega_p(path)?;
        let (name, v) = exactly_one(
            path,
            &[
                ("sigma", self.sigma),
                ("sigma_ratio", self.sigma_ratio),
                ("duration_fwhm_s", self.duration_fwhm_s),
            ],
        )?;
        let v = positive(&format!("{path}.{name}"), v)?;
        let sigma = match name {
            "sigma" => v,
            "sigma_ratio" => {
                v * sigma_pm.ok_or_else(|| {
                    ConfigError::new(
                        format!("{path}.sigma_ratio"),
                        "needs a source with a phase-matching bandwidth",
                    )
                })?
            }
            _ => sigma_from_fwhm(v),
        };
        let (name, v) = exactly_one(
            path,
            &[("n_photons", self.n_photons), ("pulse_energy_j", self.pulse_energy_j)],
        )?;
        let v = positive(&format!("{path}.{name}"), v)?;
        let n_photons = if name == "n_photons" {
            v
        } else {
            v / (HBAR * omega_p)
        };
        PumpSpec::new(omega_p, sigma, n_photons).map_err(|e| ConfigError::new(path, e.to_string()))
    }
}

impl DispersionSpec {
    fn resolve(
        &self,
        path: &str,
        nominal_omega: f64,
        base_dir: &Path,
    ) -> Result<DispersionModel, ConfigError> {
        match self {
            DispersionSpec::Taylor {
                omega0,
                k0,
                inv_v,
                beta2_fs2_per_mm,
            } => {
                for (name, v) in [("k0", k0), ("inv_v", inv_v), ("beta2_fs2_per_mm", beta2_fs2_per_mm)] {
                    if !v.is_finite() {
                        return Err(ConfigError::new(format!("{path}.{name}"), "must be finite"));
                    }
                }
                let omega0 = match omega0 {
                    Some(w) => positive(&format!("{path}.omega0"), *w)?,
                    None => nominal_omega,
                };
                Ok(TaylorDispersion {
                    omega0,
                    k0: *k0,
                    inv_v: *inv_v,
                    beta2: fs2_per_mm(*beta2_fs2_per_mm),
                }
                .into())
            }
            DispersionSpec::Tabulated {
                path: file,
                omegas,
                n_eff,
            } => {
                let table = match (file, omegas, n_eff) {
                    (Some(f), None, None) => {
                        let full = if f.is_absolute() { f.clone() } else { base_dir.join(f) };
                        TabulatedDispersion::from_csv_file(&full)
                    }
                    (None, Some(o), Some(n)) => TabulatedDispersion::new(o.clone(), n.clone()),
                    _ => {
                        return Err(ConfigError::new(
                            path,
                            "give either path or both omegas and n_eff",
                        ))
                    }
                };
                table
                    .map(Into::into)
                    .map_err(|e| ConfigError::new(path, e.to_string()))
            }
            DispersionSpec::Sellmeier {
                material,
                geo2_fraction,
            } => match (material.as_deref(), geo2_fraction) {
                (Some("fused_silica") | Some("fused-silica"), None) => {
                    Ok(SellmeierMaterial::fused_silica().into())
                }
                (Some("germania"), None) => Ok(SellmeierMaterial::germania().into()),
                (None, Some(x)) => SellmeierFamily::geo2_silica()
                    .at_fraction(*x)
                    .map(Into::into)
                    .map_err(|e| ConfigError::new(format!("{path}.geo2_fraction"), e.to_string())),
                (Some(other), None) => Err(ConfigError::new(
                    format!("{path}.material"),
                    format!("unknown material {other:?}"),
                )),
                _ => Err(ConfigError::new(
                    path,
                    "give either material or geo2_fraction",
                )),
            },
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::new("$", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("$", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks that do not need file access.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(n) = self.grid.n_points {
            if n < 2 {
                return Err(ConfigError::new("grid.n_points", "at least 2 points"));
            }
        }
        if let Some([lo, hi]) = self.grid.window {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(ConfigError::new("grid.window", "need 0 < lo < hi"));
            }
        }
        if let Some([lo, hi]) = self.filter {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(ConfigError::new("filter", "need lo < hi"));
            }
        }
        if let Some(d) = &self.detection {
            positive("detection.tol", d.tol)?;
            if !(d.perturb_scale >= 0.0) {
                return Err(ConfigError::new("detection.perturb_scale", "must be non-negative"));
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(ConfigError::new("sweep.values", "must not be empty"));
            }
        }
        match &self.source {
            SourceConfig::Waveguide(w) => {
                positive("source.waveguide.length_m", w.length_m)?;
            }
            SourceConfig::Ring(r) => {
                exactly_one(
                    "source.ring",
                    &[("radius_m", r.radius_m), ("circumference_m", r.circumference_m)],
                )?;
                positive("source.ring.q_pump", r.q_pump)?;
                positive("source.ring.q_triplet", r.q_triplet)?;
            }
        }
        Ok(())
    }

    /// Builds the library source. Relative table paths are taken relative
    /// to `base_dir`.
    pub fn resolve_source(&self, base_dir: &Path) -> Result<Source, ConfigError> {
        self.validate()?;
        match &self.source {
            SourceConfig::Waveguide(w) => {
                let path = "source.waveguide";
                let omega_p = w.pump.omega_p(&format!("{path}.pump"))?;
                let pump_dispersion =
                    w.pump_dispersion
                        .resolve(&format!("{path}.pump_dispersion"), omega_p, base_dir)?;
                let triplet_dispersion = w.triplet_dispersion.resolve(
                    &format!("{path}.triplet_dispersion"),
                    omega_p / 3.0,
                    base_dir,
                )?;
                if !w.gamma.is_finite() {
                    return Err(ConfigError::new(format!("{path}.gamma"), "must be finite"));
                }
                // Provisional pump to evaluate σ_PM at the right frequency.
                let mut src = WaveguideSource {
                    pump_dispersion,
                    triplet_dispersion,
                    length: w.length_m,
                    gamma: w.gamma,
                    gamma_phase: w.gamma_phase,
                    pump: PumpSpec::new(omega_p, 1.0, 1.0)
                        .map_err(|e| ConfigError::new(format!("{path}.pump"), e.to_string()))?,
                };
                let sigma_pm = src.pmf_bandwidth().ok();
                src.pump = w.pump.resolve(&format!("{path}.pump"), sigma_pm)?;
                Ok(Source::Waveguide(src))
            }
            SourceConfig::Ring(r) => {
                let path = "source.ring";
                let pump = r.pump.resolve(&format!("{path}.pump"), None)?;
                let circumference = match (r.radius_m, r.circumference_m) {
                    (Some(radius), None) => {
                        2.0 * std::f64::consts::PI * positive(&format!("{path}.radius_m"), radius)?
                    }
                    (None, Some(c)) => positive(&format!("{path}.circumference_m"), c)?,
                    _ => unreachable!("validated"),
                };
                let resonance = |name: &str, omega: f64, q: f64, coupling: Option<f64>| {
                    match coupling {
                        Some(g) => RingResonance::new(omega, q, g),
                        None => RingResonance::critically_coupled(omega, q),
                    }
                    .map_err(|e| ConfigError::new(format!("{path}.{name}"), e.to_string()))
                };
                Ok(Source::Ring(RingSource {
                    pump_resonance: resonance("pump_coupling", pump.omega_p, r.q_pump, r.pump_coupling)?,
                    triplet_resonance: resonance(
                        "triplet_coupling",
                        pump.omega_p / 3.0,
                        r.q_triplet,
                        r.triplet_coupling,
                    )?,
                    circumference,
                    gamma: r.gamma,
                    gamma_phase: r.gamma_phase,
                    pump,
                }))
            }
        }
    }

    /// Grid requested by the config for `src`.
    pub fn resolve_grid(&self, src: &Source) -> Result<FrequencyGrid, ConfigError> {
        let n = self.grid.n_points.unwrap_or_else(|| src.default_points());
        match self.grid.window {
            Some([lo, hi]) => FrequencyGrid::new(lo, hi, n),
            None => src.default_grid(n),
        }
        .map_err(|e| ConfigError::new("grid", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn waveguide_json(pump: &str) -> String {
        format!(
            r#"{{"source": {{"waveguide": {{
                "pump_dispersion": {{"kind": "taylor", "k0": 1.98e7, "inv_v": 4.9e-9, "beta2_fs2_per_mm": 0.0}},
                "triplet_dispersion": {{"kind": "taylor", "k0": 6.6e6, "inv_v": 4.9e-9, "beta2_fs2_per_mm": 21.9}},
                "length_m": 0.3, "gamma": 1.0, "pump": {pump}}}}}}}"#
        )
    }

    #[test]
    fn resolves_sigma_ratio() {
        let cfg = RunConfig::from_json(&waveguide_json(
            r#"{"lambda_nm": 458.7, "sigma_ratio": 1.0, "pulse_energy_j": 1e-9}"#,
        ))
        .unwrap();
        let Source::Waveguide(w) = cfg.resolve_source(Path::new(".")).unwrap() else {
            panic!("waveguide expected")
        };
        assert!((w.pump.sigma / w.pmf_bandwidth().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn errors_carry_field_paths() {
        let cfg = RunConfig::from_json(&waveguide_json(
            r#"{"lambda_nm": 458.7, "sigma": 1e13, "duration_fwhm_s": 1e-12, "n_photons": 1}"#,
        ))
        .unwrap();
        let err = cfg.resolve_source(Path::new(".")).unwrap_err();
        assert_eq!(err.path, "source.waveguide.pump");
        let err = RunConfig::from_json(&waveguide_json(r#"{"omega_p": -1, "sigma": 1, "n_photons": 1}"#))
            .unwrap()
            .resolve_source(Path::new("."))
            .unwrap_err();
        assert_eq!(err.path, "source.waveguide.pump.omega_p");
        assert!(RunConfig::from_json(r#"{"source": {"laser": {}}}"#).is_err());
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let mut text = waveguide_json(r#"{"lambda_nm": 458.7, "sigma": 1e13, "n_photons": 1}"#);
        text.pop();
        text.push_str(r#", "sweep": {"parameter": "pump_sigma", "values": []}}"#);
        assert_eq!(RunConfig::from_json(&text).unwrap_err().path, "sweep.values");
    }
}
