//! Wavenumber models and the three-photon phase mismatch.
//!
//! A [`DispersionModel`] maps angular frequency to propagation constant
//! `k(ω)`. Three flavours are supported: a second-order Taylor expansion,
//! a tabulated effective index and a bulk Sellmeier glass. The mismatch for
//! one pump photon splitting into three is
//! `Δk = k_P(ω₁+ω₂+ω₃) − k_F(ω₁) − k_F(ω₂) − k_F(ω₃)`.

mod phase_matching;
mod quadric;
mod sellmeier;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{interp_linear, wavelength_from_omega, SPEED_OF_LIGHT};

pub use phase_matching::{find_degenerate_phase_matching, PhaseMatchPoint};
pub use quadric::{quadric_eigensystem, quadric_matrix, QuadricEigensystem};
pub use sellmeier::{sellmeier_index, Composition, SellmeierFamily, SellmeierMaterial};

/// Minimum number of rows accepted in a dispersion table.
pub const MIN_TABLE_ROWS: usize = 16;

/// `k(ω) = k0 + inv_v (ω − ω0) + ½ beta2 (ω − ω0)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorDispersion {
    /// Expansion frequency, rad/s.
    pub omega0: f64,
    /// Wavenumber at `omega0`, 1/m.
    pub k0: f64,
    /// Inverse group velocity, s/m.
    pub inv_v: f64,
    /// Group-velocity dispersion, s²/m.
    pub beta2: f64,
}

impl TaylorDispersion {
    pub fn wavenumber(&self, omega: f64) -> f64 {
        let d = omega - self.omega0;
        self.k0 + self.inv_v * d + 0.5 * self.beta2 * d * d
    }

    /// Second-order expansion of any model about `omega0`, derivatives by
    /// central differences with step `h`.
    pub fn expand(model: &DispersionModel, omega0: f64, h: f64) -> Result<Self> {
        Ok(Self {
            omega0,
            k0: model.wavenumber(omega0)?,
            inv_v: model.inverse_group_velocity(omega0, h)?,
            beta2: model.group_velocity_dispersion(omega0, h)?,
        })
    }
}

/// Effective index sampled on a strictly increasing frequency table,
/// linearly interpolated and never extrapolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct TabulatedDispersion {
    omegas: Vec<f64>,
    n_eff: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    omegas: Vec<f64>,
    n_eff: Vec<f64>,
}

impl TryFrom<RawTable> for TabulatedDispersion {
    type Error = Error;
    fn try_from(raw: RawTable) -> Result<Self> {
        Self::new(raw.omegas, raw.n_eff)
    }
}

impl From<TabulatedDispersion> for RawTable {
    fn from(t: TabulatedDispersion) -> Self {
        RawTable {
            omegas: t.omegas,
            n_eff: t.n_eff,
        }
    }
}

impl TabulatedDispersion {
    pub fn new(omegas: Vec<f64>, n_eff: Vec<f64>) -> Result<Self> {
        if omegas.len() != n_eff.len() {
            return Err(Error::InvalidDispersion(format!(
                "{} frequencies but {} indices",
                omegas.len(),
                n_eff.len()
            )));
        }
        if omegas.len() < MIN_TABLE_ROWS {
            return Err(Error::InvalidDispersion(format!(
                "table has {} rows, need at least {MIN_TABLE_ROWS}",
                omegas.len()
            )));
        }
        if let Some(i) = omegas.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidDispersion(format!(
                "frequencies not strictly increasing at row {}",
                i + 1
            )));
        }
        if omegas.iter().chain(&n_eff).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDispersion("non-finite entry".into()));
        }
        Ok(Self { omegas, n_eff })
    }

    /// Parses CSV text with header `omega_rad_s,n_eff`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty dispersion table".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["omega_rad_s", "n_eff"] {
            return Err(Error::Parse(format!(
                "expected header `omega_rad_s,n_eff`, got `{header}`"
            )));
        }
        let mut omegas = Vec::new();
        let mut n_eff = Vec::new();
        for (row, line) in lines.enumerate() {
            let mut fields = line.split(',').map(str::trim);
            let mut next = |what: &str| -> Result<f64> {
                fields
                    .next()
                    .ok_or_else(|| Error::Parse(format!("row {}: missing {what}", row + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {what}: {e}", row + 1)))
            };
            omegas.push(next("omega_rad_s")?);
            n_eff.push(next("n_eff")?);
        }
        Self::new(omegas, n_eff)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega_rad_s,n_eff\n");
        for (w, n) in self.omegas.iter().zip(&self.n_eff) {
            out.push_str(&format!("{w:.16e},{n:.16e}\n"));
        }
        out
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn n_eff(&self) -> &[f64] {
        &self.n_eff
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.omegas[0], self.omegas[self.omegas.len() - 1])
    }

    pub fn wavenumber(&self, omega: f64) -> Result<f64> {
        let n = interp_linear(&self.omegas, &self.n_eff, omega)?;
        Ok(omega * n / SPEED_OF_LIGHT)
    }

    /// Inverse group velocity and GVD at every table node.
    ///
    /// Central differences over one table spacing on each side; the two end
    /// nodes use one-sided differences (first derivative) and copy the
    /// neighbouring second derivative.
    pub fn derivative_table(&self) -> (Vec<f64>, Vec<f64>) {
        let w = &self.omegas;
        let k: Vec<f64> = w
            .iter()
            .zip(&self.n_eff)
            .map(|(w, n)| w * n / SPEED_OF_LIGHT)
            .collect();
        let m = w.len();
        let mut inv_v = vec![0.0; m];
        let mut beta2 = vec![0.0; m];
        for i in 1..m - 1 {
            let (hm, hp) = (w[i] - w[i - 1], w[i + 1] - w[i]);
            inv_v[i] = (k[i + 1] - k[i - 1]) / (hm + hp);
            beta2[i] = 2.0 * ((k[i + 1] - k[i]) / hp - (k[i] - k[i - 1]) / hm) / (hm + hp);
        }
        inv_v[0] = (k[1] - k[0]) / (w[1] - w[0]);
        inv_v[m - 1] = (k[m - 1] - k[m - 2]) / (w[m - 1] - w[m - 2]);
        beta2[0] = beta2[1];
        beta2[m - 1] = beta2[m - 2];
        (inv_v, beta2)
    }
}

/// Any supported wavenumber model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DispersionModel {
    Taylor(TaylorDispersion),
    Tabulated(TabulatedDispersion),
    /// Bulk glass; `k = ω n(λ) / c`.
    Sellmeier(SellmeierMaterial),
}

impl DispersionModel {
    pub fn wavenumber(&self, omega: f64) -> Result<f64> {
        match self {
            DispersionModel::Taylor(t) => Ok(t.wavenumber(omega)),
            DispersionModel::Tabulated(t) => t.wavenumber(omega),
            DispersionModel::Sellmeier(m) => {
                if !(omega > 0.0) {
                    return Err(Error::OutOfRange {
                        value: omega,
                        min: 0.0,
                        max: f64::INFINITY,
                    });
                }
                let lambda_um = wavelength_from_omega(omega) * 1e6;
                Ok(omega * m.index(lambda_um)? / SPEED_OF_LIGHT)
            }
        }
    }

    /// Frequency interval on which the model can be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            DispersionModel::Taylor(_) => (f64::NEG_INFINITY, f64::INFINITY),
            DispersionModel::Tabulated(t) => t.domain(),
            DispersionModel::Sellmeier(m) => {
                let [lo, hi] = m.valid_um;
                (
                    crate::numerics::omega_from_wavelength(hi * 1e-6),
                    crate::numerics::omega_from_wavelength(lo * 1e-6),
                )
            }
        }
    }

    /// `dk/dω` (s/m). Exact for Taylor models, central difference with step
    /// `h` otherwise.
    pub fn inverse_group_velocity(&self, omega: f64, h: f64) -> Result<f64> {
        match self {
            DispersionModel::Taylor(t) => Ok(t.inv_v + t.beta2 * (omega - t.omega0)),
            _ => Ok((self.wavenumber(omega + h)? - self.wavenumber(omega - h)?) / (2.0 * h)),
        }
    }

    /// `d²k/dω²` (s²/m). Exact for Taylor models, central difference with
    /// step `h` otherwise.
    pub fn group_velocity_dispersion(&self, omega: f64, h: f64) -> Result<f64> {
        match self {
            DispersionModel::Taylor(t) => Ok(t.beta2),
            _ => {
                let k0 = self.wavenumber(omega)?;
                let kp = self.wavenumber(omega + h)?;
                let km = self.wavenumber(omega - h)?;
                Ok((kp - 2.0 * k0 + km) / (h * h))
            }
        }
    }
}

impl From<TaylorDispersion> for DispersionModel {
    fn from(t: TaylorDispersion) -> Self {
        DispersionModel::Taylor(t)
    }
}

impl From<TabulatedDispersion> for DispersionModel {
    fn from(t: TabulatedDispersion) -> Self {
        DispersionModel::Tabulated(t)
    }
}

impl From<SellmeierMaterial> for DispersionModel {
    fn from(m: SellmeierMaterial) -> Self {
        DispersionModel::Sellmeier(m)
    }
}

/// Free-function form of [`DispersionModel::wavenumber`].
pub fn wavenumber(model: &DispersionModel, omega: f64) -> Result<f64> {
    model.wavenumber(omega)
}

fn sorted3(omega1: f64, omega2: f64, omega3: f64) -> [f64; 3] {
    let mut w = [omega1, omega2, omega3];
    w.sort_by(f64::total_cmp);
    w
}

/// Phase mismatch `k_P(ω₁+ω₂+ω₃) − Σ k_F(ωᵢ)` in 1/m.
///
/// The frequencies are sorted before any arithmetic so the result is
/// bitwise invariant under permutations of the arguments.
pub fn delta_k(
    pump: &DispersionModel,
    triplet: &DispersionModel,
    omega1: f64,
    omega2: f64,
    omega3: f64,
) -> Result<f64> {
    let [a, b, c] = sorted3(omega1, omega2, omega3);
    let kp = pump.wavenumber(a + b + c)?;
    let kf = triplet.wavenumber(a)? + triplet.wavenumber(b)? + triplet.wavenumber(c)?;
    Ok(kp - kf)
}

/// Phase mismatch written as the quadratic form in the detunings
/// `δωᵢ = ωᵢ − ω̄_F` from the triplet expansion point:
///
/// `(k̄_P − 3k̄_F) + (1/v_P − 1/v_F) Σδω + ½β_P (Σδω)² − ½β_F Σδω²`
///
/// when the pump is expanded about `ω̄_P = 3ω̄_F`. A pump expansion point
/// away from `3ω̄_F` is handled by shifting `Σδω` by `3ω̄_F − ω̄_P` in the
/// pump terms.
pub fn delta_k_expanded(
    pump: &TaylorDispersion,
    triplet: &TaylorDispersion,
    omega1: f64,
    omega2: f64,
    omega3: f64,
) -> f64 {
    let [a, b, c] = sorted3(omega1, omega2, omega3);
    let [d1, d2, d3] = [a, b, c].map(|w| w - triplet.omega0);
    let sum = d1 + d2 + d3;
    let sq = d1 * d1 + d2 * d2 + d3 * d3;
    let offset = 3.0 * triplet.omega0 - pump.omega0;
    let shifted = sum + offset;
    (pump.k0 - 3.0 * triplet.k0)
        + pump.inv_v * shifted
        - triplet.inv_v * sum
        + 0.5 * pump.beta2 * shifted * shifted
        - 0.5 * triplet.beta2 * sq
}

/// Phase-matching bandwidth `sqrt(4π / (ℓ |β_F|))` in rad/s.
pub fn pmf_bandwidth(length: f64, beta_f: f64) -> Result<f64> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidLength(length));
    }
    if beta_f == 0.0 {
        return Err(Error::ZeroDispersion);
    }
    Ok((4.0 * std::f64::consts::PI / (length * beta_f.abs())).sqrt())
}

/// Converts a GVD value given in fs²/mm to s²/m.
pub fn fs2_per_mm(value: f64) -> f64 {
    value * 1e-27
}
