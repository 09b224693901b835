//! Normalized triphoton joint spectral amplitudes.
//!
//! Builders evaluate an unnormalized kernel `f(ω₁,ω₂,ω₃)` on the grid cube,
//! obtain the per-pulse triplet probability `|ε|² = ⅙∫|f|²`, and store
//! `ψ = i f / (ε√6)` so that `∫|ψ|² = 1`. The convention keeps ε real and
//! non-negative.

mod pump;
mod ring;
mod waveguide;

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{csv_float, l2_norm3, FrequencyGrid, Tensor3C};

pub use pump::{fwhm_from_sigma, pump_envelope, sigma_from_fwhm, PumpSpec};
pub use ring::{
    build_ring_jsa, field_enhancement, ring_kernel, Branch, RingResonance, RingSource,
    RING_WINDOW_LINEWIDTHS,
};
pub use waveguide::{
    build_waveguide_jsa, pmf_sinc, waveguide_kernel, WaveguideSource, WAVEGUIDE_WINDOW_WIDTHS,
};

/// Default grid sizes per axis.
pub const DEFAULT_WAVEGUIDE_POINTS: usize = 101;
pub const DEFAULT_RING_POINTS: usize = 161;

/// Tolerance on `∫|ψ|² = 1` accepted for a constructed amplitude.
const NORM_TOL: f64 = 1e-9;

/// Normalized joint spectral amplitude together with the triplet amplitude ε.
#[derive(Debug, Clone, PartialEq)]
pub struct Jsa {
    psi: Tensor3C,
    epsilon: f64,
}

impl Jsa {
    /// Normalizes a raw kernel: `|ε|² = ⅙∫|f|²`, `ψ = i f / (ε√6)`.
    pub fn from_kernel(kernel: Tensor3C) -> Result<Self> {
        let norm = l2_norm3(&kernel);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroKernel);
        }
        let epsilon = norm / 6f64.sqrt();
        let psi = kernel.scaled(C64::new(0.0, 1.0 / norm));
        Ok(Self { psi, epsilon })
    }

    /// Wraps an already normalized amplitude.
    pub fn from_normalized(psi: Tensor3C, epsilon: f64) -> Result<Self> {
        let norm = l2_norm3(&psi);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm * norm));
        }
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon}")));
        }
        Ok(Self { psi, epsilon })
    }

    /// Normalizes an arbitrary symmetric amplitude, keeping its phase.
    pub fn normalize(psi: Tensor3C, epsilon: f64) -> Result<Self> {
        let norm = l2_norm3(&psi);
        if !(norm > 0.0) {
            return Err(Error::ZeroKernel);
        }
        Self::from_normalized(psi.scaled(C64::new(1.0 / norm, 0.0)), epsilon)
    }

    pub fn psi(&self) -> &Tensor3C {
        &self.psi
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.psi.grid()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Triplet probability per pump pulse.
    pub fn epsilon_sq(&self) -> f64 {
        self.epsilon * self.epsilon
    }

    /// `|ψ|²` on the plane `ω₃ = grid[k]`, as `omega1,omega2,value` CSV.
    pub fn slice_abs2_csv(&self, k: usize) -> String {
        let g = self.grid();
        let om = g.omegas();
        let mut out = String::from("omega1,omega2,value\n");
        for i in 0..g.len() {
            for j in 0..g.len() {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    csv_float(om[i]),
                    csv_float(om[j]),
                    csv_float(self.psi.get(i, j, k).norm_sqr())
                );
            }
        }
        out
    }
}

fn window_mask(grid: &FrequencyGrid, window: (f64, f64)) -> Vec<bool> {
    let (lo, hi) = if window.0 <= window.1 {
        window
    } else {
        (window.1, window.0)
    };
    grid.omegas().iter().map(|w| *w >= lo && *w <= hi).collect()
}

/// `∫_window |ψ|²`: the fraction of the state kept by a box filter acting on
/// all three photons.
pub fn retained_power(j: &Jsa, window: (f64, f64)) -> f64 {
    let grid = j.grid();
    let mask = window_mask(grid, window);
    let w = grid.weights();
    let n = grid.len();
    let mut total = 0.0;
    for a in (0..n).filter(|&a| mask[a]) {
        for b in (0..n).filter(|&b| mask[b]) {
            let base = j.psi.index(a, b, 0);
            let row = &j.psi.values()[base..base + n];
            let partial: f64 = (0..n)
                .filter(|&c| mask[c])
                .map(|c| w[c] * row[c].norm_sqr())
                .sum();
            total += w[a] * w[b] * partial;
        }
    }
    total
}

/// Box filter on all three photons: zero ψ outside `[ω_lo, ω_hi]`,
/// renormalize, and scale ε by the square root of the retained power.
pub fn apply_filter(j: &Jsa, window: (f64, f64)) -> Result<Jsa> {
    let grid = *j.grid();
    let mask = window_mask(&grid, window);
    if mask.iter().all(|m| *m) {
        return Ok(j.clone());
    }
    let power = retained_power(j, window);
    if !(power >= 1e-12) {
        return Err(Error::EmptyFilter(power));
    }
    let n = grid.len();
    let scale = 1.0 / power.sqrt();
    let mut psi = j.psi.clone();
    let values = psi.values_mut();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let idx = (a * n + b) * n + c;
                values[idx] = if mask[a] && mask[b] && mask[c] {
                    values[idx] * scale
                } else {
                    C64::new(0.0, 0.0)
                };
            }
        }
    }
    Ok(Jsa {
        psi,
        epsilon: j.epsilon * power.sqrt(),
    })
}

/// Two-photon marginal `s(ω₁,ω₂) = ∫dω₃ |ψ(ω₁,ω₂,ω₃)|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub grid: FrequencyGrid,
    /// Row-major `n × n`.
    pub values: Vec<f64>,
}

impl Projection {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.len() + j]
    }

    /// `∫∫ s dω₁dω₂`.
    pub fn total(&self) -> f64 {
        let w = self.grid.weights();
        let n = w.len();
        (0..n)
            .map(|i| (0..n).map(|j| w[i] * w[j] * self.get(i, j)).sum::<f64>())
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let om = self.grid.omegas();
        let n = om.len();
        let mut out = String::from("omega1,omega2,value\n");
        for i in 0..n {
            for j in 0..n {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    csv_float(om[i]),
                    csv_float(om[j]),
                    csv_float(self.get(i, j))
                );
            }
        }
        out
    }
}

pub fn project_s(j: &Jsa) -> Projection {
    let grid = *j.grid();
    let w = grid.weights();
    let n = grid.len();
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            let base = j.psi.index(a, b, 0);
            values[a * n + b] = j.psi.values()[base..base + n]
                .iter()
                .zip(&w)
                .map(|(v, wk)| wk * v.norm_sqr())
                .sum();
        }
    }
    Projection { grid, values }
}
