use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Jsa, PumpSpec};
use crate::dispersion::{pmf_bandwidth, DispersionModel};
use crate::error::{Error, Result};
use crate::numerics::{FrequencyGrid, Tensor3C, HBAR};

/// Half-width of the default window in units of `max(σ, σ_PM)`.
pub const WAVEGUIDE_WINDOW_WIDTHS: f64 = 3.5;

/// Step used when a GVD has to be estimated numerically, rad/s.
const GVD_STEP: f64 = 1e12;

/// `sin(x)/x` of `x = ℓΔk/2`.
pub fn pmf_sinc(delta_k: f64, length: f64) -> f64 {
    let x = 0.5 * length * delta_k;
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Straight single-pass waveguide of length ℓ pumped at ω̄_P.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSource {
    pub pump_dispersion: DispersionModel,
    pub triplet_dispersion: DispersionModel,
    /// Interaction length ℓ, m.
    pub length: f64,
    /// Nonlinear coupling |γ|, 1/(W m).
    pub gamma: f64,
    /// Phase of the nonlinear coupling, rad.
    #[serde(default)]
    pub gamma_phase: f64,
    pub pump: PumpSpec,
}

impl WaveguideSource {
    /// Degenerate triplet frequency `ω̄_F = ω̄_P / 3`.
    pub fn omega_f(&self) -> f64 {
        self.pump.omega_p / 3.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidLength(self.length));
        }
        if !self.gamma.is_finite() || !self.gamma_phase.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma {}", self.gamma)));
        }
        Ok(())
    }

    fn prefactor(&self) -> C64 {
        C64::from_polar(HBAR * self.omega_f() / std::f64::consts::PI * self.gamma * self.length, self.gamma_phase)
    }

    /// Phase-matching bandwidth σ_PM from the triplet GVD at ω̄_F.
    pub fn pmf_bandwidth(&self) -> Result<f64> {
        let beta_f = self
            .triplet_dispersion
            .group_velocity_dispersion(self.omega_f(), GVD_STEP)?;
        pmf_bandwidth(self.length, beta_f)
    }

    /// `ω̄_F ± 3.5 max(σ, σ_PM)`. Without triplet GVD the pump bandwidth alone
    /// sets the window.
    pub fn default_grid(&self, n_points: usize) -> Result<FrequencyGrid> {
        let sigma_pm = match self.pmf_bandwidth() {
            Ok(s) => s,
            Err(Error::ZeroDispersion) => 0.0,
            Err(e) => return Err(e),
        };
        let half = WAVEGUIDE_WINDOW_WIDTHS * self.pump.sigma.max(sigma_pm);
        FrequencyGrid::centered(self.omega_f(), half, n_points)
    }
}

/// Unnormalized kernel `f = (ħω̄_F/π) γ ℓ α(Σω) sinc(ℓΔk/2)` at one point.
pub fn waveguide_kernel(src: &WaveguideSource, omega1: f64, omega2: f64, omega3: f64) -> Result<C64> {
    src.validate()?;
    let dk = crate::dispersion::delta_k(
        &src.pump_dispersion,
        &src.triplet_dispersion,
        omega1,
        omega2,
        omega3,
    )?;
    let s = omega1 + omega2 + omega3;
    Ok(src.prefactor() * src.pump.envelope(s) * pmf_sinc(dk, src.length))
}

pub fn build_waveguide_jsa(src: &WaveguideSource, grid: &FrequencyGrid) -> Result<Jsa> {
    src.validate()?;
    let n = grid.len();
    let kf = grid
        .omegas()
        .iter()
        .map(|w| src.triplet_dispersion.wavenumber(*w))
        .collect::<Result<Vec<_>>>()?;
    // Everything that depends on ω₁+ω₂+ω₃ only needs the 3n−2 distinct sums.
    let pump_terms = (0..3 * n - 2)
        .map(|s| {
            let sum = grid.sum_omega(s);
            Ok((src.pump_dispersion.wavenumber(sum)?, src.pump.envelope(sum)))
        })
        .collect::<Result<Vec<_>>>()?;
    let pre = src.prefactor();
    let kernel = Tensor3C::from_symmetric_fn(*grid, |i, j, k| {
        let (kp, alpha) = pump_terms[i + j + k];
        let dk = kp - (kf[i] + kf[j] + kf[k]);
        pre * alpha * pmf_sinc(dk, src.length)
    });
    Jsa::from_kernel(kernel)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dispersion::{fs2_per_mm, TaylorDispersion};
    use crate::numerics::{l2_norm3, omega_from_wavelength};
    use approx::assert_relative_eq;

    /// Matched phase and group velocity, no pump GVD.
    pub(crate) fn ideal_source(sigma_ratio: f64) -> WaveguideSource {
        let omega_f = omega_from_wavelength(1376.2e-9);
        let (length, beta_f) = (0.3, fs2_per_mm(21.9));
        let triplet = TaylorDispersion {
            omega0: omega_f,
            k0: 6.6e6,
            inv_v: 4.9e-9,
            beta2: beta_f,
        };
        let pump = TaylorDispersion {
            omega0: 3.0 * omega_f,
            k0: 3.0 * 6.6e6,
            inv_v: 4.9e-9,
            beta2: 0.0,
        };
        let sigma_pm = pmf_bandwidth(length, beta_f).unwrap();
        WaveguideSource {
            pump_dispersion: pump.into(),
            triplet_dispersion: triplet.into(),
            length,
            gamma: 0.5,
            gamma_phase: 0.0,
            pump: PumpSpec::new(3.0 * omega_f, sigma_ratio * sigma_pm, 1e8).unwrap(),
        }
    }

    #[test]
    fn sinc_limits() {
        assert_eq!(pmf_sinc(0.0, 0.3), 1.0);
        assert_relative_eq!(pmf_sinc(2.0 * std::f64::consts::PI / 0.3, 0.3), 0.0, epsilon = 1e-15);
        assert_relative_eq!(pmf_sinc(1.0, 2.0), 1f64.sin(), max_relative = 1e-15);
    }

    #[test]
    fn ideal_kernel_depends_on_detuning_radius_only() {
        let src = ideal_source(1.0);
        let grid = src.default_grid(31).unwrap();
        let j = build_waveguide_jsa(&src, &grid).unwrap();
        let om = grid.omegas();
        let wf = src.omega_f();
        let beta_f = fs2_per_mm(21.9);
        let scale = j.epsilon() * 6f64.sqrt();
        for (a, b, c) in [(15, 15, 15), (3, 20, 9), (0, 30, 30), (7, 7, 22)] {
            let d = [om[a] - wf, om[b] - wf, om[c] - wf];
            let sum: f64 = d.iter().sum();
            let r2: f64 = d.iter().map(|x| x * x).sum();
            let alpha = src.pump.envelope(3.0 * wf + sum).re;
            // ℓΔk/2 = −(ℓβ_F/4) Σδω²
            let x = 0.3 * beta_f * r2 / 4.0;
            let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
            let expect = src.prefactor().re * alpha * sinc / scale;
            let got = j.psi().get(a, b, c);
            assert_relative_eq!(got.im, expect, max_relative = 1e-6);
            assert_eq!(got.re, 0.0);
        }
    }

    #[test]
    fn epsilon_matches_brute_force_sum() {
        let src = ideal_source(1.3);
        let grid = src.default_grid(17).unwrap();
        let j = build_waveguide_jsa(&src, &grid).unwrap();
        let om = grid.omegas();
        let w = grid.weights();
        let mut total = 0.0;
        for a in 0..17 {
            for b in 0..17 {
                for c in 0..17 {
                    let f = waveguide_kernel(&src, om[a], om[b], om[c]).unwrap();
                    total += w[a] * w[b] * w[c] * f.norm_sqr();
                }
            }
        }
        assert_relative_eq!(j.epsilon_sq(), total / 6.0, max_relative = 1e-10);
    }

    #[test]
    fn epsilon_is_linear_in_coupling() {
        let mut src = ideal_source(1.0);
        let grid = src.default_grid(21).unwrap();
        let e1 = build_waveguide_jsa(&src, &grid).unwrap();
        src.gamma *= 2.0;
        src.gamma_phase = 0.7;
        let e2 = build_waveguide_jsa(&src, &grid).unwrap();
        assert_relative_eq!(e2.epsilon(), 2.0 * e1.epsilon(), max_relative = 1e-13);
        assert_relative_eq!(l2_norm3(e2.psi()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn epsilon_converges_with_grid() {
        let src = ideal_source(1.0);
        let a = build_waveguide_jsa(&src, &src.default_grid(101).unwrap()).unwrap();
        let b = build_waveguide_jsa(&src, &src.default_grid(161).unwrap()).unwrap();
        assert!(((a.epsilon() - b.epsilon()) / b.epsilon()).abs() < 1e-3);
    }

    #[test]
    fn default_window_tracks_wider_bandwidth() {
        let narrow = ideal_source(0.5);
        let wide = ideal_source(3.0);
        let sigma_pm = narrow.pmf_bandwidth().unwrap();
        assert_relative_eq!(narrow.default_grid(11).unwrap().width(), 7.0 * sigma_pm, max_relative = 1e-12);
        assert_relative_eq!(wide.default_grid(11).unwrap().width(), 21.0 * sigma_pm, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_length() {
        let mut src = ideal_source(1.0);
        src.length = 0.0;
        let grid = FrequencyGrid::centered(src.omega_f(), 1e13, 5).unwrap();
        assert!(matches!(build_waveguide_jsa(&src, &grid), Err(Error::InvalidLength(_))));
    }
}
