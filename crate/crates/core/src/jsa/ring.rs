use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Jsa, PumpSpec};
use crate::error::{Error, Result};
use crate::numerics::{FrequencyGrid, Tensor3C, HBAR};

/// Half-width of the default ring window in triplet linewidths.
pub const RING_WINDOW_LINEWIDTHS: f64 = 8.0;

/// One resonance of a ring: centre, loaded Q and input coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingResonance {
    /// Resonance frequency ω_J, rad/s.
    pub omega_res: f64,
    /// Loaded quality factor.
    pub q_loaded: f64,
    /// Bus-to-ring coupling γ_J (real, non-negative).
    pub coupling: f64,
}

/// Sign of the `±iΓ̄` term in the field enhancement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl RingResonance {
    pub fn new(omega_res: f64, q_loaded: f64, coupling: f64) -> Result<Self> {
        if !(omega_res > 0.0 && omega_res.is_finite()) {
            return Err(Error::InvalidParameter(format!("resonance {omega_res}")));
        }
        if !(q_loaded > 0.0 && q_loaded.is_finite()) {
            return Err(Error::InvalidParameter(format!("quality factor {q_loaded}")));
        }
        if !(coupling >= 0.0 && coupling.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling {coupling}")));
        }
        Ok(Self {
            omega_res,
            q_loaded,
            coupling,
        })
    }

    /// Critical coupling: half the loaded linewidth goes to the bus, so
    /// `|γ|² = Γ̄`.
    pub fn critically_coupled(omega_res: f64, q_loaded: f64) -> Result<Self> {
        let r = Self::new(omega_res, q_loaded, 0.0)?;
        Ok(Self {
            coupling: r.linewidth().sqrt(),
            ..r
        })
    }

    /// Resonance with a prescribed half-width Γ̄ instead of a Q.
    pub fn from_linewidth(omega_res: f64, linewidth: f64, coupling: f64) -> Result<Self> {
        if !(linewidth > 0.0) {
            return Err(Error::InvalidParameter(format!("linewidth {linewidth}")));
        }
        Self::new(omega_res, omega_res / (2.0 * linewidth), coupling)
    }

    /// Half-width at half-maximum of `|F|²`, `Γ̄ = ω_J / 2Q`.
    pub fn linewidth(&self) -> f64 {
        self.omega_res / (2.0 * self.q_loaded)
    }
}

/// `F_{J±}(ω) = (1/√𝓛) γ* / ((ω_J − ω) ± iΓ̄)`.
pub fn field_enhancement(res: &RingResonance, circumference: f64, branch: Branch, omega: f64) -> C64 {
    let gamma = res.linewidth();
    let im = match branch {
        Branch::Plus => gamma,
        Branch::Minus => -gamma,
    };
    C64::new(res.coupling / circumference.sqrt(), 0.0) / C64::new(res.omega_res - omega, im)
}

/// Microring pumped at one resonance, generating into the resonance at a
/// third of its frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingSource {
    pub pump_resonance: RingResonance,
    pub triplet_resonance: RingResonance,
    /// Ring circumference 𝓛, m.
    pub circumference: f64,
    /// Nonlinear coupling |γ|, 1/(W m).
    pub gamma: f64,
    #[serde(default)]
    pub gamma_phase: f64,
    pub pump: PumpSpec,
}

impl RingSource {
    fn validate(&self) -> Result<()> {
        if !(self.circumference > 0.0 && self.circumference.is_finite()) {
            return Err(Error::InvalidLength(self.circumference));
        }
        if !self.gamma.is_finite() || !self.gamma_phase.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma {}", self.gamma)));
        }
        Ok(())
    }

    fn omega_f(&self) -> f64 {
        self.pump.omega_p / 3.0
    }

    fn prefactor(&self) -> C64 {
        C64::from_polar(
            HBAR * self.omega_f() / std::f64::consts::PI * self.gamma * self.circumference,
            self.gamma_phase,
        )
    }

    /// `ω̄_P/3 ± 8Γ̄_F`.
    pub fn default_grid(&self, n_points: usize) -> Result<FrequencyGrid> {
        self.grid_with_window(RING_WINDOW_LINEWIDTHS, n_points)
    }

    /// `ω̄_P/3 ± widths·Γ̄_F`.
    pub fn grid_with_window(&self, widths: f64, n_points: usize) -> Result<FrequencyGrid> {
        FrequencyGrid::centered(
            self.omega_f(),
            widths * self.triplet_resonance.linewidth(),
            n_points,
        )
    }
}

/// `f = (ħω̄_F/π) γ 𝓛 F*_{F+}(ω₁)F*_{F+}(ω₂)F*_{F+}(ω₃) F*_{P−}(Σω) α(Σω)`.
pub fn ring_kernel(src: &RingSource, omega1: f64, omega2: f64, omega3: f64) -> Result<C64> {
    src.validate()?;
    let l = src.circumference;
    let ff = |w| field_enhancement(&src.triplet_resonance, l, Branch::Plus, w).conj();
    let s = omega1 + omega2 + omega3;
    let fp = field_enhancement(&src.pump_resonance, l, Branch::Minus, s).conj();
    Ok(src.prefactor() * ff(omega1) * ff(omega2) * ff(omega3) * fp * src.pump.envelope(s))
}

pub fn build_ring_jsa(src: &RingSource, grid: &FrequencyGrid) -> Result<Jsa> {
    src.validate()?;
    let l = src.circumference;
    let n = grid.len();
    let ff: Vec<C64> = grid
        .omegas()
        .iter()
        .map(|w| field_enhancement(&src.triplet_resonance, l, Branch::Plus, *w).conj())
        .collect();
    let pre = src.prefactor();
    let pump_terms: Vec<C64> = (0..3 * n - 2)
        .map(|s| {
            let sum = grid.sum_omega(s);
            pre * field_enhancement(&src.pump_resonance, l, Branch::Minus, sum).conj()
                * src.pump.envelope(sum)
        })
        .collect();
    let kernel = Tensor3C::from_symmetric_fn(*grid, |i, j, k| {
        pump_terms[i + j + k] * (ff[i] * ff[j] * ff[k])
    });
    Jsa::from_kernel(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{l2_norm3, omega_from_wavelength};
    use approx::assert_relative_eq;

    fn source(q_p: f64, q_f: f64, sigma: f64) -> RingSource {
        let omega_p = omega_from_wavelength(532e-9);
        RingSource {
            pump_resonance: RingResonance::critically_coupled(omega_p, q_p).unwrap(),
            triplet_resonance: RingResonance::critically_coupled(omega_p / 3.0, q_f).unwrap(),
            circumference: 2.0 * std::f64::consts::PI * 100e-6,
            gamma: 1.0,
            gamma_phase: 0.0,
            pump: PumpSpec::new(omega_p, sigma, 1e8).unwrap(),
        }
    }

    #[test]
    fn lorentzian_shape() {
        let l = 1e-3;
        let res = RingResonance::new(1.2e15, 1e6, 3.0e4).unwrap();
        let g = res.linewidth();
        let peak = field_enhancement(&res, l, Branch::Plus, res.omega_res).norm_sqr();
        assert_relative_eq!(peak, res.coupling.powi(2) / (l * g * g), max_relative = 1e-14);
        let half = field_enhancement(&res, l, Branch::Minus, res.omega_res + g).norm_sqr();
        assert_relative_eq!(half, 0.5 * peak, max_relative = 1e-12);
        let grid = FrequencyGrid::centered(res.omega_res, 200.0 * g, 20001).unwrap();
        let vals: Vec<f64> = grid
            .omegas()
            .iter()
            .map(|w| field_enhancement(&res, l, Branch::Plus, *w).norm_sqr())
            .collect();
        let expect = std::f64::consts::PI * res.coupling.powi(2) / (l * g);
        // the ±200Γ̄ window misses a tail fraction of 2/(200π)
        let tail = 1.0 - (200f64).atan() * 2.0 / std::f64::consts::PI;
        assert_relative_eq!(grid.integrate(&vals), expect * (1.0 - tail), max_relative = 1e-4);
        assert!((grid.integrate(&vals) - expect).abs() / expect < 4e-3);
    }

    #[test]
    fn branches_are_conjugate_mirrors() {
        let res = RingResonance::from_linewidth(2e15, 1e9, 1.0).unwrap();
        assert_relative_eq!(res.linewidth(), 1e9, max_relative = 1e-15);
        let p = field_enhancement(&res, 1.0, Branch::Plus, 2e15 + 3e8);
        let m = field_enhancement(&res, 1.0, Branch::Minus, 2e15 + 3e8);
        assert_eq!(p, m.conj());
    }

    #[test]
    fn epsilon_matches_brute_force_sum() {
        let src = source(1e5, 1e7, 1e11);
        let grid = src.default_grid(15).unwrap();
        let j = build_ring_jsa(&src, &grid).unwrap();
        let om = grid.omegas();
        let w = grid.weights();
        let mut total = 0.0;
        for a in 0..15 {
            for b in 0..15 {
                for c in 0..15 {
                    total += w[a] * w[b] * w[c] * ring_kernel(&src, om[a], om[b], om[c]).unwrap().norm_sqr();
                }
            }
        }
        assert_relative_eq!(j.epsilon_sq(), total / 6.0, max_relative = 1e-10);
    }

    #[test]
    fn broad_pump_and_cavity_factorize() {
        // Pump envelope and pump resonance both flat across the window:
        // ψ reduces to a product of three identical Lorentzian amplitudes.
        let mut src = source(1e7, 1e7, 1.0);
        src.pump_resonance.q_loaded = 1e-7;
        let gamma_f = src.triplet_resonance.linewidth();
        src.pump = src.pump.with_sigma(1e13 * gamma_f).unwrap();
        let grid = src.default_grid(21).unwrap();
        let j = build_ring_jsa(&src, &grid).unwrap();
        let single: Vec<C64> = grid
            .omegas()
            .iter()
            .map(|w| field_enhancement(&src.triplet_resonance, src.circumference, Branch::Plus, *w).conj())
            .collect();
        let product = Tensor3C::from_fn(grid, |a, b, c| single[a] * single[b] * single[c]);
        let norm = l2_norm3(&product);
        // align the global phase on the centre point
        let phase = j.psi().get(10, 10, 10) / product.get(10, 10, 10);
        let phase = phase / phase.norm();
        let mut worst = 0.0f64;
        for (x, y) in j.psi().values().iter().zip(product.values()) {
            worst = worst.max((x - phase * y / norm).norm());
        }
        let peak = j.psi().values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
        assert!(worst / peak < 1e-12, "{}", worst / peak);
    }

    #[test]
    fn epsilon_converges_with_grid() {
        let src = source(1e5, 1e7, 1.6e11);
        let a = build_ring_jsa(&src, &src.default_grid(101).unwrap()).unwrap();
        let b = build_ring_jsa(&src, &src.default_grid(161).unwrap()).unwrap();
        assert!(((a.epsilon() - b.epsilon()) / b.epsilon()).abs() < 1e-3);
    }

    #[test]
    fn default_window_spans_sixteen_linewidths() {
        let src = source(1e5, 1e7, 1e11);
        let g = src.default_grid(161).unwrap();
        assert_relative_eq!(g.width(), 16.0 * src.triplet_resonance.linewidth(), max_relative = 1e-9);
        assert_relative_eq!(0.5 * (g.omega_min() + g.omega_max()), src.pump.omega_p / 3.0, max_relative = 1e-15);
    }
}
