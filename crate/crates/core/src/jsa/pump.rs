use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{omega_from_wavelength, HBAR};

/// Gaussian pump pulse described in the spectral domain.
///
/// The envelope `ᾱ_P exp(−(ω − ω̄_P)² / 2σ²)` is normalized so that
/// `∫|α|² dω = N_P`, i.e. `ᾱ_P² σ √π = N_P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    /// Central angular frequency ω̄_P, rad/s.
    pub omega_p: f64,
    /// Amplitude bandwidth σ, rad/s.
    pub sigma: f64,
    /// Mean photon number per pulse.
    pub n_photons: f64,
}

impl PumpSpec {
    pub fn new(omega_p: f64, sigma: f64, n_photons: f64) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) {
            return Err(Error::InvalidParameter(format!("pump frequency {omega_p}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("pump bandwidth {sigma}")));
        }
        if !(n_photons >= 0.0 && n_photons.is_finite()) {
            return Err(Error::InvalidParameter(format!("pump photon number {n_photons}")));
        }
        Ok(Self {
            omega_p,
            sigma,
            n_photons,
        })
    }

    /// Pulse of given energy (J), intensity FWHM duration (s) and vacuum
    /// wavelength (m).
    pub fn from_pulse(energy: f64, duration_fwhm: f64, lambda: f64) -> Result<Self> {
        if !(duration_fwhm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pulse duration {duration_fwhm}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("pump wavelength {lambda}")));
        }
        let omega_p = omega_from_wavelength(lambda);
        Self::new(omega_p, sigma_from_fwhm(duration_fwhm), energy / (HBAR * omega_p))
    }

    /// Peak amplitude ᾱ_P.
    pub fn alpha_bar(&self) -> f64 {
        (self.n_photons / (self.sigma * std::f64::consts::PI.sqrt())).sqrt()
    }

    pub fn envelope(&self, omega_sum: f64) -> C64 {
        let d = omega_sum - self.omega_p;
        C64::new(
            self.alpha_bar() * (-d * d / (2.0 * self.sigma * self.sigma)).exp(),
            0.0,
        )
    }

    /// Same pulse with a different bandwidth.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.omega_p, sigma, self.n_photons)
    }
}

/// `σ = 2√(ln 2) / τ_FWHM`.
pub fn sigma_from_fwhm(duration_fwhm: f64) -> f64 {
    2.0 * std::f64::consts::LN_2.sqrt() / duration_fwhm
}

/// Inverse of [`sigma_from_fwhm`].
pub fn fwhm_from_sigma(sigma: f64) -> f64 {
    2.0 * std::f64::consts::LN_2.sqrt() / sigma
}

/// Pump envelope function evaluated at the sum frequency.
pub fn pump_envelope(p: &PumpSpec, omega_sum: f64) -> C64 {
    p.envelope(omega_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::FrequencyGrid;
    use approx::assert_relative_eq;

    #[test]
    fn peak_and_symmetry() {
        let p = PumpSpec::new(4.1e15, 4.37e13, 2.5e11).unwrap();
        assert_eq!(pump_envelope(&p, p.omega_p).re, p.alpha_bar());
        let up = pump_envelope(&p, p.omega_p + p.sigma).re;
        let down = pump_envelope(&p, p.omega_p - p.sigma).re;
        assert_relative_eq!(up, p.alpha_bar() * (-0.5f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(up, down, max_relative = 1e-14);
    }

    #[test]
    fn photon_number_normalization() {
        let p = PumpSpec::new(3.5e15, 1.7e11, 2.7e11).unwrap();
        let g = FrequencyGrid::centered(p.omega_p, 8.0 * p.sigma, 801).unwrap();
        let power: Vec<f64> = g.omegas().iter().map(|w| p.envelope(*w).norm_sqr()).collect();
        assert_relative_eq!(g.integrate(&power), p.n_photons, max_relative = 1e-6);
        // analytic: ᾱ² σ √π = N_P
        assert_relative_eq!(
            p.alpha_bar().powi(2) * p.sigma * std::f64::consts::PI.sqrt(),
            p.n_photons,
            max_relative = 1e-14
        );
    }

    #[test]
    fn pulse_constructor() {
        // 38 fs FWHM corresponds to σ ≈ 0.438e14 rad/s
        let p = PumpSpec::from_pulse(1e-9, 38e-15, 458.7e-9).unwrap();
        assert_relative_eq!(p.sigma, 4.382e13, max_relative = 1e-3);
        assert_relative_eq!(fwhm_from_sigma(p.sigma), 38e-15, max_relative = 1e-12);
        assert_relative_eq!(p.n_photons * HBAR * p.omega_p, 1e-9, max_relative = 1e-12);
        assert!(PumpSpec::from_pulse(1e-9, 0.0, 458.7e-9).is_err());
        assert!(PumpSpec::new(1e15, -1.0, 1.0).is_err());
    }
}
