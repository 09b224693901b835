use serde::{Deserialize, Serialize};

use super::DispersionModel;
use crate::error::{Error, Result};
use crate::numerics::{omega_from_wavelength, wavelength_from_omega};

const MAX_BISECTIONS: usize = 80;
const MISMATCH_TOL: f64 = 1e-8;
/// Finite-difference step for the group-velocity mismatch report, rad/s.
const GV_STEP: f64 = 1e11;

/// Degenerate operating point where `k_P(3ω) = 3 k_F(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatchPoint {
    /// Triplet wavelength, m.
    pub lambda_f: f64,
    /// Pump wavelength `λ_F / 3`, m.
    pub lambda_p: f64,
    pub omega_f: f64,
    pub omega_p: f64,
    /// `k_P(3ω) − 3k_F(ω)` at the returned root, 1/m.
    pub mismatch: f64,
    /// `1/v_P − 1/v_F` at the root, s/m.
    pub group_velocity_mismatch: f64,
    pub iterations: usize,
}

fn degenerate_mismatch(pump: &DispersionModel, triplet: &DispersionModel, omega: f64) -> Result<f64> {
    Ok(pump.wavenumber(3.0 * omega)? - 3.0 * triplet.wavenumber(omega)?)
}

/// Bisection for the degenerate phase-matching wavelength inside
/// `lambda_f_range` (metres, either order).
pub fn find_degenerate_phase_matching(
    pump: &DispersionModel,
    triplet: &DispersionModel,
    lambda_f_range: (f64, f64),
) -> Result<PhaseMatchPoint> {
    let (l_lo, l_hi) = if lambda_f_range.0 <= lambda_f_range.1 {
        lambda_f_range
    } else {
        (lambda_f_range.1, lambda_f_range.0)
    };
    if !(l_lo > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavelength bracket must be positive, got [{l_lo}, {l_hi}]"
        )));
    }
    // Work in frequency; the bracket ends swap.
    let mut lo = omega_from_wavelength(l_hi);
    let mut hi = omega_from_wavelength(l_lo);
    let mut f_lo = degenerate_mismatch(pump, triplet, lo)?;
    let f_hi = degenerate_mismatch(pump, triplet, hi)?;

    let (omega, value, iterations) = if f_lo == 0.0 {
        (lo, f_lo, 0)
    } else if f_hi == 0.0 {
        (hi, f_hi, 0)
    } else {
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::NoSignChange { lo: l_lo, hi: l_hi });
        }
        let mut best = (lo, f_lo);
        let mut it = 0;
        while it < MAX_BISECTIONS {
            it += 1;
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = degenerate_mismatch(pump, triplet, mid)?;
            if f_mid.abs() < best.1.abs() {
                best = (mid, f_mid);
            }
            if f_mid.abs() < MISMATCH_TOL {
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        (best.0, best.1, it)
    };
    let gvm = pump.inverse_group_velocity(3.0 * omega, GV_STEP)?
        - triplet.inverse_group_velocity(omega, GV_STEP)?;
    Ok(PhaseMatchPoint {
        lambda_f: wavelength_from_omega(omega),
        lambda_p: wavelength_from_omega(3.0 * omega),
        omega_f: omega,
        omega_p: 3.0 * omega,
        mismatch: value,
        group_velocity_mismatch: gvm,
        iterations,
    })
}
