//! Single-photon reduced density matrix and the spectral separability
//! measures derived from it.
//!
//! On a grid with trapezoid weights `w`, the operator `ρ(ω,ω')` acts as the
//! matrix `D^{1/2} ρ D^{1/2}` (D = diag w) on coefficient vectors, which is
//! what gets diagonalized. Modes are mapped back to functions by dividing by
//! `√w` so they are orthonormal under the quadrature.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsa::Jsa;
use crate::numerics::{hermitian_eig, FrequencyGrid, HermitianMatrix};

/// Eigenvalues above this (negative) floor are clipped to zero; anything
/// more negative means the input was not a density matrix.
pub const NEGATIVE_EIGENVALUE_FLOOR: f64 = -1e-10;
/// Fractions summing this close to one are renormalized silently.
pub const TRACE_TOLERANCE: f64 = 1e-6;
/// Modes with a larger weight count towards [`SeparabilityReport::mode_count`].
pub const SIGNIFICANT_MODE: f64 = 1e-3;

/// `ρ_ab = Σ_jk w_j w_k ψ_ajk ψ*_bjk`; exactly Hermitian by construction.
pub fn reduced_density_matrix(j: &Jsa) -> HermitianMatrix {
    let psi = j.psi();
    let grid = j.grid();
    let n = grid.len();
    let w = grid.weights();
    let pair_weights: Vec<f64> = (0..n * n).map(|jk| w[jk / n] * w[jk % n]).collect();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let sa = psi.slab(a);
            (a..n)
                .map(|b| {
                    let sb = psi.slab(b);
                    sa.iter()
                        .zip(sb)
                        .zip(&pair_weights)
                        .map(|((x, y), pw)| x * y.conj() * *pw)
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut values = vec![C64::new(0.0, 0.0); n * n];
    for (a, row) in rows.into_iter().enumerate() {
        for (offset, v) in row.into_iter().enumerate() {
            let b = a + offset;
            if a == b {
                values[a * n + a] = C64::new(v.re, 0.0);
            } else {
                values[a * n + b] = v;
                values[b * n + a] = v.conj();
            }
        }
    }
    HermitianMatrix::from_fn(n, |a, b| values[a * n + b])
}

fn check_dims(rho: &HermitianMatrix, grid: &FrequencyGrid) -> Result<()> {
    if rho.dim() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "density matrix is {0}x{0}, grid has {1} points",
            rho.dim(),
            grid.len()
        )));
    }
    Ok(())
}

/// `Tr ρ² = Σ w_a w_b |ρ_ab|²`.
pub fn purity(rho: &HermitianMatrix, grid: &FrequencyGrid) -> Result<f64> {
    check_dims(rho, grid)?;
    let w = grid.weights();
    let n = grid.len();
    Ok((0..n)
        .map(|a| (0..n).map(|b| w[a] * w[b] * rho.get(a, b).norm_sqr()).sum::<f64>())
        .sum())
}

/// `∫ρ(ω,ω)dω`.
pub fn trace(rho: &HermitianMatrix, grid: &FrequencyGrid) -> Result<f64> {
    check_dims(rho, grid)?;
    Ok(grid.weights().iter().enumerate().map(|(a, w)| w * rho.get(a, a).re).sum())
}

/// Effective Schmidt number `κ = 1 / Tr ρ²`.
pub fn kappa(rho: &HermitianMatrix, grid: &FrequencyGrid) -> Result<f64> {
    let p = purity(rho, grid)?;
    if !(p > 0.0) {
        return Err(Error::InvalidDensity(format!("purity {p}")));
    }
    Ok(1.0 / p)
}

/// `κ = 1 / Σ r_n²`.
pub fn kappa_from_fractions(fractions: &[f64]) -> f64 {
    1.0 / fractions.iter().map(|r| r * r).sum::<f64>()
}

/// Generalized concurrence `C = 2√(1 − 1/κ)`.
pub fn concurrence(kappa: f64) -> f64 {
    2.0 * (1.0 - 1.0 / kappa).max(0.0).sqrt()
}

/// Eigen-decomposition of ρ into mode weights `r_n` (descending, summing
/// to one) and quadrature-orthonormal modes `f_n(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    pub grid: FrequencyGrid,
    pub fractions: Vec<f64>,
    pub modes: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    /// Single-photon spectrum `Σ r_n |f_n(ω)|²`, the diagonal of ρ.
    pub fn coherence_diagonal(&self) -> Vec<f64> {
        let n = self.grid.len();
        (0..n)
            .map(|a| {
                self.fractions
                    .iter()
                    .zip(&self.modes)
                    .map(|(r, f)| r * f[a].norm_sqr())
                    .sum()
            })
            .collect()
    }

    pub fn mode_count(&self) -> usize {
        self.fractions.iter().filter(|r| **r > SIGNIFICANT_MODE).count()
    }
}

pub fn pseudo_schmidt(rho: &HermitianMatrix, grid: &FrequencyGrid) -> Result<SchmidtDecomposition> {
    check_dims(rho, grid)?;
    let n = grid.len();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let m = HermitianMatrix::from_fn(n, |a, b| rho.get(a, b) * (sw[a] * sw[b]));
    let eig = hermitian_eig(&m)?;
    let mut fractions = Vec::with_capacity(n);
    for &v in &eig.values {
        if v < NEGATIVE_EIGENVALUE_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {v:e}")));
        }
        fractions.push(v.max(0.0));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() >= TRACE_TOLERANCE {
        return Err(Error::NotNormalized(total));
    }
    fractions.iter_mut().for_each(|r| *r /= total);
    let modes = eig
        .vectors
        .iter()
        .map(|v| {
            let mut f: Vec<C64> = v.iter().zip(&sw).map(|(c, s)| c / *s).collect();
            // Largest component real and positive.
            let (idx, _) = f
                .iter()
                .enumerate()
                .fold((0, -1.0), |best, (i, c)| if c.norm() > best.1 { (i, c.norm()) } else { best });
            let norm = f[idx].norm();
            if norm > 0.0 {
                let phase = f[idx].conj() / norm;
                f.iter_mut().for_each(|c| *c *= phase);
            }
            f
        })
        .collect();
    Ok(SchmidtDecomposition {
        grid: *grid,
        fractions,
        modes,
    })
}

/// Everything the pipeline reports about one amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityReport {
    /// From `Tr ρ²` directly.
    pub kappa: f64,
    /// From the eigenvalues; agrees with `kappa` to round-off.
    pub kappa_eigen: f64,
    pub purity: f64,
    pub concurrence: f64,
    pub mode_count: usize,
    pub fractions: Vec<f64>,
    /// Per-mode excess `3|ε|² r_n` of the symplectic eigenvalues.
    pub symplectic_excess: Vec<f64>,
}

pub fn analyze(j: &Jsa) -> Result<(SeparabilityReport, SchmidtDecomposition)> {
    let rho = reduced_density_matrix(j);
    analyze_rho(&rho, j.grid(), j.epsilon_sq())
}

pub fn analyze_rho(
    rho: &HermitianMatrix,
    grid: &FrequencyGrid,
    epsilon_sq: f64,
) -> Result<(SeparabilityReport, SchmidtDecomposition)> {
    let purity = purity(rho, grid)?;
    let kappa = kappa(rho, grid)?;
    let schmidt = pseudo_schmidt(rho, grid)?;
    let report = SeparabilityReport {
        kappa,
        kappa_eigen: kappa_from_fractions(&schmidt.fractions),
        purity,
        concurrence: concurrence(kappa),
        mode_count: schmidt.mode_count(),
        symplectic_excess: schmidt.fractions.iter().map(|r| 3.0 * epsilon_sq * r).collect(),
        fractions: schmidt.fractions.clone(),
    };
    Ok((report, schmidt))
}
