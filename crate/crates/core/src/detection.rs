//! Homodyne detection of a triplet: local-oscillator overlap, its
//! maximization, the resulting quadrature statistics, and coincidences
//! behind a three-port splitter.
//!
//! The optimizer works with `h = √w g`, the LO in quadrature-orthonormal
//! coordinates, so the constraint `∫|g|² = 1` becomes `‖h‖ = 1` and the
//! problem is a plain maximization on the complex unit sphere.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsa::Jsa;
use crate::numerics::{csv_float, FrequencyGrid};

/// Local-oscillator mode `g(ω)`, normalized so that `∫|g|² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalOscillator {
    grid: FrequencyGrid,
    amplitude: Vec<C64>,
}

impl LocalOscillator {
    /// Normalizes `amplitude` on `grid`.
    pub fn new(grid: FrequencyGrid, amplitude: Vec<C64>) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "LO has {} samples, grid has {}",
                amplitude.len(),
                grid.len()
            )));
        }
        let norm = grid
            .integrate(&amplitude.iter().map(|c| c.norm_sqr()).collect::<Vec<_>>())
            .sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("local oscillator has zero norm".into()));
        }
        Ok(Self {
            grid,
            amplitude: amplitude.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// Random start: real and imaginary parts uniform in `[−1, 1]`.
    pub fn random_uniform(grid: FrequencyGrid, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amp = (0..grid.len())
            .map(|_| C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
            .collect();
        Self::new(grid, amp)
    }

    fn from_h(grid: FrequencyGrid, h: &[C64]) -> Self {
        let amplitude = h
            .iter()
            .zip(grid.weights())
            .map(|(c, w)| c / w.sqrt())
            .collect();
        Self { grid, amplitude }
    }

    fn to_h(&self) -> Vec<C64> {
        self.amplitude
            .iter()
            .zip(self.grid.weights())
            .map(|(c, w)| c * w.sqrt())
            .collect()
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[C64] {
        &self.amplitude
    }

    /// `omega,re_g,im_g`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,re_g,im_g\n");
        for (w, g) in self.grid.omegas().iter().zip(&self.amplitude) {
            let _ = writeln!(out, "{},{},{}", csv_float(*w), csv_float(g.re), csv_float(g.im));
        }
        out
    }
}

/// ψ with the quadrature weights folded in: `Ψ̃_ijk = ψ_ijk √(w_i w_j w_k)`.
struct WeightedPsi {
    n: usize,
    values: Vec<C64>,
}

impl WeightedPsi {
    fn new(j: &Jsa) -> Self {
        let grid = j.grid();
        let n = grid.len();
        let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
        let values = j
            .psi()
            .values()
            .iter()
            .enumerate()
            .map(|(idx, v)| v * (sw[idx / (n * n)] * sw[(idx / n) % n] * sw[idx % n]))
            .collect();
        Self { n, values }
    }

    /// `c̃_i = Σ_jk Ψ̃_ijk h*_j h*_k`.
    fn contract_two(&self, h: &[C64]) -> Vec<C64> {
        let n = self.n;
        let hc: Vec<C64> = h.iter().map(|c| c.conj()).collect();
        let pair: Vec<C64> = (0..n * n).map(|jk| hc[jk / n] * hc[jk % n]).collect();
        (0..n)
            .into_par_iter()
            .map(|i| {
                self.values[i * n * n..(i + 1) * n * n]
                    .iter()
                    .zip(&pair)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn eta_and_contraction(&self, h: &[C64]) -> (C64, Vec<C64>) {
        let c = self.contract_two(h);
        let eta = c.iter().zip(h).map(|(ci, hi)| ci * hi.conj()).sum();
        (eta, c)
    }
}

fn check_grids(j: &Jsa, lo: &LocalOscillator) -> Result<()> {
    if j.grid() != lo.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `η = ∫ψ(ω₁,ω₂,ω₃) g*(ω₁) g*(ω₂) g*(ω₃)`.
pub fn overlap_eta(j: &Jsa, lo: &LocalOscillator) -> Result<C64> {
    check_grids(j, lo)?;
    Ok(WeightedPsi::new(j).eta_and_contraction(&lo.to_h()).0)
}

/// Gradient of `|η|` with respect to `h = √w g`, packed as
/// `∂/∂Re h + i ∂/∂Im h`: `G = 3 c̃ η* / |η|`. Returns `(η, G)`.
pub fn eta_gradient(j: &Jsa, lo: &LocalOscillator) -> Result<(C64, Vec<C64>)> {
    check_grids(j, lo)?;
    let (eta, c) = WeightedPsi::new(j).eta_and_contraction(&lo.to_h());
    Ok((eta, gradient_from(eta, &c)))
}

fn gradient_from(eta: C64, c: &[C64]) -> Vec<C64> {
    let abs = eta.norm();
    if abs == 0.0 {
        return vec![C64::new(0.0, 0.0); c.len()];
    }
    let f = 3.0 * eta.conj() / abs;
    c.iter().map(|ci| ci * f).collect()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalized(mut v: Vec<C64>) -> Vec<C64> {
    let n = norm(&v);
    v.iter_mut().for_each(|c| *c /= n);
    v
}

/// Removes the radial component: `G − Re⟨h,G⟩ h`.
fn tangent(h: &[C64], g: &[C64]) -> Vec<C64> {
    let radial: f64 = h.iter().zip(g).map(|(a, b)| (a.conj() * b).re).sum();
    g.iter().zip(h).map(|(gi, hi)| gi - hi * radial).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdOptions {
    /// Stop once the tangent gradient norm drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GdOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinHoppingOptions {
    pub n_hops: usize,
    /// Euclidean norm of each random kick in `h` coordinates.
    pub perturb_scale: f64,
    pub seed: u64,
    pub gd: GdOptions,
}

impl Default for BasinHoppingOptions {
    fn default() -> Self {
        Self {
            n_hops: 20,
            perturb_scale: 0.1,
            seed: 0,
            gd: GdOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub eta_abs: f64,
    pub eta_phase: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    /// Accepted basin-hopping moves (zero for plain gradient ascent).
    pub accepted_hops: usize,
    pub lo: LocalOscillator,
}

struct Ascent {
    h: Vec<C64>,
    eta: C64,
    iterations: usize,
    converged: bool,
    gradient_norm: f64,
}

fn ascend(psi: &WeightedPsi, h0: Vec<C64>, opts: &GdOptions) -> Ascent {
    let mut h = normalized(h0);
    let (mut eta, mut c) = psi.eta_and_contraction(&h);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    let mut grad = tangent(&h, &gradient_from(eta, &c));
    let mut gnorm = norm(&grad);
    while iterations < opts.max_iter {
        if gnorm < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let trial = normalized(h.iter().zip(&grad).map(|(a, b)| a + b * step).collect());
        let (eta_t, c_t) = psi.eta_and_contraction(&trial);
        if eta_t.norm() > eta.norm() {
            h = trial;
            eta = eta_t;
            c = c_t;
            grad = tangent(&h, &gradient_from(eta, &c));
            gnorm = norm(&grad);
            step *= 1.5;
        } else {
            step *= 0.5;
            if step < 1e-14 {
                // No ascent direction left at machine precision.
                converged = gnorm < opts.tol.sqrt();
                break;
            }
        }
    }
    Ascent {
        h,
        eta,
        iterations,
        converged,
        gradient_norm: gnorm,
    }
}

fn report(grid: FrequencyGrid, a: Ascent, iterations: usize, accepted_hops: usize) -> OptimizerReport {
    OptimizerReport {
        eta_abs: a.eta.norm(),
        eta_phase: a.eta.arg(),
        iterations,
        converged: a.converged,
        gradient_norm: a.gradient_norm,
        accepted_hops,
        lo: LocalOscillator::from_h(grid, &a.h),
    }
}

/// Projected gradient ascent of `|η|` on the unit sphere with an adaptive
/// step (grow ×1.5 on success, halve on failure).
pub fn optimize_lo_gd(j: &Jsa, initial: &LocalOscillator, opts: &GdOptions) -> Result<OptimizerReport> {
    check_grids(j, initial)?;
    let psi = WeightedPsi::new(j);
    let a = ascend(&psi, initial.to_h(), opts);
    let it = a.iterations;
    Ok(report(*j.grid(), a, it, 0))
}

/// Gradient ascent restarted from random kicks around the incumbent;
/// a hop is kept only if it strictly improves `|η|`.
pub fn optimize_lo_basinhopping(
    j: &Jsa,
    initial: &LocalOscillator,
    opts: &BasinHoppingOptions,
) -> Result<OptimizerReport> {
    check_grids(j, initial)?;
    if !(opts.perturb_scale >= 0.0) {
        return Err(Error::InvalidParameter(format!("perturb_scale {}", opts.perturb_scale)));
    }
    let psi = WeightedPsi::new(j);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = ascend(&psi, initial.to_h(), &opts.gd);
    let mut total_iter = best.iterations;
    let mut accepted = 0;
    for _ in 0..opts.n_hops {
        let kick: Vec<C64> = (0..best.h.len())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let kn = norm(&kick);
        let start: Vec<C64> = best
            .h
            .iter()
            .zip(&kick)
            .map(|(h, k)| h + k * (opts.perturb_scale / kn))
            .collect();
        let cand = ascend(&psi, start, &opts.gd);
        total_iter += cand.iterations;
        if cand.eta.norm() > best.eta.norm() {
            best = cand;
            accepted += 1;
        }
    }
    Ok(report(*j.grid(), best, total_iter, accepted))
}

/// Marginal quadrature density of the triplet-added vacuum,
/// `p(x) = e^{−x²}/√π [1 + εη (2/√3)(2x³ − 3x) cos 3θ]`, to first order in ε.
pub fn quadrature_pdf(x: f64, theta: f64, epsilon: f64, eta: f64) -> f64 {
    let gauss = (-x * x).exp() / std::f64::consts::PI.sqrt();
    gauss * (1.0 + epsilon * eta * (2.0 / 3f64.sqrt()) * (2.0 * x.powi(3) - 3.0 * x) * (3.0 * theta).cos())
}

/// `(⟨x⟩, ⟨x²⟩, ⟨x³⟩, ⟨x⁴⟩)` of [`quadrature_pdf`], in closed form.
pub fn quadrature_moments(theta: f64, epsilon: f64, eta: f64) -> [f64; 4] {
    [0.0, 0.5, 3f64.sqrt() * epsilon * eta * (3.0 * theta).cos(), 0.75]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPdf {
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    /// The first-order expansion went negative somewhere: εη is too large
    /// for it to be trusted.
    pub has_negative: bool,
}

pub fn sample_quadrature_pdf(xs: &[f64], theta: f64, epsilon: f64, eta: f64) -> SampledPdf {
    let density: Vec<f64> = xs.iter().map(|x| quadrature_pdf(*x, theta, epsilon, eta)).collect();
    let has_negative = density.iter().any(|p| *p < 0.0);
    if has_negative {
        log::warn!("quadrature density negative for eps*eta = {:e}", epsilon * eta);
    }
    SampledPdf {
        x: xs.to_vec(),
        density,
        has_negative,
    }
}

/// How the three-photon coincidence probability is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoincidenceConvention {
    /// `|u₀u₁u₂|²`, the single-path product.
    Product,
    /// `6|u₀u₁u₂|²`, the full bosonic probability of one photon per port.
    Bosonic,
}

/// Column of a three-port splitter seen by the input mode: output amplitudes
/// `u_k`, with `Σ|u_k|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitterColumn {
    u: [C64; 3],
}

impl SplitterColumn {
    pub fn new(u: [C64; 3]) -> Result<Self> {
        let total: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { u })
    }

    /// Equal split with the phases of a symmetric tritter.
    pub fn balanced() -> Self {
        let a = 3f64.sqrt().recip();
        let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        Self {
            u: [C64::new(a, 0.0), phase * a, phase * phase * a],
        }
    }

    pub fn amplitudes(&self) -> [C64; 3] {
        self.u
    }
}

pub fn splitter_coincidence(col: &SplitterColumn, convention: CoincidenceConvention) -> f64 {
    let p = (col.u[0] * col.u[1] * col.u[2]).norm_sqr();
    match convention {
        CoincidenceConvention::Product => p,
        CoincidenceConvention::Bosonic => 6.0 * p,
    }
}
