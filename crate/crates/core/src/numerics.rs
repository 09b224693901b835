//! Frequency grids, trapezoid quadrature and the dense containers shared by
//! every stage of the pipeline.
//!
//! All tensors live on the triple product of a single uniform grid. Integrals
//! over frequency are replaced by trapezoid sums; the weights are exposed so
//! that partial traces stay plain (weighted) matrix products.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Angular frequency (rad/s) of a vacuum wavelength given in metres.
pub fn omega_from_wavelength(lambda_m: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda_m
}

/// Vacuum wavelength (m) of an angular frequency in rad/s.
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega
}

/// Float formatting used by every CSV writer: round-trips exactly.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Uniform angular-frequency grid with trapezoid weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omega_min: f64,
    omega_max: f64,
    n_points: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, n_points: usize) -> Result<Self> {
        if !(omega_min.is_finite() && omega_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if omega_max <= omega_min {
            return Err(Error::InvalidGrid(format!(
                "omega_max ({omega_max}) must exceed omega_min ({omega_min})"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        Ok(Self {
            omega_min,
            omega_max,
            n_points,
        })
    }

    /// Grid spanning `center ± half_width`.
    pub fn centered(center: f64, half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, n_points)
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.n_points - 1) as f64
    }

    pub fn width(&self) -> f64 {
        self.omega_max - self.omega_min
    }

    pub fn omega(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.omega_max
        } else {
            self.omega_min + i as f64 * self.step()
        }
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.omega(i)).collect()
    }

    /// Sum frequency `omega(i) + omega(j) + omega(k)` indexed by `s = i + j + k`.
    ///
    /// Evaluating through the index sum makes the value independent of the
    /// order of the three indices.
    pub fn sum_omega(&self, s: usize) -> f64 {
        3.0 * self.omega_min + s as f64 * self.step()
    }

    pub fn weight(&self, i: usize) -> f64 {
        let h = self.step();
        if i == 0 || i + 1 == self.n_points {
            0.5 * h
        } else {
            h
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.weight(i)).collect()
    }

    /// Trapezoid integral of samples taken on this grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        values
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum()
    }
}

/// Complex rank-3 tensor on the cube of one frequency grid, row-major `(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3C {
    grid: FrequencyGrid,
    values: Vec<C64>,
}

impl Tensor3C {
    pub fn zeros(grid: FrequencyGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn from_vec(grid: FrequencyGrid, values: Vec<C64>) -> Result<Self> {
        let n = grid.len();
        if values.len() != n * n * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values for a {n}^3 tensor, got {}",
                n * n * n,
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: FrequencyGrid, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let n = grid.len();
        let mut values = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    values.push(f(i, j, k));
                }
            }
        }
        Self { grid, values }
    }

    /// Builds a fully symmetric tensor from its values on `i <= j <= k`.
    ///
    /// Each distinct value is computed once and copied into all permutations,
    /// so the result is symmetric bit for bit.
    pub fn from_symmetric_fn(
        grid: FrequencyGrid,
        f: impl Fn(usize, usize, usize) -> C64 + Sync,
    ) -> Self {
        use rayon::prelude::*;
        let n = grid.len();
        let rows: Vec<Vec<(usize, usize, C64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::with_capacity((n - i) * (n - i + 1) / 2);
                for j in i..n {
                    for k in j..n {
                        out.push((j, k, f(i, j, k)));
                    }
                }
                out
            })
            .collect();
        let mut values = vec![C64::new(0.0, 0.0); n * n * n];
        for (i, row) in rows.into_iter().enumerate() {
            for (j, k, v) in row {
                for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    values[(a * n + b) * n + c] = v;
                }
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.grid.len();
        (i * n + j) * n + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.values[self.index(i, j, k)]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Contiguous `n^2` slab with the first index fixed.
    pub fn slab(&self, i: usize) -> &[C64] {
        let n2 = self.grid.len() * self.grid.len();
        &self.values[i * n2..(i + 1) * n2]
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Largest absolute difference between the tensor and any of its index
    /// permutations.
    pub fn permutation_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for (a, b, c) in [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        worst = worst.max((v - self.get(a, b, c)).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Quadrature L2 norm `sqrt(sum w_i w_j w_k |t_ijk|^2)`.
pub fn l2_norm3(t: &Tensor3C) -> f64 {
    let w = t.grid().weights();
    let n = w.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let wij = w[i] * w[j];
            let base = t.index(i, j, 0);
            let row = &t.values()[base..base + n];
            let partial: f64 = row.iter().zip(&w).map(|(v, wk)| wk * v.norm_sqr()).sum();
            total += wij * partial;
        }
    }
    total.sqrt()
}

/// Dense complex square matrix expected to be Hermitian, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    values: Vec<C64>,
}

impl HermitianMatrix {
    pub fn new(n: usize, values: Vec<C64>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n}x{n} values, got {}",
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self { n, values }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |m_ij - conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                self.values[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[n]` is the unit eigenvector belonging to `values[n]`.
    pub vectors: Vec<Vec<C64>>,
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
///
/// Ties keep the order returned by the underlying solver. Vectors spanning a
/// degenerate eigenspace are an arbitrary orthonormal basis of it.
pub fn hermitian_eig(m: &HermitianMatrix) -> Result<HermitianEigen> {
    let n = m.dim();
    let norm = m.frobenius_norm();
    let tolerance = 1e-9 * norm;
    let defect = m.hermiticity_defect();
    if defect > tolerance {
        return Err(Error::NonHermitianInput { defect, tolerance });
    }
    if norm == 0.0 {
        let vectors = (0..n)
            .map(|c| {
                (0..n)
                    .map(|r| if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors,
        });
    }

    // Solve the unit-norm, exactly Hermitian part; rescale afterwards.
    let scale = 1.0 / norm;
    let a = DMatrix::from_fn(n, n, |i, j| (m.get(i, j) + m.get(j, i).conj()) * (0.5 * scale));
    let eig = a.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));

    let values = order.iter().map(|&c| eig.eigenvalues[c] * norm).collect();
    let vectors = order
        .iter()
        .map(|&c| eig.eigenvectors.column(c).iter().copied().collect())
        .collect();
    Ok(HermitianEigen { values, vectors })
}

/// Piecewise-linear interpolation on a strictly increasing table.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::ShapeMismatch(format!(
            "interpolation table needs matching lengths >= 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    if !(x >= first && x <= last) {
        return Err(Error::OutOfRange {
            value: x,
            min: first,
            max: last,
        });
    }
    // Index of the first node strictly greater than x.
    let hi = xs.partition_point(|&v| v <= x);
    if hi == 0 {
        return Ok(ys[0]);
    }
    let lo = hi - 1;
    if xs[lo] == x || hi == xs.len() {
        return Ok(ys[lo]);
    }
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Ok(ys[lo] + t * (ys[hi] - ys[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn grid_rejects_bad_bounds() {
        assert!(FrequencyGrid::new(1.0, 1.0, 10).is_err());
        assert!(FrequencyGrid::new(2.0, 1.0, 10).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 1).is_err());
        assert!(FrequencyGrid::new(0.0, f64::NAN, 5).is_err());
    }

    #[test]
    fn weights_sum_to_width() {
        for (lo, hi, n) in [(0.0, 1.0, 2), (1.2e15, 1.5e15, 101), (-3.0, 7.5, 161)] {
            let g = FrequencyGrid::new(lo, hi, n).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert_relative_eq!(s, hi - lo, max_relative = 1e-12);
            assert_eq!(g.omega(n - 1), hi);
            assert_eq!(g.omega(0), lo);
        }
    }

    #[test]
    fn gaussian_quadrature_six_points_per_sigma() {
        let sigma = 2.0;
        let g = FrequencyGrid::centered(0.0, 12.0 * sigma, 12 * 12 + 1).unwrap();
        let vals: Vec<f64> = g
            .omegas()
            .iter()
            .map(|x| (-x * x / (2.0 * sigma * sigma)).exp())
            .collect();
        let exact = sigma * (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(g.integrate(&vals), exact, max_relative = 1e-6);
    }

    #[test]
    fn norm_of_zero_and_constant_tensors() {
        let g = FrequencyGrid::new(0.0, 2.5, 7).unwrap();
        assert_eq!(l2_norm3(&Tensor3C::zeros(g)), 0.0);
        let ones = Tensor3C::from_fn(g, |_, _, _| c(1.0));
        assert_relative_eq!(l2_norm3(&ones), 2.5f64.powf(1.5), max_relative = 1e-12);
    }

    #[test]
    fn norm_of_gaussian_product() {
        // psi = prod_i (pi s^2)^(-1/4) exp(-x_i^2 / (2 s^2)) has unit norm.
        let s = 1.3;
        let g = FrequencyGrid::centered(0.0, 8.0 * s, 121).unwrap();
        let amp = |x: f64| (std::f64::consts::PI * s * s).powf(-0.25) * (-x * x / (2.0 * s * s)).exp();
        let xs = g.omegas();
        let t = Tensor3C::from_fn(g, |i, j, k| c(amp(xs[i]) * amp(xs[j]) * amp(xs[k])));
        assert_relative_eq!(l2_norm3(&t), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn symmetric_fill_is_exact() {
        let g = FrequencyGrid::new(0.0, 1.0, 6).unwrap();
        let t = Tensor3C::from_symmetric_fn(g, |i, j, k| C64::new((i * 31 + j * 7 + k) as f64, (k * k) as f64));
        assert_eq!(t.permutation_defect(), 0.0);
        assert_eq!(t.get(0, 1, 2), t.get(2, 0, 1));
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = hermitian_eig(&HermitianMatrix::identity(4)).unwrap();
        for v in &e.values {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
        let d = HermitianMatrix::from_fn(3, |i, j| if i == j { c([3.0, 1.0, 2.0][i]) } else { c(0.0) });
        let e = hermitian_eig(&d).unwrap();
        assert_relative_eq!(e.values[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(e.values[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(e.values[2], 1.0, epsilon = 1e-12);
        // eigenvectors are the permuted unit vectors
        assert_relative_eq!(e.vectors[0][0].norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.vectors[1][2].norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(e.vectors[2][1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_projector() {
        let v = [C64::new(0.5, 0.5), C64::new(0.0, -0.5), c(0.5)];
        let p = HermitianMatrix::from_fn(3, |i, j| v[i] * v[j].conj());
        let e = hermitian_eig(&p).unwrap();
        assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-12);
        assert!(e.values[1].abs() < 1e-12 && e.values[2].abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = HermitianMatrix::from_fn(2, |i, j| if i == 0 && j == 1 { c(1.0) } else { c(0.0) });
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn eig_residual_and_orthonormality() {
        let n = 12;
        let m = HermitianMatrix::from_fn(n, |i, j| {
            let a = C64::new(((i * 7 + j * 3) % 11) as f64, ((i + 2 * j) % 5) as f64 - 2.0);
            let b = C64::new(((j * 7 + i * 3) % 11) as f64, ((j + 2 * i) % 5) as f64 - 2.0);
            (a + b.conj()) * 0.5
        });
        let e = hermitian_eig(&m).unwrap();
        let scale = m.frobenius_norm();
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            let mv = m.apply(v);
            let res: f64 = mv.iter().zip(v).map(|(a, b)| (a - b * lam).norm_sqr()).sum::<f64>().sqrt();
            assert!(res <= 1e-9 * scale);
        }
        for a in 0..n {
            for b in 0..n {
                let ip: C64 = e.vectors[a].iter().zip(&e.vectors[b]).map(|(x, y)| x.conj() * y).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c(expect)).norm() < 1e-9);
            }
        }
        let sum: f64 = e.values.iter().sum();
        assert!((sum - m.trace().re).abs() <= 1e-9 * scale);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn interp_basic() {
        assert_eq!(interp_linear(&[0.0, 1.0], &[0.0, 2.0], 0.5).unwrap(), 1.0);
        let xs = [0.0, 0.3, 1.1, 2.0];
        let ys = [1.0, -4.0, 7.25, 3.0];
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(interp_linear(&xs, &ys, *x).unwrap(), *y);
        }
        assert!(matches!(
            interp_linear(&xs, &ys, 2.0001),
            Err(Error::OutOfRange { .. })
        ));
        assert!(interp_linear(&xs, &ys, -1e-9).is_err());
    }

    #[test]
    fn interp_quadratic_error_bound() {
        // |f - L f| <= h^2 max|f''| / 8 for f = x^2, f'' = 2.
        let h = 0.01;
        let xs: Vec<f64> = (0..=200).map(|i| i as f64 * h).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        for t in [0.0037, 0.5, 1.23456, 1.999] {
            let err = (interp_linear(&xs, &ys, t).unwrap() - t * t).abs();
            assert!(err <= h * h / 4.0 + 1e-15, "err {err} at {t}");
        }
    }
}
