//! Principal axes of the quadratic phase-mismatch surface.
//!
//! With zeroth-order phase matching and matched group velocities,
//! `(ℓ/2)Δk = wᵀ A w` for the detuning vector `w = (δω₁, δω₂, δω₃)` and
//! `A = (ℓ/4)(β_P J − β_F I)`, `J` the all-ones matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadricEigensystem {
    /// Eigenvalue along the diagonal `(1,1,1)/√3`, s².
    pub lambda1: f64,
    /// Doubly degenerate transverse eigenvalue, s².
    pub lambda2: f64,
    pub lambda3: f64,
    pub v1: [f64; 3],
    pub v2: [f64; 3],
    pub v3: [f64; 3],
}

impl QuadricEigensystem {
    /// True when every eigenvalue has the same strict sign, i.e. the level
    /// sets are ellipsoids.
    pub fn is_ellipsoidal(&self) -> bool {
        let l = [self.lambda1, self.lambda2, self.lambda3];
        l.iter().all(|v| *v > 0.0) || l.iter().all(|v| *v < 0.0)
    }
}

/// The symmetric matrix `A` of the quadric `(ℓ/2)Δk = wᵀ A w`.
pub fn quadric_matrix(beta_p: f64, beta_f: f64, length: f64) -> Result<[[f64; 3]; 3]> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidLength(length));
    }
    let s = length / 4.0;
    let mut a = [[s * beta_p; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = s * (beta_p - beta_f);
    }
    Ok(a)
}

/// Closed-form eigensystem of [`quadric_matrix`].
pub fn quadric_eigensystem(beta_p: f64, beta_f: f64, length: f64) -> Result<QuadricEigensystem> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidLength(length));
    }
    let s = length / 4.0;
    let transverse = -s * beta_f;
    let r3 = 3f64.sqrt().recip();
    let r2 = 2f64.sqrt().recip();
    let r6 = 6f64.sqrt().recip();
    Ok(QuadricEigensystem {
        lambda1: s * (3.0 * beta_p - beta_f),
        lambda2: transverse,
        lambda3: transverse,
        v1: [r3, r3, r3],
        v2: [0.0, -r2, r2],
        v3: [2.0 * r6, -r6, -r6],
    })
}
