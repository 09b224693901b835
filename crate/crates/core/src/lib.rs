//! Triphoton joint spectral amplitudes for third-order parametric
//! down-conversion, their single-photon reduced density matrices, and
//! detection optimization.

pub mod detection;
pub mod dispersion;
pub mod error;
pub mod jsa;
pub mod numerics;
pub mod separability;

pub use error::{Error, Result};
pub use num_complex::Complex64;
