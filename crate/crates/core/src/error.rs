use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tolerance:.3e})")]
    NonHermitianInput { defect: f64, tolerance: f64 },

    #[error("value {value} outside of valid range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("Sellmeier radicand n^2 = {0} is not positive")]
    NegativeRadicand(f64),

    #[error("invalid dispersion data: {0}")]
    InvalidDispersion(String),

    #[error("length must be positive and finite, got {0}")]
    InvalidLength(f64),

    #[error("group-velocity dispersion is zero")]
    ZeroDispersion,

    #[error("phase mismatch does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("kernel vanishes on the grid; nothing to normalize")]
    ZeroKernel,

    #[error("filter retains power {0:.3e}, below 1e-12")]
    EmptyFilter(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("operands live on different frequency grids")]
    GridMismatch,

    #[error("amplitudes are not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
