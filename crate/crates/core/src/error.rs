use thiserror::Error;

/// Errors raised by the linear algebra, channel and search layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("polar decomposition is degenerate (smallest singular value {smallest_singular:e})")]
    DegeneratePolar { smallest_singular: f64 },

    #[error("psi is indeterminate at chi = {chi}")]
    Indeterminate { chi: f64 },

    #[error("noise strength must be finite and non-negative, got {0}")]
    NegativeStrength(f64),

    #[error("vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("search plane is degenerate for n = {n}")]
    DegeneratePlane { n: usize },

    #[error("invalid search instance: n = {n}, w = {w}")]
    InvalidInstance { n: usize, w: usize },

    #[error("Kraus channel is invalid: {0}")]
    InvalidChannel(String),

    #[error("density matrix is invalid: {0}")]
    InvalidDensity(String),

    #[error("state is not supported on the search plane (plane trace {plane_trace}, coupling {coupling:e})")]
    OffPlaneSupport { plane_trace: f64, coupling: f64 },

    #[error("Bloch vector is zero; angle undefined")]
    ZeroBlochVector,

    #[error("spectrum length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("spectrum is not normalized (sum = {0})")]
    UnnormalizedSpectrum(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
