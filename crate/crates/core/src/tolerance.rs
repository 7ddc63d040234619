//! Numerical tolerances shared by every module.

/// Maximum entry of `|m - m^dagger|` accepted as Hermitian.
pub const HERMITICITY: f64 = 1e-12;

/// Unitarity, completeness and trace checks.
pub const UNITARITY: f64 = 1e-10;

/// Agreement between an implementation and an independent oracle.
pub const ORACLE: f64 = 1e-9;

/// Singular values at or below this make the polar factor undefined.
pub const SINGULAR: f64 = 1e-10;

/// Eigenvalues below this are treated as zero in entropy sums.
pub const EIGEN_CLIP: f64 = 1e-14;

/// Slack allowed on majorization partial sums.
pub const MAJORIZATION: f64 = 1e-10;
