//! Dense complex linear algebra for small operators.
//!
//! Everything here works on [`ComplexMatrix`], a square matrix newtype over
//! `nalgebra::DMatrix<Complex64>`. Tensor products put the system on the
//! left factor and the environment on the right, so `kron(sys, env)` has
//! row index `sys_row * env_dim + env_row`; [`partial_trace_env`] follows the
//! same ordering.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Wraps a nalgebra matrix, rejecting non-square or non-finite input.
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() || inner.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(inner))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from entries listed row by row.
    ///
    /// Panics if `entries.len() != dim * dim`.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "expected {dim}x{dim} entries");
        Self(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Self {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_slice(dim, &entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|m - m^dagger|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Frobenius norm of `m^dagger m - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self.0.adjoint() * &self.0;
        (gram - DMatrix::<Complex64>::identity(self.dim(), self.dim()))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > tolerance::HERMITICITY {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// Projects onto the Hermitian part, `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `self * rho * self^dagger`
    pub fn conjugate(&self, rho: &Self) -> Self {
        Self(&self.0 * &rho.0 * self.0.adjoint())
    }

    /// Frobenius distance to `other` after the optimal global phase
    /// `e^{i phi}` has been applied to `other`.
    pub fn phase_aligned_distance(&self, other: &Self) -> f64 {
        let overlap: Complex64 = other.0.iter().zip(self.0.iter()).map(|(b, a)| b.conj() * a).sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        (self - &other.scale(phase)).frobenius_norm()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join("  "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for ComplexMatrix {
    /// Serialized as rows of `[re, im]` pairs.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| [self.0[(i, j)].re, self.0[(i, j)].im])
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(serde::de::Error::custom("matrix rows must form a square"));
        }
        let entries: Vec<Complex64> = rows.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(DMatrix::from_row_slice(dim, dim, &entries)).map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

/// Real eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` descending. NaN entries are rejected by the caller.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, &[ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, -1.0])
}

/// `exp(i * angle * sigma_y)`, the real rotation `[[cos, sin], [-sin, cos]]`.
pub fn sigma_y_rotation(angle: f64) -> ComplexMatrix {
    let (s, c) = angle.sin_cos();
    ComplexMatrix::from_real_rows(2, &[c, s, -s, c])
}

/// Kronecker product; `a` indexes the outer blocks.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

struct HermitianEigen {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    m.ensure_hermitian()?;
    let eig = m.hermitian_part().0.symmetric_eigen();
    Ok(HermitianEigen {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    })
}

/// Computes `exp(i h)` for Hermitian `h` from its eigendecomposition
/// `h = Q diag(lambda) Q^dagger`.
pub fn matexp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let HermitianEigen { values, vectors } = eigh(h)?;
    let n = h.dim();
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, lambda);
        for i in 0..n {
            scaled[(i, k)] *= phase;
        }
    }
    Ok(ComplexMatrix(scaled * vectors.adjoint()))
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    Ok(Spectrum::new(eigh(m)?.values))
}

/// Unitary factor `W` of the polar decomposition `m = P W`, with `P`
/// Hermitian positive definite. `W` is the Frobenius-nearest unitary to `m`.
///
/// 2x2 input uses the closed form `W = (m + |det m| (m^dagger)^{-1}) / (s1 + s2)`;
/// larger input goes through the SVD `m = U S V^dagger`, `W = U V^dagger`.
pub fn polar_unitary_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.dim() == 2 {
        polar_2x2(m)
    } else {
        polar_svd(m)
    }
}

fn polar_2x2(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let det = a * d - b * c;
    let abs_det = det.norm();
    let fro_sq = m.0.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let disc = (fro_sq * fro_sq - 4.0 * abs_det * abs_det).max(0.0).sqrt();
    let s_max = ((fro_sq + disc) / 2.0).sqrt();
    let s_min = if s_max > 0.0 { abs_det / s_max } else { 0.0 };
    if s_min <= tolerance::SINGULAR {
        return Err(Error::DegeneratePolar {
            smallest_singular: s_min,
        });
    }
    // (m^dagger)^{-1} = adj(m)^dagger / conj(det)
    let adj_dagger = ComplexMatrix::from_row_slice(2, &[d.conj(), -c.conj(), -b.conj(), a.conj()]);
    let factor = abs_det / det.conj();
    let sum = m + &adj_dagger.scale(factor);
    Ok(sum.scale_real(1.0 / (s_max + s_min)))
}

fn polar_svd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let svd = m.0.clone().svd(true, true);
    let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest <= tolerance::SINGULAR {
        return Err(Error::DegeneratePolar {
            smallest_singular: smallest,
        });
    }
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("SVD was requested with both factors"),
    };
    Ok(ComplexMatrix(u * v_t))
}

/// The system block `<env_row| m |env_col>` of an operator on
/// `system (x) environment`.
pub fn partial_trace_env(
    m: &ComplexMatrix,
    sys_dim: usize,
    env_dim: usize,
    env_row: usize,
    env_col: usize,
) -> Result<ComplexMatrix> {
    if m.dim() != sys_dim * env_dim {
        return Err(Error::DimensionMismatch {
            expected: sys_dim * env_dim,
            got: m.dim(),
        });
    }
    if env_row >= env_dim || env_col >= env_dim {
        return Err(Error::DimensionMismatch {
            expected: env_dim,
            got: env_row.max(env_col) + 1,
        });
    }
    Ok(ComplexMatrix::from_fn(sys_dim, |i, j| {
        m.get(i * env_dim + env_row, j * env_dim + env_col)
    }))
}
