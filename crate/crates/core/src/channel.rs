//! Completely positive maps in operator-sum form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, ComplexMatrix};

/// A CP map `rho -> sum_i w_i K_i rho K_i^dagger`.
///
/// Weights are kept separate from the operators so that a mixture of
/// unitaries such as `{V0 / sqrt 2, V1 / sqrt 2}` is stored as the unitaries
/// `V0, V1` with weights `1/2, 1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    weights: Vec<f64>,
}

impl KrausChannel {
    /// Builds a channel with unit weights.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let weights = vec![1.0; operators.len()];
        Self::weighted(operators, weights)
    }

    /// Builds a channel with explicit positive weights. Completeness is not
    /// enforced here; see [`KrausChannel::completeness_residual`].
    pub fn weighted(operators: Vec<ComplexMatrix>, weights: Vec<f64>) -> Result<Self> {
        let dim = operators
            .first()
            .map(ComplexMatrix::dim)
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        if operators.len() != weights.len() {
            return Err(Error::InvalidChannel(format!(
                "{} operators but {} weights",
                operators.len(),
                weights.len()
            )));
        }
        if let Some(op) = operators.iter().find(|op| op.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: op.dim(),
            });
        }
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::InvalidChannel("weights must be positive and finite".into()));
        }
        Ok(Self {
            dim,
            operators,
            weights,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(dim))
    }

    /// The map `Ad u : rho -> u rho u^dagger`.
    pub fn unitary(u: ComplexMatrix) -> Self {
        Self {
            dim: u.dim(),
            operators: vec![u],
            weights: vec![1.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The operators with weights folded in, `sqrt(w_i) K_i`.
    pub fn scaled_operators(&self) -> Vec<ComplexMatrix> {
        self.operators
            .iter()
            .zip(&self.weights)
            .map(|(k, &w)| k.scale_real(w.sqrt()))
            .collect()
    }

    /// Frobenius norm of `sum_i w_i K_i^dagger K_i - I`.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .zip(&self.weights)
            .fold(ComplexMatrix::zeros(self.dim), |acc, (k, &w)| {
                acc + (k.adjoint() * k).scale_real(w)
            });
        (sum - ComplexMatrix::identity(self.dim)).frobenius_norm()
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.completeness_residual() <= tol
    }

    /// True when every operator is unitary within `tol`.
    pub fn is_mixed_unitary(&self, tol: f64) -> bool {
        self.operators.iter().all(|k| k.is_unitary(tol))
    }

    /// Frobenius norm of `sum_i w_i K_i K_i^dagger - I`.
    pub fn unitality_residual(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .zip(&self.weights)
            .fold(ComplexMatrix::zeros(self.dim), |acc, (k, &w)| {
                acc + (k * &k.adjoint()).scale_real(w)
            });
        (sum - ComplexMatrix::identity(self.dim)).frobenius_norm()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.dim(),
            });
        }
        Ok(self
            .operators
            .iter()
            .zip(&self.weights)
            .fold(ComplexMatrix::zeros(self.dim), |acc, (k, &w)| {
                acc + k.conjugate(rho).scale_real(w)
            }))
    }
}

/// Choi matrix `sum_ij ch(|i><j|) (x) |i><j|`, of dimension `d^2`.
///
/// Each operator contributes `w |v><v|` with `v = sum_i K|i> (x) |i>`,
/// i.e. `v[a * d + i] = K[a, i]`.
pub fn choi_matrix(ch: &KrausChannel) -> ComplexMatrix {
    let d = ch.dim();
    let mut choi = ComplexMatrix::zeros(d * d);
    for (k, &w) in ch.operators().iter().zip(ch.weights()) {
        let v: Vec<Complex64> = (0..d * d).map(|idx| k.get(idx / d, idx % d)).collect();
        for (row, vr) in v.iter().enumerate() {
            if vr.norm_sqr() == 0.0 {
                continue;
            }
            for (col, vc) in v.iter().enumerate() {
                let entry = choi.get(row, col) + vr * vc.conj() * w;
                choi.set(row, col, entry);
            }
        }
    }
    choi
}

/// Choi matrix of an arbitrary linear map on `d x d` matrices, built from its
/// action on the matrix units `|i><j|`. Same layout as [`choi_matrix`].
pub fn choi_of_map<F>(d: usize, map: F) -> Result<ComplexMatrix>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let mut choi = ComplexMatrix::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut unit = ComplexMatrix::zeros(d);
            unit.set(i, j, Complex64::new(1.0, 0.0));
            let image = map(&unit)?;
            if image.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: image.dim(),
                });
            }
            for a in 0..d {
                for b in 0..d {
                    choi.set(a * d + i, b * d + j, image.get(a, b));
                }
            }
        }
    }
    Ok(choi)
}

/// Frobenius distance between Choi matrices; zero iff the maps coincide.
pub fn channel_choi_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok((choi_matrix(a) - choi_matrix(b)).frobenius_norm())
}

/// Number of Choi eigenvalues above `tol`: the minimal Kraus rank.
pub fn choi_rank(ch: &KrausChannel, tol: f64) -> usize {
    let choi = choi_matrix(ch).hermitian_part();
    eigvals_hermitian(&choi)
        .map(|s| s.values().iter().filter(|&&x| x > tol).count())
        .unwrap_or(0)
}

/// The map `rho -> a(b(rho))`, with Kraus set `{A_i B_j}` and weights
/// `w_i w'_j`. Products of unitaries are unitary, so mixed-unitary inputs
/// give a mixed-unitary output.
pub fn compose_channels(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let mut operators = Vec::with_capacity(a.len() * b.len());
    let mut weights = Vec::with_capacity(a.len() * b.len());
    for (ka, &wa) in a.operators().iter().zip(a.weights()) {
        for (kb, &wb) in b.operators().iter().zip(b.weights()) {
            operators.push(ka * kb);
            weights.push(wa * wb);
        }
    }
    KrausChannel::weighted(operators, weights)
}
