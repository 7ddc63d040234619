//! Grover search over the projector database `{|i><i|}` with the noisy
//! rotation embedded in the search plane.
//!
//! The search plane is spanned by the target `|w>` and
//! `|r> = (|s> - <w|s>|w>) / |...|`. A 2x2 rotation acts on the ordered basis
//! `{|w>, |r>}` and as the identity on the orthogonal complement. Every Kraus
//! operator of the search channel therefore has the form `I + B (k - I) B^T`
//! with `B = [|w>, |r>]`, which [`SearchChannel::apply`] exploits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, sigma_y_rotation, ComplexMatrix, Spectrum};
use crate::noise::{nearest_unitary_angles, NoiseStrength, PsiBranch};
use crate::tolerance;

/// Database size, target index and noise strength of one search problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchInstance {
    n: usize,
    w: usize,
    chi: NoiseStrength,
    #[serde(default)]
    branch: PsiBranch,
}

impl SearchInstance {
    pub fn new(n: usize, w: usize, chi: NoiseStrength) -> Result<Self> {
        if n < 2 || w >= n {
            return Err(Error::InvalidInstance { n, w });
        }
        Ok(Self {
            n,
            w,
            chi,
            branch: PsiBranch::Principal,
        })
    }

    pub fn with_branch(mut self, branch: PsiBranch) -> Self {
        self.branch = branch;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn chi(&self) -> NoiseStrength {
        self.chi
    }

    pub fn branch(&self) -> PsiBranch {
        self.branch
    }

    /// Orthonormal plane basis `(|w>, |r>)` as real vectors.
    pub fn plane_basis(&self) -> (Vec<f64>, Vec<f64>) {
        let mut target = vec![0.0; self.n];
        target[self.w] = 1.0;
        // |s> - <w|s>|w> has entries 1/sqrt(n) off the target, norm sqrt((n-1)/n)
        let r_entry = 1.0 / ((self.n - 1) as f64).sqrt();
        let mut rest = vec![r_entry; self.n];
        rest[self.w] = 0.0;
        (target, rest)
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let rho = Self(mat);
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn trusted(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    pub fn validate(&self) -> Result<()> {
        self.0
            .ensure_hermitian()
            .map_err(|e| Error::InvalidDensity(e.to_string()))?;
        let tr = self.0.trace();
        if (tr.re - 1.0).abs() > tolerance::UNITARITY || tr.im.abs() > tolerance::UNITARITY {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let lowest = self.spectrum()?.min();
        if lowest < -tolerance::UNITARITY {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(())
    }

    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tolerance::UNITARITY {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(ComplexMatrix::outer(amplitudes)))
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n);
        m.set(index, index, Complex64::new(1.0, 0.0));
        Self(m)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(ComplexMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eigvals_hermitian(&self.0)
    }
}

/// `|s><s|` with every entry `1/n`.
pub fn uniform_state(n: usize) -> DensityMatrix {
    let entry = Complex64::new(1.0 / n as f64, 0.0);
    DensityMatrix(ComplexMatrix::from_fn(n, |_, _| entry))
}

/// `1 - 2|v><v|` for a unit vector `v`.
pub fn reflection(v: &[Complex64]) -> Result<ComplexMatrix> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tolerance::UNITARITY {
        return Err(Error::NotNormalized { norm });
    }
    Ok(ComplexMatrix::identity(v.len()) - ComplexMatrix::outer(v).scale_real(2.0))
}

/// Lifts a 2x2 unitary to the N-dimensional operator acting as `v2` on
/// `{|w>, |r>}` and as the identity on the complement.
pub fn embed_plane_rotation(v2: &ComplexMatrix, inst: &SearchInstance) -> Result<ComplexMatrix> {
    if v2.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: v2.dim(),
        });
    }
    if !v2.is_unitary(tolerance::UNITARITY) {
        return Err(Error::InvalidChannel("plane rotation is not unitary".into()));
    }
    if inst.n() < 2 {
        return Err(Error::DegeneratePlane { n: inst.n() });
    }
    Ok(embed_block(&(v2 - &ComplexMatrix::identity(2)), inst).add_identity())
}

/// `B d B^T` for a 2x2 block `d`, with `B = [|w>, |r>]`.
fn embed_block(d: &ComplexMatrix, inst: &SearchInstance) -> LowRank {
    let (target, rest) = inst.plane_basis();
    let basis = [target, rest];
    let n = inst.n();
    let m = ComplexMatrix::from_fn(n, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, ba) in basis.iter().enumerate() {
            if ba[i] == 0.0 {
                continue;
            }
            for (b, bb) in basis.iter().enumerate() {
                acc += d.get(a, b) * (ba[i] * bb[j]);
            }
        }
        acc
    });
    LowRank(m)
}

struct LowRank(ComplexMatrix);

impl LowRank {
    fn add_identity(self) -> ComplexMatrix {
        let n = self.0.dim();
        self.0 + ComplexMatrix::identity(n)
    }
}

/// The search-plane restriction of a reflection `1 - 2|v><v|` for `v` in the plane,
/// given in `{|w>, |r>}` coordinates.
fn plane_reflection(v: [f64; 2]) -> ComplexMatrix {
    let [a, b] = v;
    ComplexMatrix::from_real_rows(2, &[1.0 - 2.0 * a * a, -2.0 * a * b, -2.0 * a * b, 1.0 - 2.0 * b * b])
}

/// The noisy search map `t = 1/2 Ad(V0 I_s V0^dagger I_w) + 1/2 Ad(V1 I_s V1^dagger I_w)`.
#[derive(Debug, Clone)]
pub struct SearchChannel {
    instance: SearchInstance,
    kraus: KrausChannel,
    /// `k_i - I` for each Kraus operator restricted to the plane.
    plane_deltas: Vec<ComplexMatrix>,
}

pub fn build_search_channel(inst: &SearchInstance) -> Result<SearchChannel> {
    let angles = nearest_unitary_angles(inst.chi(), inst.branch())?;
    let n = inst.n() as f64;
    let s_plane = [1.0 / n.sqrt(), ((n - 1.0) / n).sqrt()];
    let reflect_s = plane_reflection(s_plane);
    let reflect_w = plane_reflection([1.0, 0.0]);

    let mut operators = Vec::with_capacity(2);
    let mut plane_deltas = Vec::with_capacity(2);
    for angle in angles {
        let v = sigma_y_rotation(angle);
        let k = &(&v * &reflect_s) * &(&v.adjoint() * &reflect_w);
        let delta = &k - &ComplexMatrix::identity(2);
        operators.push(embed_block(&delta, inst).add_identity());
        plane_deltas.push(delta);
    }
    let kraus = KrausChannel::weighted(operators, vec![0.5, 0.5])?;
    Ok(SearchChannel {
        instance: *inst,
        kraus,
        plane_deltas,
    })
}

/// Same channel assembled from full N x N reflections and embedded rotations,
/// `K_i = V~_i I_s V~_i^dagger I_w`. Used to cross-check [`build_search_channel`].
pub fn build_search_channel_dense(inst: &SearchInstance) -> Result<KrausChannel> {
    let n = inst.n();
    let s: Vec<Complex64> = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    w[inst.w()] = Complex64::new(1.0, 0.0);
    let reflect_s = reflection(&s)?;
    let reflect_w = reflection(&w)?;
    let operators = nearest_unitary_angles(inst.chi(), inst.branch())?
        .into_iter()
        .map(|angle| {
            let v = embed_plane_rotation(&sigma_y_rotation(angle), inst)?;
            Ok(&(&v * &reflect_s) * &(&v.adjoint() * &reflect_w))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::weighted(operators, vec![0.5, 0.5])
}

impl SearchChannel {
    pub fn instance(&self) -> &SearchInstance {
        &self.instance
    }

    pub fn kraus(&self) -> &KrausChannel {
        &self.kraus
    }

    /// `sum_i w_i K_i rho K_i^dagger`, evaluated in O(n^2) using
    /// `K_i = I + B D_i B^T`.
    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.instance.n();
        if rho.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rho.dim(),
            });
        }
        let (target, rest) = self.instance.plane_basis();
        let basis = [target, rest];
        let rho_m = rho.matrix().as_inner();

        // rows[a] = B_a^T rho  (row vector), cols[a] = rho B_a (column vector)
        let project_rows = |m: &nalgebra::DMatrix<Complex64>| -> [Vec<Complex64>; 2] {
            basis.clone().map(|b| {
                (0..n)
                    .map(|j| (0..n).filter(|&i| b[i] != 0.0).map(|i| m[(i, j)] * b[i]).sum())
                    .collect()
            })
        };

        let rows = project_rows(rho_m);
        let mut out = nalgebra::DMatrix::<Complex64>::zeros(n, n);
        for (delta, &weight) in self.plane_deltas.iter().zip(self.kraus.weights()) {
            // left = K rho = rho + B D (B^T rho)
            let mut left = rho_m.clone();
            for a in 0..2 {
                for (i, &ba) in basis[a].iter().enumerate() {
                    if ba == 0.0 {
                        continue;
                    }
                    for b in 0..2 {
                        let coeff = delta.get(a, b) * ba;
                        for j in 0..n {
                            left[(i, j)] += coeff * rows[b][j];
                        }
                    }
                }
            }
            // left K^dagger = left + (left B) D^dagger B^T
            let cols: [Vec<Complex64>; 2] = basis.clone().map(|b| {
                (0..n)
                    .map(|i| (0..n).filter(|&j| b[j] != 0.0).map(|j| left[(i, j)] * b[j]).sum())
                    .collect()
            });
            for a in 0..2 {
                for b in 0..2 {
                    let coeff = delta.get(b, a).conj();
                    if coeff.norm_sqr() == 0.0 {
                        continue;
                    }
                    for (j, &bb) in basis[b].iter().enumerate() {
                        if bb == 0.0 {
                            continue;
                        }
                        let c = coeff * bb;
                        for i in 0..n {
                            left[(i, j)] += cols[a][i] * c;
                        }
                    }
                }
            }
            out += left * Complex64::new(weight, 0.0);
        }
        Ok(DensityMatrix::trusted(
            ComplexMatrix::new(out).expect("finite input gives finite output"),
        ))
    }

    /// `[rho, t(rho), ..., t^m(rho)]`
    pub fn iterate(&self, rho: &DensityMatrix, m: usize) -> Result<Vec<DensityMatrix>> {
        let mut states = Vec::with_capacity(m + 1);
        states.push(rho.clone());
        for _ in 0..m {
            let next = self.apply(states.last().expect("non-empty"))?;
            states.push(next);
        }
        Ok(states)
    }

    /// Lazy trajectory, starting with `rho` itself.
    pub fn trajectory(&self, rho: DensityMatrix) -> Trajectory<'_> {
        Trajectory {
            channel: self,
            next: Some(rho),
        }
    }
}

/// Iterator over `t^k(rho)` for `k = 0, 1, ...`.
pub struct Trajectory<'a> {
    channel: &'a SearchChannel,
    next: Option<DensityMatrix>,
}

impl Iterator for Trajectory<'_> {
    type Item = Result<DensityMatrix>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        match self.channel.apply(&current) {
            Ok(following) => self.next = Some(following),
            Err(e) => return Some(Err(e)),
        }
        Some(Ok(current))
    }
}

/// `<w|rho|w>`
pub fn success_probability(rho: &DensityMatrix, w: usize) -> Result<f64> {
    if w >= rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: w + 1,
        });
    }
    Ok(rho.matrix().get(w, w).re)
}

/// Noiseless success probability after `m` iterations, `sin^2((2m+1) asin(1/sqrt n))`.
pub fn ideal_grover_probability(n: usize, m: usize) -> f64 {
    let theta = (1.0 / (n as f64).sqrt()).asin();
    ((2 * m + 1) as f64 * theta).sin().powi(2)
}
