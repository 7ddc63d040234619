//! Figures of merit along a search trajectory: Bloch vectors in the search
//! plane, radial and angular fidelities, entropy and majorization.
//!
//! Closed-form fidelity predictions are evaluated next to the simulated
//! values but never substituted for them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, ComplexMatrix, Spectrum};
use crate::noise::{scalar_profile, NoiseStrength, PsiBranch};
use crate::search::{build_search_channel, uniform_state, DensityMatrix, SearchInstance};
use crate::tolerance;

/// Off-plane coupling entries above this reject a state as not plane-supported.
const PLANE_COUPLING: f64 = 1e-8;
/// Minimum trace the plane block must carry.
const PLANE_TRACE: f64 = 1.0 - 1e-6;
/// Bloch norms at or below this have no defined direction.
const ZERO_BLOCH: f64 = 1e-10;
/// Below this Bloch norm, rounding in the density entries (~1e-16) shows up
/// in successive norm ratios above the 1e-8 level.
pub const RATIO_FLOOR: f64 = 1e-6;
/// Trajectory spectra come from the full matrix up to this size.
const FULL_SPECTRUM_MAX_N: usize = 256;

/// Bloch coordinates in the search plane; the target `|w>` sits at `+z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.z)
    }
}

/// The 2x2 block `B^T rho B` on `{|w>, |r>}`.
pub fn plane_block(rho: &DensityMatrix, inst: &SearchInstance) -> Result<ComplexMatrix> {
    check_dim(rho, inst)?;
    let (target, rest) = inst.plane_basis();
    let basis = [target, rest];
    let m = rho.matrix();
    let n = inst.n();
    Ok(ComplexMatrix::from_fn(2, |a, b| {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for i in (0..n).filter(|&i| basis[a][i] != 0.0) {
            for j in (0..n).filter(|&j| basis[b][j] != 0.0) {
                acc += m.get(i, j) * (basis[a][i] * basis[b][j]);
            }
        }
        acc
    }))
}

/// Largest entry of `P_c rho B`, the coupling between the plane and its complement.
fn plane_coupling(rho: &DensityMatrix, inst: &SearchInstance) -> f64 {
    let (target, rest) = inst.plane_basis();
    let basis = [target, rest];
    let m = rho.matrix();
    let n = inst.n();
    let mut worst = 0.0_f64;
    for b in &basis {
        // rho B_b
        let col: Vec<num_complex::Complex64> = (0..n)
            .map(|i| (0..n).filter(|&j| b[j] != 0.0).map(|j| m.get(i, j) * b[j]).sum())
            .collect();
        // remove the in-plane component
        let coeffs: Vec<num_complex::Complex64> = basis.iter().map(|a| (0..n).map(|i| col[i] * a[i]).sum()).collect();
        for i in 0..n {
            let in_plane = coeffs[0] * basis[0][i] + coeffs[1] * basis[1][i];
            worst = worst.max((col[i] - in_plane).norm());
        }
    }
    worst
}

pub fn bloch_from_density(rho: &DensityMatrix, inst: &SearchInstance) -> Result<BlochVector> {
    let block = plane_block(rho, inst)?;
    let plane_trace = block.trace().re;
    let coupling = plane_coupling(rho, inst);
    if plane_trace < PLANE_TRACE || coupling > PLANE_COUPLING {
        return Err(Error::OffPlaneSupport { plane_trace, coupling });
    }
    let block = block.scale_real(1.0 / plane_trace);
    Ok(BlochVector {
        x: 2.0 * block.get(0, 1).re,
        z: block.get(0, 0).re - block.get(1, 1).re,
    })
}

/// Overlap with the target projector under both normalizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialFidelity {
    /// `1/2 Tr(rho rho_w)`
    pub f_paper: f64,
    /// `Tr(rho rho_w)`
    pub p_success: f64,
}

pub fn radial_fidelity(rho: &DensityMatrix, inst: &SearchInstance) -> Result<RadialFidelity> {
    check_dim(rho, inst)?;
    let p = rho.matrix().get(inst.w(), inst.w()).re;
    Ok(RadialFidelity {
        f_paper: p / 2.0,
        p_success: p,
    })
}

/// Cosine of the angle between the Bloch vector of `rho` and the target pole.
pub fn angular_fidelity(rho: &DensityMatrix, inst: &SearchInstance) -> Result<f64> {
    let bloch = bloch_from_density(rho, inst)?;
    cos_to_target(bloch)
}

fn cos_to_target(bloch: BlochVector) -> Result<f64> {
    let norm = bloch.norm();
    if norm <= ZERO_BLOCH {
        return Err(Error::ZeroBlochVector);
    }
    Ok(bloch.z / norm)
}

/// The angles entering the closed-form fidelities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi {
    pub chi: f64,
    pub m: usize,
    pub n: usize,
    /// `m psi - m theta + alpha`
    pub phi_half: f64,
    /// `pi + chi + asin(2 sqrt(n - 1) / n)`, principal branch
    pub theta: f64,
    /// `acos(1 / sqrt n)`
    pub alpha: f64,
}

impl Phi {
    pub fn new(chi: f64, psi: f64, m: usize, n: usize) -> Self {
        let nf = n as f64;
        let theta = PI + chi + (2.0 * (nf - 1.0).sqrt() / nf).asin();
        let alpha = (1.0 / nf.sqrt()).acos();
        let mf = m as f64;
        Self {
            chi,
            m,
            n,
            phi_half: mf * psi - mf * theta + alpha,
            theta,
            alpha,
        }
    }
}

/// Closed-form radial and angular fidelities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormFidelities {
    /// `1/4 [1 + cos^m(2 psi) cos(phi)]`
    pub f: f64,
    /// `cos^2(phi / 2)`
    pub cos_gamma: f64,
    pub phi: Phi,
}

pub fn closed_form_fidelities(chi: NoiseStrength, m: usize, n: usize) -> Result<ClosedFormFidelities> {
    closed_form_fidelities_with(chi, m, n, PsiBranch::Principal)
}

pub fn closed_form_fidelities_with(
    chi: NoiseStrength,
    m: usize,
    n: usize,
    branch: PsiBranch,
) -> Result<ClosedFormFidelities> {
    let psi = scalar_profile(chi)?.signed_psi(branch);
    let phi = Phi::new(chi.value(), psi, m, n);
    let damping = (2.0 * psi).cos().powi(m as i32);
    Ok(ClosedFormFidelities {
        f: 0.25 * (1.0 + damping * (2.0 * phi.phi_half).cos()),
        cos_gamma: phi.phi_half.cos().powi(2),
        phi,
    })
}

/// Predicted per-iteration Bloch-norm contraction `|cos 2 psi|`.
///
/// The two Kraus operators rotate the plane by angles differing by `2 psi`,
/// i.e. Bloch rotations differing by `4 psi`; their equal mixture is
/// `cos(2 psi)` times the mean rotation.
pub fn bloch_contraction_factor(chi: NoiseStrength) -> Result<f64> {
    Ok((2.0 * scalar_profile(chi)?.psi).cos().abs())
}

/// Von Neumann entropy in nats; eigenvalues below `1e-14` count as zero.
pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(spectrum_entropy(&rho.spectrum()?))
}

pub fn spectrum_entropy(spectrum: &Spectrum) -> f64 {
    spectrum
        .values()
        .iter()
        .filter(|&&p| p > tolerance::EIGEN_CLIP)
        .map(|&p| -p * p.ln())
        .sum()
}

/// `after ≺ before`: every descending partial sum of `after` is at most that
/// of `before`, and the totals agree.
pub fn majorization_check(after: &Spectrum, before: &Spectrum) -> Result<bool> {
    if after.dim() != before.dim() {
        return Err(Error::LengthMismatch(after.dim(), before.dim()));
    }
    for s in [after, before] {
        if (s.sum() - 1.0).abs() > 1e-8 {
            return Err(Error::UnnormalizedSpectrum(s.sum()));
        }
    }
    let mut sum_after = 0.0;
    let mut sum_before = 0.0;
    for (a, b) in after.values().iter().zip(before.values()) {
        sum_after += a;
        sum_before += b;
        if sum_after > sum_before + tolerance::MAJORIZATION {
            return Ok(false);
        }
    }
    Ok((sum_after - sum_before).abs() <= 1e-8)
}

/// Simulated and closed-form figures of merit at one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub m: usize,
    pub f_paper: f64,
    pub p_success: f64,
    /// `None` when the Bloch vector vanishes.
    pub cos_gamma: Option<f64>,
    pub bloch_norm: f64,
    pub f_closed: f64,
    pub cos_gamma_closed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub instance: SearchInstance,
    pub points: Vec<FidelityPoint>,
    /// Nats.
    pub entropies: Vec<f64>,
    pub spectra: Vec<Spectrum>,
    /// Step `k` majorized by step `k - 1` (true at `k = 0`).
    pub majorized_by_prev: Vec<bool>,
    /// Step `k` majorized by the initial state.
    pub majorized_by_init: Vec<bool>,
    /// Largest trace deviation seen along the trajectory.
    pub max_trace_error: f64,
    /// Most negative eigenvalue seen along the trajectory.
    pub min_eigenvalue: f64,
}

impl TrajectoryReport {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn majorization_ok(&self) -> Vec<bool> {
        self.majorized_by_prev
            .iter()
            .zip(&self.majorized_by_init)
            .map(|(&a, &b)| a && b)
            .collect()
    }

    /// `|b_{k+1}| / |b_k|` while `|b_{k+1}|` stays above [`RATIO_FLOOR`].
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .take_while(|w| w[1].bloch_norm > RATIO_FLOOR)
            .map(|w| w[1].bloch_norm / w[0].bloch_norm)
            .collect()
    }

    /// Whether entropy never decreases by more than `tol`.
    pub fn entropy_non_decreasing(&self, tol: f64) -> bool {
        self.entropies.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    pub fn states_valid(&self) -> bool {
        self.max_trace_error <= tolerance::UNITARITY && self.min_eigenvalue >= -tolerance::UNITARITY
    }
}

/// Runs `m_max` iterations from `|s><s|` and records every figure of merit.
pub fn trajectory_report(inst: &SearchInstance, m_max: usize) -> Result<TrajectoryReport> {
    let channel = build_search_channel(inst)?;
    let n = inst.n();
    let mut report = TrajectoryReport {
        instance: *inst,
        points: Vec::with_capacity(m_max + 1),
        entropies: Vec::with_capacity(m_max + 1),
        spectra: Vec::with_capacity(m_max + 1),
        majorized_by_prev: Vec::with_capacity(m_max + 1),
        majorized_by_init: Vec::with_capacity(m_max + 1),
        max_trace_error: 0.0,
        min_eigenvalue: 0.0,
    };

    for (m, state) in channel.trajectory(uniform_state(n)).take(m_max + 1).enumerate() {
        let state = state?;
        let radial = radial_fidelity(&state, inst)?;
        let bloch = bloch_from_density(&state, inst)?;
        let closed = closed_form_fidelities_with(inst.chi(), m, n, inst.branch())?;
        report.points.push(FidelityPoint {
            m,
            f_paper: radial.f_paper,
            p_success: radial.p_success,
            cos_gamma: cos_to_target(bloch).ok(),
            bloch_norm: bloch.norm(),
            f_closed: closed.f,
            cos_gamma_closed: closed.cos_gamma,
        });

        let spectrum = trajectory_spectrum(&state, inst)?;
        report.max_trace_error = report.max_trace_error.max((state.matrix().trace().re - 1.0).abs());
        report.min_eigenvalue = report.min_eigenvalue.min(spectrum.min());
        report.entropies.push(spectrum_entropy(&spectrum));
        let by_prev = match report.spectra.last() {
            Some(prev) => majorization_check(&spectrum, prev)?,
            None => true,
        };
        let by_init = majorization_check(&spectrum, report.spectra.first().unwrap_or(&spectrum))?;
        report.majorized_by_prev.push(by_prev);
        report.majorized_by_init.push(by_init);
        report.spectra.push(spectrum);
    }
    Ok(report)
}

/// Full spectrum for moderate `n`; above that, the plane block's eigenvalues
/// padded with zeros (exact for plane-supported states).
fn trajectory_spectrum(state: &DensityMatrix, inst: &SearchInstance) -> Result<Spectrum> {
    if inst.n() <= FULL_SPECTRUM_MAX_N {
        return state.spectrum();
    }
    let block = plane_block(state, inst)?;
    let mut values = eigvals_hermitian(&block.hermitian_part())?.values().to_vec();
    values.resize(inst.n(), 0.0);
    Ok(Spectrum::new(values))
}

fn check_dim(rho: &DensityMatrix, inst: &SearchInstance) -> Result<()> {
    if rho.dim() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            got: rho.dim(),
        });
    }
    Ok(())
}
