//! The chi-parametrized phase-damping noise on the pi/4 rotation.
//!
//! The environment is a qubit prepared in `|0>` and coupled through
//! `H = (pi/4) sigma_y (x) 1 + (chi/2)(1 - sigma_z) (x) sigma_y`.
//! Tracing it out after `U = exp(iH)` yields a two-operator Kraus channel.
//! Three representations live here:
//!
//! * [`hamiltonian_kraus`]: numerical extraction from `exp(iH)`, the ground truth.
//! * [`closed_form_kraus`]: the printed closed form in terms of `mu`, `delta`.
//!   It is kept verbatim; [`closed_form_choi_gap`] measures how far it is
//!   from the Hamiltonian channel.
//! * [`nearest_unitary_pair`]: the preconditioned mixed-unitary channel
//!   `{V0, V1}` with weights 1/2, cross-checked by [`nearest_unitary_oracle`].

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_choi_distance, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{
    kron, matexp_i_hermitian, partial_trace_env, polar_unitary_factor, sigma_y, sigma_y_rotation, sigma_z,
    ComplexMatrix,
};

/// Below this both terms of the psi relation vanish and psi is undefined.
const PSI_DEGENERACY: f64 = 1e-14;

/// Environment coupling strength `chi >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NoiseStrength(f64);

impl NoiseStrength {
    pub fn new(chi: f64) -> Result<Self> {
        if chi.is_finite() && chi >= 0.0 {
            Ok(Self(chi))
        } else {
            Err(Error::NegativeStrength(chi))
        }
    }

    pub const fn zero() -> Self {
        Self(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for NoiseStrength {
    type Error = Error;

    fn try_from(chi: f64) -> Result<Self> {
        Self::new(chi)
    }
}

impl From<NoiseStrength> for f64 {
    fn from(chi: NoiseStrength) -> f64 {
        chi.0
    }
}

/// Sign convention for psi. Only `cos^2 psi` is pinned down, so the
/// negative branch is kept available for comparison sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiBranch {
    #[default]
    Principal,
    Negated,
}

impl PsiBranch {
    pub fn apply(self, psi: f64) -> f64 {
        match self {
            PsiBranch::Principal => psi,
            PsiBranch::Negated => -psi,
        }
    }
}

/// The scalar functions of chi that parametrize every Kraus form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarProfile {
    pub chi: f64,
    /// `sqrt(chi^2/4 + pi^2/16)`
    pub mu: f64,
    /// `sin(mu) / mu`
    pub delta: f64,
    /// Principal root in `[0, pi/2]` of
    /// `[cos^2 mu + (chi^2/4) delta^2] cos^2 psi = cos^2 mu`.
    pub psi: f64,
}

impl ScalarProfile {
    pub fn signed_psi(&self, branch: PsiBranch) -> f64 {
        branch.apply(self.psi)
    }
}

pub fn scalar_profile(chi: NoiseStrength) -> Result<ScalarProfile> {
    let chi = chi.value();
    let mu = (chi * chi / 4.0 + PI * PI / 16.0).sqrt();
    let delta = mu.sin() / mu;
    let cos_mu = mu.cos().abs();
    let coupling = (chi / 2.0 * delta).abs();
    if cos_mu * cos_mu < PSI_DEGENERACY && coupling * coupling < PSI_DEGENERACY {
        return Err(Error::Indeterminate { chi });
    }
    // tan psi = |chi delta / 2| / |cos mu|, equivalent to the cos^2 relation
    // but without the acos loss of precision near psi = 0.
    let psi = coupling.atan2(cos_mu);
    Ok(ScalarProfile { chi, mu, delta, psi })
}

/// The closed-form pair `R0 = (cos mu 1 + (i chi/2) delta sigma_y) e^{-i chi/2 sigma_y}`,
/// `R1 = (pi/4) delta e^{-i chi/2 sigma_y}`, exactly as printed.
pub fn closed_form_kraus(chi: NoiseStrength) -> KrausChannel {
    let x = chi.value();
    let mu = (x * x / 4.0 + PI * PI / 16.0).sqrt();
    let delta = mu.sin() / mu;
    let twist = sigma_y_rotation(-x / 2.0);
    let prefactor =
        ComplexMatrix::identity(2).scale_real(mu.cos()) + sigma_y().scale(Complex64::new(0.0, x / 2.0 * delta));
    let r0 = prefactor * &twist;
    let r1 = twist.scale_real(FRAC_PI_4 * delta);
    KrausChannel::new(vec![r0, r1]).expect("two 2x2 operators")
}

/// The 4x4 system-environment Hamiltonian, system on the left factor.
pub fn coupling_hamiltonian(chi: NoiseStrength) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let rotation = kron(&sigma_y(), &id).scale_real(FRAC_PI_4);
    let env = kron(&(&id - &sigma_z()), &sigma_y()).scale_real(chi.value() / 2.0);
    rotation + env
}

/// `R_i = <i|_env exp(iH) |0>_env` for `i = 0, 1`.
pub fn hamiltonian_kraus(chi: NoiseStrength) -> KrausChannel {
    let u = matexp_i_hermitian(&coupling_hamiltonian(chi)).expect("coupling Hamiltonian is Hermitian");
    let ops = (0..2)
        .map(|i| partial_trace_env(&u, 2, 2, i, 0).expect("4 = 2 x 2"))
        .collect();
    KrausChannel::new(ops).expect("two 2x2 operators")
}

/// Choi distance between the printed closed form and the Hamiltonian channel.
pub fn closed_form_choi_gap(chi: NoiseStrength) -> f64 {
    channel_choi_distance(&closed_form_kraus(chi), &hamiltonian_kraus(chi)).expect("both 2x2")
}

/// `V0 = e^{i(psi - chi/2) sigma_y}`, `V1 = e^{-i chi/2 sigma_y}`, each with weight 1/2.
pub fn nearest_unitary_pair(chi: NoiseStrength) -> Result<KrausChannel> {
    nearest_unitary_pair_with(chi, PsiBranch::Principal)
}

pub fn nearest_unitary_pair_with(chi: NoiseStrength, branch: PsiBranch) -> Result<KrausChannel> {
    let [v0, v1] = nearest_unitary_angles(chi, branch)?;
    KrausChannel::weighted(vec![sigma_y_rotation(v0), sigma_y_rotation(v1)], vec![0.5, 0.5])
}

/// Rotation angles `a_i` with `V_i = exp(i a_i sigma_y)`.
pub fn nearest_unitary_angles(chi: NoiseStrength, branch: PsiBranch) -> Result<[f64; 2]> {
    let profile = scalar_profile(chi)?;
    let half = chi.value() / 2.0;
    Ok([profile.signed_psi(branch) - half, -half])
}

/// Polar factors of the closed-form Kraus operators, weights 1/2 each.
///
/// Fails with [`Error::DegeneratePolar`] when an operator is singular, as
/// `R1` is at every magic strength.
pub fn nearest_unitary_oracle(chi: NoiseStrength) -> Result<KrausChannel> {
    let closed = closed_form_kraus(chi);
    let factors = closed
        .operators()
        .iter()
        .map(polar_unitary_factor)
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::weighted(factors, vec![0.5, 0.5])
}

/// Per-operator comparison of the polar factors against `V0, V1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearestUnitaryComparison {
    pub chi: f64,
    /// Frobenius distance `|W_i - V_i|`; `None` where the polar factor is undefined.
    pub raw: [Option<f64>; 2],
    /// Same distance after the optimal global phase on `V_i`.
    pub phase_aligned: [Option<f64>; 2],
}

impl NearestUnitaryComparison {
    /// Largest phase-aligned distance over the operators that were comparable.
    pub fn worst_aligned(&self) -> f64 {
        self.phase_aligned.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn compare_nearest_unitaries(chi: NoiseStrength, branch: PsiBranch) -> Result<NearestUnitaryComparison> {
    let pair = nearest_unitary_pair_with(chi, branch)?;
    let closed = closed_form_kraus(chi);
    let mut raw = [None; 2];
    let mut phase_aligned = [None; 2];
    for (i, (r, v)) in closed.operators().iter().zip(pair.operators()).enumerate() {
        match polar_unitary_factor(r) {
            Ok(w) => {
                raw[i] = Some((&w - v).frobenius_norm());
                phase_aligned[i] = Some(w.phase_aligned_distance(v));
            }
            Err(Error::DegeneratePolar { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(NearestUnitaryComparison {
        chi: chi.value(),
        raw,
        phase_aligned,
    })
}

/// Magic strength `chi_n = pi sqrt(4 n^2 - 1/4)`, where `psi` vanishes.
/// Returns `None` for `n = 0`.
pub fn chi_star(n: u32) -> Option<NoiseStrength> {
    if n == 0 {
        return None;
    }
    let n = f64::from(n);
    Some(NoiseStrength(PI * (4.0 * n * n - 0.25).sqrt()))
}

/// Grid points in `[start, stop]` that are local minima of `psi` with
/// `psi < threshold`. Endpoints count when they are one-sided minima.
pub fn locate_psi_zeros(start: f64, stop: f64, step: f64, threshold: f64) -> Result<Vec<f64>> {
    let count = ((stop - start) / step).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
    let psi = grid
        .iter()
        .map(|&chi| NoiseStrength::new(chi).and_then(scalar_profile).map(|p| p.psi))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..count)
        .filter(|&i| {
            let left = i == 0 || psi[i] <= psi[i - 1];
            let right = i + 1 == count || psi[i] <= psi[i + 1];
            left && right && psi[i] < threshold
        })
        .map(|i| grid[i])
        .collect())
}
