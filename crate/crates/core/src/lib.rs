//! Simulation of Grover search under environment-induced phase damping.
//!
//! The noisy pi/4 rotation is built from a qubit environment coupled to the
//! system, preconditioned to its nearest mixed-unitary channel, and embedded
//! in the N-item search plane. [`analysis`] then tracks success probability,
//! Bloch-vector damping, entropy and majorization along the iteration.
//!
//! ```
//! use noisy_grover::{analysis, noise, search};
//!
//! let chi = noise::chi_star(1).unwrap();
//! let inst = search::SearchInstance::new(64, 0, chi).unwrap();
//! let report = analysis::trajectory_report(&inst, 32).unwrap();
//! let best = report.points.iter().map(|p| p.p_success).fold(0.0, f64::max);
//! assert!(best > 0.95);
//! ```

#![forbid(unsafe_code)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod search;
pub mod tolerance;

pub use channel::{channel_choi_distance, choi_matrix, choi_of_map, compose_channels, KrausChannel};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Spectrum};
pub use noise::{NoiseStrength, PsiBranch, ScalarProfile};
pub use search::{DensityMatrix, SearchChannel, SearchInstance};

pub use num_complex::Complex64;
