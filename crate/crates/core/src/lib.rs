//! Phase-sensitivity engine for seeded SU(1,1)-type interferometers.
//!
//! The crate models a coherent seed and a vacuum mode passing through a
//! two-mode squeezer, a phase object on the seeded (probe) arm, internal
//! loss, an optional second squeezer and external loss. On top of the
//! Gaussian state model it provides:
//!
//! - [`detection`]: phase-estimation variance of the five detection
//!   arrangements, both numerically and from closed forms;
//! - [`fisher`]: quantum and classical Fisher information;
//! - [`snri`]: coherent baselines, the standard quantum limit and
//!   SNR-improvement curves and maps;
//! - [`experiment`]: a Monte-Carlo homodyne measurement chain with a
//!   Welch-periodogram SNR estimator and the SQL photon-number calibration;
//! - [`fock`]: a truncated Fock-space brute-force oracle used to validate
//!   the Gaussian model.
//!
//! Quadratures follow `x = a + a†`, `p = -i(a - a†)`, so the vacuum has unit
//! variance. Mode order is always (probe, conjugate).

pub mod detection;
pub mod error;
pub mod experiment;
pub mod fisher;
pub mod fock;
pub mod gaussian;
pub mod snri;

pub use detection::{DetectionScheme, InterferometerConfig, SensitivityReport};
pub use error::{Error, Result};
pub use fisher::FisherReport;
pub use gaussian::{GaussianChannel, GaussianState, Mode, SqueezeSpec};

/// Step of the central finite differences taken with respect to the probe
/// phase, shared by the detection and Fisher-information code.
pub const PHASE_STEP: f64 = 1e-5;
