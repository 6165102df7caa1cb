use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("transmission {0} is outside [0, 1]")]
    InvalidTransmission(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state is not physical: {0}")]
    Unphysical(String),

    #[error(
        "insensitive operating point (phi = {phi}, phi_p = {phi_p}, phi_c = {phi_c}): \
         |d<X>/dphi| = {slope:e}"
    )]
    SlopeZero {
        phi: f64,
        phi_p: f64,
        phi_c: f64,
        slope: f64,
    },

    #[error("degenerate measurement noise: variance {0:e}")]
    DegenerateNoise(f64),

    #[error("Fock truncation inadequate at cutoff {cutoff}: norm deficit {deficit:e} exceeds {tolerance:e}")]
    TruncationInadequate {
        cutoff: usize,
        deficit: f64,
        tolerance: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad inputs rather than by the computation
    /// reaching a degenerate point.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidTransmission(_) | Error::InvalidParameter { .. } | Error::Unphysical(_)
        )
    }
}

pub(crate) fn check_transmission(eta: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&eta) {
        Ok(eta)
    } else {
        Err(Error::InvalidTransmission(eta))
    }
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::param(name, format!("must be finite, got {value}")))
    }
}
