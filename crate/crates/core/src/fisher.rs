//! Quantum and classical Fisher information of the seeded two-mode squeezed
//! probe with the phase object on the seeded arm.

use serde::{Deserialize, Serialize};

use crate::detection::{InterferometerConfig, PhaseModel};
use crate::error::{Error, Result};
use crate::gaussian::homodyne_weights;
use crate::PHASE_STEP;

/// Homodyne noise variances below this are treated as degenerate.
const MIN_NOISE_VARIANCE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    /// Quantum Fisher information of the lossless state with the same `r` and
    /// seed, rad⁻².
    pub qfi: f64,
    /// Classical Fisher information of the joint homodyne outcome, rad⁻².
    pub cfi: f64,
    /// `(∂⟨X⟩)²/Δ²X`, the inverse of the SNR-based phase variance.
    pub snr_term: f64,
    /// `2(∂ΔX)²/Δ²X`, information carried by the phase dependence of the noise.
    pub dist_term: f64,
}

/// `F_Q = 2cosh²r [(1 + 2|α|²) cosh 2r - 1]`, i.e. four times the photon-number
/// variance of the probe arm after the first squeezer.
pub fn qfi(r: f64, alpha2: f64) -> f64 {
    2.0 * r.cosh().powi(2) * ((1.0 + 2.0 * alpha2) * (2.0 * r).cosh() - 1.0)
}

/// Fisher information of the Gaussian joint-quadrature outcome
/// `X ~ N(⟨X⟩(φ), Δ²X(φ))`: `F_C = [(∂⟨X⟩)² + 2(∂ΔX)²]/Δ²X`, derivatives by
/// central difference in the probe phase.
pub fn cfi_homodyne(config: &InterferometerConfig) -> Result<FisherReport> {
    if config.a_p == 0.0 && config.a_c == 0.0 {
        return Err(Error::param("a_p, a_c", "at least one detector must be on"));
    }
    let model = PhaseModel::new(config)?;
    let u = homodyne_weights(config.phi_p, config.phi_c, config.a_p, config.a_c);
    let h = PHASE_STEP;
    let (_, var) = model.quadrature_at(&u, config.phi);
    if var.is_nan() || var < MIN_NOISE_VARIANCE {
        return Err(Error::DegenerateNoise(var));
    }
    let (m_up, v_up) = model.quadrature_at(&u, config.phi + h);
    let (m_down, v_down) = model.quadrature_at(&u, config.phi - h);
    let d_mean = (m_up - m_down) / (2.0 * h);
    let d_sd = (v_up.sqrt() - v_down.sqrt()) / (2.0 * h);
    let snr_term = d_mean * d_mean / var;
    let dist_term = 2.0 * d_sd * d_sd / var;
    Ok(FisherReport {
        qfi: qfi(config.r, config.alpha2),
        cfi: snr_term + dist_term,
        snr_term,
        dist_term,
    })
}
