//! Signal chain of the full and truncated SU(1,1) interferometers and the
//! phase-estimation variance of their detection schemes.
//!
//! The chain is: coherent seed → squeezer `r` → phase `φ` on the probe →
//! internal loss `(η_p1, η_c1)` → squeezer `s` → external loss `(η_p2, η_c2)`.
//! Everything after the phase object is a fixed [`GaussianChannel`], which
//! lets the homodyne statistics be evaluated cheaply at many phases.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_transmission, Error, Result};
use crate::gaussian::{homodyne_weights, GaussianChannel, GaussianState, Mode, Vec4};
use crate::PHASE_STEP;

/// Slopes below this fraction of the largest slope the operating point could
/// reach are treated as zero; finite-difference round-off sits far below it.
const RELATIVE_SLOPE_FLOOR: f64 = 1e-9;
const ABSOLUTE_SLOPE_FLOOR: f64 = 1e-12;
/// Direct-detection scans stay this far (rad) from `φ = 0`, where the dark
/// port makes the signal vanish.
pub const DIRECT_PHASE_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerConfig {
    /// First squeezer.
    pub r: f64,
    /// Second squeezer; 0 for the truncated interferometer.
    pub s: f64,
    /// Phase object on the probe arm (rad).
    pub phi: f64,
    pub eta_p1: f64,
    pub eta_c1: f64,
    pub eta_p2: f64,
    pub eta_c2: f64,
    /// Local-oscillator phases (rad).
    pub phi_p: f64,
    pub phi_c: f64,
    /// Detector gain weights.
    pub a_p: f64,
    pub a_c: f64,
    /// Seed photon number |α|².
    pub alpha2: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self {
            r: 0.0,
            s: 0.0,
            phi: 0.0,
            eta_p1: 1.0,
            eta_c1: 1.0,
            eta_p2: 1.0,
            eta_c2: 1.0,
            phi_p: FRAC_PI_2,
            phi_c: FRAC_PI_2,
            a_p: 1.0,
            a_c: 1.0,
            alpha2: 1e6,
        }
    }
}

impl InterferometerConfig {
    /// Truncated interferometer with identical loss `eta` on both arms and no
    /// external loss, read out at the phase quadratures.
    pub fn truncated(r: f64, eta: f64, alpha2: f64) -> Self {
        Self {
            r,
            eta_p1: eta,
            eta_c1: eta,
            alpha2,
            ..Self::default()
        }
    }

    /// Sets the second squeezer and the detector weights the scheme implies.
    pub fn with_scheme(mut self, scheme: DetectionScheme) -> Self {
        self.s = scheme.second_squeezer(self.r);
        let (a_p, a_c) = scheme.gains();
        self.a_p = a_p;
        self.a_c = a_c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r", self.r),
            ("s", self.s),
            ("phi", self.phi),
            ("phi_p", self.phi_p),
            ("phi_c", self.phi_c),
        ] {
            check_finite(name, v)?;
        }
        for eta in [self.eta_p1, self.eta_c1, self.eta_p2, self.eta_c2] {
            check_transmission(eta)?;
        }
        for (name, v) in [("a_p", self.a_p), ("a_c", self.a_c), ("alpha2", self.alpha2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Seed followed by the first squeezer.
    pub fn pre_phase_state(&self) -> GaussianState {
        GaussianState::coherent_seed(Complex::new(self.alpha2.sqrt(), 0.0)).two_mode_squeeze(self.r)
    }

    /// Internal loss, second squeezer, external loss.
    pub fn post_phase_channel(&self) -> Result<GaussianChannel> {
        Ok(GaussianChannel::loss(Mode::Probe, self.eta_p1)?
            .then(&GaussianChannel::loss(Mode::Conjugate, self.eta_c1)?)
            .then(&GaussianChannel::two_mode_squeeze(self.s))
            .then(&GaussianChannel::loss(Mode::Probe, self.eta_p2)?)
            .then(&GaussianChannel::loss(Mode::Conjugate, self.eta_c2)?))
    }
}

/// The five measurement arrangements: (i)–(iv) follow a second squeezer with
/// `s = -r`, (v) reads the two-mode state out directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectionScheme {
    #[serde(rename = "i")]
    FullDualHomodyne,
    #[serde(rename = "ii")]
    FullConjHomodyne,
    #[serde(rename = "iii")]
    FullConjIntensity,
    #[serde(rename = "iv")]
    FullDualIntensity,
    #[serde(rename = "v")]
    TruncatedDualHomodyne,
}

impl DetectionScheme {
    pub const ALL: [DetectionScheme; 5] = [
        DetectionScheme::FullDualHomodyne,
        DetectionScheme::FullConjHomodyne,
        DetectionScheme::FullConjIntensity,
        DetectionScheme::FullDualIntensity,
        DetectionScheme::TruncatedDualHomodyne,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DetectionScheme::FullDualHomodyne => "i",
            DetectionScheme::FullConjHomodyne => "ii",
            DetectionScheme::FullConjIntensity => "iii",
            DetectionScheme::FullDualIntensity => "iv",
            DetectionScheme::TruncatedDualHomodyne => "v",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.label() == label)
    }

    pub fn is_homodyne(self) -> bool {
        matches!(
            self,
            DetectionScheme::FullDualHomodyne
                | DetectionScheme::FullConjHomodyne
                | DetectionScheme::TruncatedDualHomodyne
        )
    }

    pub fn is_truncated(self) -> bool {
        self == DetectionScheme::TruncatedDualHomodyne
    }

    pub fn second_squeezer(self, r: f64) -> f64 {
        if self.is_truncated() {
            0.0
        } else {
            -r
        }
    }

    /// `(A_p, A_c)`.
    pub fn gains(self) -> (f64, f64) {
        match self {
            DetectionScheme::FullConjHomodyne | DetectionScheme::FullConjIntensity => (0.0, 1.0),
            _ => (1.0, 1.0),
        }
    }
}

impl fmt::Display for DetectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    /// Δ²φ in rad².
    pub phase_variance: f64,
    /// ∂⟨X⟩/∂φ per radian.
    pub signal_slope: f64,
    /// Δ²X of the measured observable.
    pub noise_variance: f64,
    /// ⟨X⟩ at the operating point.
    pub mean_signal: f64,
    /// Probe phase at which the report was evaluated.
    pub phi: f64,
    /// `(φ_p, φ_c)`.
    pub operating_point: (f64, f64),
}

impl SensitivityReport {
    fn from_moments(
        slope: f64,
        noise: f64,
        mean: f64,
        phi: f64,
        operating_point: (f64, f64),
    ) -> Self {
        Self {
            phase_variance: noise / (slope * slope),
            signal_slope: slope,
            noise_variance: noise,
            mean_signal: mean,
            phi,
            operating_point,
        }
    }
}

/// The interferometer's output as a function of the probe phase: the state
/// before the phase object plus the channel that follows it.
#[derive(Debug, Clone)]
pub struct PhaseModel {
    pre: GaussianState,
    post: GaussianChannel,
}

impl PhaseModel {
    pub fn new(config: &InterferometerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            pre: config.pre_phase_state(),
            post: config.post_phase_channel()?,
        })
    }

    pub fn state_at(&self, phi: f64) -> GaussianState {
        self.post.apply(&self.pre.phase_shift(Mode::Probe, phi))
    }

    /// Mean and variance of `uᵀX_out` at probe phase `phi`, evaluated by
    /// pulling the weights back through the channel and the phase rotation.
    pub fn quadrature_at(&self, u: &Vec4, phi: f64) -> (f64, f64) {
        let w = self.post.x.transpose() * u;
        // Rᵀ(φ) acting on the probe block of the pulled-back weights
        let (s, c) = phi.sin_cos();
        let w = Vec4::new(c * w[0] + s * w[1], -s * w[0] + c * w[1], w[2], w[3]);
        let (mean, var) = self.pre.quadrature_stats(&w);
        (mean, var + (u.transpose() * self.post.y * u)[(0, 0)])
    }

    /// Largest slope the weights `u` could extract from the probe's
    /// displacement; the yardstick for declaring a slope zero.
    fn slope_scale(&self, u: &Vec4) -> f64 {
        let w = self.post.x.transpose() * u;
        w.fixed_rows::<2>(0).norm() * self.pre.mean().fixed_rows::<2>(0).norm()
    }

    /// Upper bound on the photon-number magnitudes the direct detectors see.
    fn photon_scale(&self) -> f64 {
        let x = self.post.x.amax();
        (1.0 + self.pre.mean().norm_squared() + self.pre.cov().trace()) * x * x
    }
}

fn slope_is_zero(slope: f64, scale: f64) -> bool {
    !slope.is_finite() || slope.abs() < ABSOLUTE_SLOPE_FLOOR + RELATIVE_SLOPE_FLOOR * scale
}

/// Precomputed homodyne moments at one probe phase, for scanning the
/// local-oscillator phases.
struct HomodyneSnapshot<'a> {
    model: &'a PhaseModel,
    phi: f64,
    plus: Vec4,
    minus: Vec4,
    state: GaussianState,
}

impl<'a> HomodyneSnapshot<'a> {
    fn new(model: &'a PhaseModel, phi: f64) -> Self {
        let h = PHASE_STEP;
        Self {
            model,
            phi,
            plus: *model.state_at(phi + h).mean(),
            minus: *model.state_at(phi - h).mean(),
            state: model.state_at(phi),
        }
    }

    fn report(&self, phi_p: f64, phi_c: f64, a_p: f64, a_c: f64) -> Result<SensitivityReport> {
        let u = homodyne_weights(phi_p, phi_c, a_p, a_c);
        let slope = (u.dot(&self.plus) - u.dot(&self.minus)) / (2.0 * PHASE_STEP);
        if slope_is_zero(slope, self.model.slope_scale(&u)) {
            return Err(Error::SlopeZero {
                phi: self.phi,
                phi_p,
                phi_c,
                slope,
            });
        }
        let (mean, noise) = self.state.quadrature_stats(&u);
        Ok(SensitivityReport::from_moments(
            slope,
            noise,
            mean,
            self.phi,
            (phi_p, phi_c),
        ))
    }
}

/// Output state of the signal chain at the configured probe phase.
pub fn build_output_state(config: &InterferometerConfig) -> Result<GaussianState> {
    Ok(PhaseModel::new(config)?.state_at(config.phi))
}

/// `Δ²φ = Var J / |∂⟨J⟩/∂φ|²` for the summed homodyne quadrature `J`, with the
/// slope from a central difference in `φ`.
pub fn phase_variance_homodyne(config: &InterferometerConfig) -> Result<SensitivityReport> {
    if config.a_p == 0.0 && config.a_c == 0.0 {
        return Err(Error::param("a_p, a_c", "at least one detector must be on"));
    }
    let model = PhaseModel::new(config)?;
    HomodyneSnapshot::new(&model, config.phi).report(config.phi_p, config.phi_c, config.a_p, config.a_c)
}

fn direct_report(
    model: &PhaseModel,
    config: &InterferometerConfig,
    phi: f64,
) -> Result<SensitivityReport> {
    let (a_p, a_c) = (config.a_p, config.a_c);
    let phases = (config.phi_p, config.phi_c);
    let h = PHASE_STEP;
    let (up, _) = model.state_at(phi + h).photon_sum_stats(a_p, a_c);
    let (down, _) = model.state_at(phi - h).photon_sum_stats(a_p, a_c);
    let slope = (up - down) / (2.0 * h);
    if slope_is_zero(slope, model.photon_scale()) {
        return Err(Error::SlopeZero {
            phi,
            phi_p: phases.0,
            phi_c: phases.1,
            slope,
        });
    }
    let (mean, noise) = model.state_at(phi).photon_sum_stats(a_p, a_c);
    Ok(SensitivityReport::from_moments(slope, noise, mean, phi, phases))
}

/// `Δ²φ = Var N / |∂⟨N⟩/∂φ|²` for `N = A_p n_p + A_c n_c`, gains in {0, 1}.
pub fn phase_variance_direct(config: &InterferometerConfig) -> Result<SensitivityReport> {
    for (name, a) in [("a_p", config.a_p), ("a_c", config.a_c)] {
        if a != 0.0 && a != 1.0 {
            return Err(Error::param(name, format!("direct detection gains must be 0 or 1, got {a}")));
        }
    }
    if config.a_p == 0.0 && config.a_c == 0.0 {
        return Err(Error::param("a_p, a_c", "at least one detector must be on"));
    }
    let model = PhaseModel::new(config)?;
    direct_report(&model, config, config.phi)
}

/// Applies the scheme's `s` and gains to `config`, then evaluates it at the
/// configured phases.
pub fn phase_variance(config: &InterferometerConfig, scheme: DetectionScheme) -> Result<SensitivityReport> {
    let config = config.with_scheme(scheme);
    if scheme.is_homodyne() {
        phase_variance_homodyne(&config)
    } else {
        phase_variance_direct(&config)
    }
}

/// Closed-form phase variances, as `|α|²·Δ²φ` (the `|α|² ≫ 1` limit).
pub mod closed_form {
    use super::*;

    #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
    #[serde(tag = "formula", rename_all = "snake_case", deny_unknown_fields)]
    pub enum ClosedForm {
        /// Truncated (or full, `s = -r`) dual homodyne with equal loss and
        /// `φ_c = π/2`.
        Truncated { eta: f64, r: f64, phi_p: f64 },
        /// Same, for arbitrary `(φ_p, φ_c)`.
        General { eta: f64, r: f64, phi_p: f64, phi_c: f64 },
        /// Full interferometer, conjugate-only detection, lossless, best point.
        ConjugateIntensity { r: f64 },
        /// Full interferometer, both intensities, lossless, best point.
        DualIntensity { r: f64 },
        /// Full interferometer, internal loss only.
        InternalLoss { r: f64, eta_int: f64 },
        /// Full interferometer, external loss only.
        ExternalLoss { r: f64, eta_ext: f64 },
    }

    fn insensitive(phi_p: f64, phi_c: f64) -> Error {
        Error::SlopeZero {
            phi: 0.0,
            phi_p,
            phi_c,
            slope: 0.0,
        }
    }

    fn positive_eta(name: &'static str, eta: f64) -> Result<f64> {
        check_transmission(eta)?;
        if eta == 0.0 {
            return Err(Error::param(name, "total loss leaves no signal"));
        }
        Ok(eta)
    }

    fn general(eta: f64, r: f64, phi_p: f64, phi_c: f64) -> Result<f64> {
        let eta = positive_eta("eta", eta)?;
        let sin_p = phi_p.sin();
        if sin_p.abs() < 1e-12 {
            return Err(insensitive(phi_p, phi_c));
        }
        let sech2 = 1.0 / r.cosh().powi(2);
        let num = 2.0 * eta + (1.0 - 2.0 * eta) * sech2 + 2.0 * eta * (phi_p + phi_c).cos() * r.tanh();
        Ok(num / (2.0 * eta * sin_p * sin_p))
    }

    impl ClosedForm {
        pub fn scaled_variance(&self) -> Result<f64> {
            match *self {
                ClosedForm::Truncated { eta, r, phi_p } => {
                    let eta = positive_eta("eta", eta)?;
                    let sin_p = phi_p.sin();
                    if sin_p.abs() < 1e-12 {
                        return Err(insensitive(phi_p, FRAC_PI_2));
                    }
                    let sech2 = 1.0 / r.cosh().powi(2);
                    let num = 2.0 * eta + (1.0 - 2.0 * eta) * sech2 - 2.0 * eta * sin_p * r.tanh();
                    Ok(num / (2.0 * eta * sin_p * sin_p))
                }
                ClosedForm::General { eta, r, phi_p, phi_c } => general(eta, r, phi_p, phi_c),
                ClosedForm::ConjugateIntensity { r } => {
                    let sh = (2.0 * r).sinh();
                    if sh == 0.0 {
                        return Err(insensitive(FRAC_PI_2, FRAC_PI_2));
                    }
                    Ok(1.0 / (sh * sh))
                }
                ClosedForm::DualIntensity { r } => {
                    let sh = (2.0 * r).sinh();
                    if sh == 0.0 {
                        return Err(insensitive(FRAC_PI_2, FRAC_PI_2));
                    }
                    let bracket = 2.0 * (4.0 * r).cosh() + (8.0 * r).cosh().sqrt() - 1.0;
                    Ok(bracket / (2.0 * sh.powi(4)))
                }
                ClosedForm::InternalLoss { r, eta_int } => {
                    let eta = positive_eta("eta_int", eta_int)?;
                    let t = r.tanh();
                    Ok((-r).exp() / r.cosh() * (1.0 + t - 2.0 * eta * t) / (2.0 * eta))
                }
                ClosedForm::ExternalLoss { r, eta_ext } => {
                    let eta = positive_eta("eta_ext", eta_ext)?;
                    let d = 1.0 + (2.0 * r).cosh() + (2.0 * r).sinh();
                    Ok(2.0 / (eta * d * d))
                }
            }
        }
    }

    /// Δ²φ in rad² for `alpha2` seed photons.
    pub fn closed_form_sensitivity(form: &ClosedForm, alpha2: f64) -> Result<f64> {
        if !(alpha2.is_finite() && alpha2 > 0.0) {
            return Err(Error::param("alpha2", format!("must be > 0, got {alpha2}")));
        }
        Ok(form.scaled_variance()? / alpha2)
    }

    /// Lossless best-operating-point closed form of a scheme.
    pub fn for_scheme(scheme: DetectionScheme, r: f64) -> ClosedForm {
        match scheme {
            DetectionScheme::FullDualHomodyne | DetectionScheme::TruncatedDualHomodyne => {
                ClosedForm::Truncated {
                    eta: 1.0,
                    r,
                    phi_p: FRAC_PI_2,
                }
            }
            DetectionScheme::FullConjHomodyne | DetectionScheme::FullConjIntensity => {
                ClosedForm::ConjugateIntensity { r }
            }
            DetectionScheme::FullDualIntensity => ClosedForm::DualIntensity { r },
        }
    }
}

pub use closed_form::{closed_form_sensitivity, ClosedForm};

/// Grid sizes of the operating-point search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Points per local-oscillator phase axis.
    pub homodyne_points: usize,
    /// Points over the probe phase for direct detection.
    pub direct_points: usize,
    /// Rounds of coordinate-wise golden-section refinement.
    pub refine_rounds: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            homodyne_points: 360,
            direct_points: 3600,
            refine_rounds: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub phi: f64,
    pub phi_p: f64,
    pub phi_c: f64,
    pub report: SensitivityReport,
}

/// Minimum of `f` on `[lo, hi]`; `None` values count as +∞.
fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Option<f64>) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let eval = |x: f64| f(x).unwrap_or(f64::INFINITY);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    while (hi - lo).abs() > 1e-11 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Best operating point of `scheme` for `config`.
///
/// Homodyne schemes scan `(φ_p, φ_c)` at the configured probe phase. Because
/// flipping both local oscillators by π only flips the sign of `J`, `φ_p` is
/// scanned over `[0, π)` and `φ_c` over `[-π, π)`. Direct-detection schemes
/// scan the probe phase `φ` instead, keeping [`DIRECT_PHASE_FLOOR`] away from
/// the insensitive point `φ = 0`. Grid minima are polished by golden-section
/// search within one grid step.
pub fn optimal_operating_point(
    config: &InterferometerConfig,
    scheme: DetectionScheme,
    options: &ScanOptions,
) -> Result<OperatingPoint> {
    let config = config.with_scheme(scheme);
    let model = PhaseModel::new(&config)?;
    if scheme.is_homodyne() {
        optimal_homodyne(&model, &config, options)
    } else {
        optimal_direct(&model, &config, options)
    }
}

fn optimal_homodyne(
    model: &PhaseModel,
    config: &InterferometerConfig,
    options: &ScanOptions,
) -> Result<OperatingPoint> {
    let snap = HomodyneSnapshot::new(model, config.phi);
    let (a_p, a_c) = (config.a_p, config.a_c);
    let objective = |pp: f64, pc: f64| snap.report(pp, pc, a_p, a_c).ok().map(|r| r.phase_variance);

    let n = options.homodyne_points.max(2);
    let step_p = PI / n as f64;
    let step_c = 2.0 * PI / n as f64;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..n {
        let pp = i as f64 * step_p;
        for j in 0..n {
            let pc = -PI + j as f64 * step_c;
            if let Some(v) = objective(pp, pc) {
                if best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((pp, pc, v));
                }
            }
        }
    }
    let (mut pp, mut pc, _) = best.ok_or(Error::SlopeZero {
        phi: config.phi,
        phi_p: config.phi_p,
        phi_c: config.phi_c,
        slope: 0.0,
    })?;
    for _ in 0..options.refine_rounds {
        pp = golden_section(pp - step_p, pp + step_p, |x| objective(x, pc)).0;
        pc = golden_section(pc - step_c, pc + step_c, |x| objective(pp, x)).0;
    }
    let report = snap.report(pp, pc, a_p, a_c)?;
    Ok(OperatingPoint {
        phi: config.phi,
        phi_p: pp,
        phi_c: pc,
        report,
    })
}

fn optimal_direct(
    model: &PhaseModel,
    config: &InterferometerConfig,
    options: &ScanOptions,
) -> Result<OperatingPoint> {
    let objective = |phi: f64| {
        if phi.abs() < DIRECT_PHASE_FLOOR {
            return None;
        }
        direct_report(model, config, phi).ok().map(|r| r.phase_variance)
    };
    let n = options.direct_points.max(2);
    let step = 2.0 * PI / n as f64;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..n {
        let phi = -PI + i as f64 * step;
        if let Some(v) = objective(phi) {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((phi, v));
            }
        }
    }
    let (mut phi, _) = best.ok_or(Error::SlopeZero {
        phi: config.phi,
        phi_p: config.phi_p,
        phi_c: config.phi_c,
        slope: 0.0,
    })?;
    let (mut lo, mut hi) = (phi - step, phi + step);
    // keep the bracket on one side of the dark point
    if phi > 0.0 {
        lo = lo.max(DIRECT_PHASE_FLOOR);
    } else {
        hi = hi.min(-DIRECT_PHASE_FLOOR);
    }
    phi = golden_section(lo, hi, objective).0;
    let report = direct_report(model, config, phi)?;
    Ok(OperatingPoint {
        phi,
        phi_p: config.phi_p,
        phi_c: config.phi_c,
        report,
    })
}

/// One gain value of the lossless sensitivity-versus-gain comparison. Values
/// are `|α|²·Δ²φ`; `None` marks schemes with no phase signal at this gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Row {
    pub gain: f64,
    pub schemes: Vec<DetectionScheme>,
    pub closed_form: Vec<Option<f64>>,
    pub numeric: Vec<Option<f64>>,
    /// `|α|²/F_Q`.
    pub qfi_bound: f64,
}

/// Lossless best-point sensitivities of `schemes` over `gains`, closed form
/// and numeric (at `alpha2` seed photons).
pub fn figure2_table(
    gains: &[f64],
    schemes: &[DetectionScheme],
    alpha2: f64,
    options: &ScanOptions,
) -> Result<Vec<Figure2Row>> {
    use rayon::prelude::*;
    gains
        .par_iter()
        .map(|&gain| {
            let r = crate::gaussian::SqueezeSpec::from_gain(gain)?.r();
            let config = InterferometerConfig {
                r,
                alpha2,
                ..InterferometerConfig::default()
            };
            let mut closed = Vec::with_capacity(schemes.len());
            let mut numeric = Vec::with_capacity(schemes.len());
            for &scheme in schemes {
                closed.push(closed_form::for_scheme(scheme, r).scaled_variance().ok());
                numeric.push(match optimal_operating_point(&config, scheme, options) {
                    Ok(op) => Some(op.report.phase_variance * alpha2),
                    Err(Error::SlopeZero { .. }) => None,
                    Err(e) => return Err(e),
                });
            }
            Ok(Figure2Row {
                gain,
                schemes: schemes.to_vec(),
                closed_form: closed,
                numeric,
                qfi_bound: alpha2 / crate::fisher::qfi(r, alpha2),
            })
        })
        .collect()
}
