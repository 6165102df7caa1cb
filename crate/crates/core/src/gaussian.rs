//! Two-mode Gaussian states and the channels that act on them.
//!
//! A state is a mean vector and a covariance matrix over the quadratures
//! `(x_p, p_p, x_c, p_c)`, with `x = a + a†` and `p = -i(a - a†)`. The vacuum
//! therefore has `cov = I`. Every channel used by the interferometer is of the
//! form `mean -> X mean`, `cov -> X cov Xᵀ + Y`, see [`GaussianChannel`].

use nalgebra::{Complex, Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_transmission, Error, Result};

pub type Vec4 = Vector4<f64>;
pub type Mat4 = Matrix4<f64>;

/// Entrywise symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Lower bound on the eigenvalues of `cov + iΩ` accepted as physical.
pub const PHYSICALITY_TOL: f64 = -1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Probe,
    Conjugate,
}

impl Mode {
    /// Offset of the mode's `(x, p)` pair in the quadrature vector.
    pub fn offset(self) -> usize {
        match self {
            Mode::Probe => 0,
            Mode::Conjugate => 2,
        }
    }

    pub fn other(self) -> Mode {
        match self {
            Mode::Probe => Mode::Conjugate,
            Mode::Conjugate => Mode::Probe,
        }
    }
}

/// Squeezing strength of a two-mode squeezer, stored as `r` with
/// gain `G = cosh²(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    r: f64,
}

impl SqueezeSpec {
    /// Any finite `r`; negative values describe the inverse squeezer.
    pub fn from_r(r: f64) -> Result<Self> {
        check_finite("r", r)?;
        Ok(Self { r })
    }

    /// The non-negative `r = acosh(√G)` for a gain `G ≥ 1`.
    pub fn from_gain(gain: f64) -> Result<Self> {
        if !(gain.is_finite() && gain >= 1.0) {
            return Err(Error::param("gain", format!("must be >= 1, got {gain}")));
        }
        Ok(Self {
            r: gain.sqrt().acosh(),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gain(&self) -> f64 {
        self.r.cosh().powi(2)
    }
}

/// `Ω = ⊕ [[0, 1], [-1, 0]]` for the two modes.
pub fn symplectic_form() -> Mat4 {
    let mut omega = Mat4::zeros();
    for k in [0, 2] {
        omega[(k, k + 1)] = 1.0;
        omega[(k + 1, k)] = -1.0;
    }
    omega
}

/// Quadrature matrix of `a -> a cosh r + b† sinh r`, `b -> b cosh r + a† sinh r`.
pub fn two_mode_squeeze_matrix(r: f64) -> Mat4 {
    let (c, s) = (r.cosh(), r.sinh());
    #[rustfmt::skip]
    let m = Mat4::new(
        c,   0.0, s,   0.0,
        0.0, c,   0.0, -s,
        s,   0.0, c,   0.0,
        0.0, -s,  0.0, c,
    );
    m
}

/// Quadrature matrix of `a -> a e^{iφ}` on one mode.
pub fn phase_shift_matrix(mode: Mode, phi: f64) -> Mat4 {
    let mut m = Mat4::identity();
    let k = mode.offset();
    let (s, c) = phi.sin_cos();
    m[(k, k)] = c;
    m[(k, k + 1)] = -s;
    m[(k + 1, k)] = s;
    m[(k + 1, k + 1)] = c;
    m
}

/// Weight vector of `A_p (x_p cos φ_p + p_p sin φ_p) + A_c (x_c cos φ_c + p_c sin φ_c)`,
/// i.e. the summed homodyne quadratures `e^{-iφ}a + e^{iφ}a†` of both arms.
pub fn homodyne_weights(phi_p: f64, phi_c: f64, gain_p: f64, gain_c: f64) -> Vec4 {
    let (sp, cp) = phi_p.sin_cos();
    let (sc, cc) = phi_c.sin_cos();
    Vec4::new(gain_p * cp, gain_p * sp, gain_c * cc, gain_c * sc)
}

/// A Gaussian channel `mean -> X mean`, `cov -> X cov Xᵀ + Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    pub x: Mat4,
    pub y: Mat4,
}

impl GaussianChannel {
    pub fn identity() -> Self {
        Self {
            x: Mat4::identity(),
            y: Mat4::zeros(),
        }
    }

    pub fn symplectic(s: Mat4) -> Self {
        Self {
            x: s,
            y: Mat4::zeros(),
        }
    }

    pub fn two_mode_squeeze(r: f64) -> Self {
        Self::symplectic(two_mode_squeeze_matrix(r))
    }

    pub fn phase_shift(mode: Mode, phi: f64) -> Self {
        Self::symplectic(phase_shift_matrix(mode, phi))
    }

    /// Beamsplitter of transmission `eta` mixing vacuum into `mode`.
    pub fn loss(mode: Mode, eta: f64) -> Result<Self> {
        check_transmission(eta)?;
        let k = mode.offset();
        let mut x = Mat4::identity();
        let mut y = Mat4::zeros();
        let t = eta.sqrt();
        for i in k..k + 2 {
            x[(i, i)] = t;
            y[(i, i)] = 1.0 - eta;
        }
        Ok(Self { x, y })
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &GaussianChannel) -> GaussianChannel {
        GaussianChannel {
            x: next.x * self.x,
            y: next.x * self.y * next.x.transpose() + next.y,
        }
    }

    pub fn apply(&self, state: &GaussianState) -> GaussianState {
        GaussianState {
            mean: self.x * state.mean,
            cov: self.x * state.cov * self.x.transpose() + self.y,
        }
    }
}

/// Mean quadrature vector and covariance matrix of the two optical modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: Vec4,
    cov: Mat4,
}

impl GaussianState {
    /// Validates symmetry and `cov + iΩ ≥ 0`.
    pub fn new(mean: Vec4, cov: Mat4) -> Result<Self> {
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Unphysical("non-finite moments".into()));
        }
        let asym = (cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::Unphysical(format!(
                "covariance asymmetric by {asym:e}"
            )));
        }
        let state = Self { mean, cov };
        let min_eig = state.min_uncertainty_eigenvalue();
        if min_eig < PHYSICALITY_TOL {
            return Err(Error::Unphysical(format!(
                "cov + iΩ has eigenvalue {min_eig:e}"
            )));
        }
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self {
            mean: Vec4::zeros(),
            cov: Mat4::identity(),
        }
    }

    /// Coherent state `|α⟩` in the probe, vacuum in the conjugate.
    pub fn coherent_seed(alpha: Complex<f64>) -> Self {
        Self {
            mean: Vec4::new(2.0 * alpha.re, 2.0 * alpha.im, 0.0, 0.0),
            cov: Mat4::identity(),
        }
    }

    pub fn mean(&self) -> &Vec4 {
        &self.mean
    }

    pub fn cov(&self) -> &Mat4 {
        &self.cov
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + iΩ`.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let omega = symplectic_form();
        let h = Matrix4::<Complex<f64>>::from_fn(|i, j| {
            Complex::new(0.5 * (self.cov[(i, j)] + self.cov[(j, i)]), omega[(i, j)])
        });
        h.symmetric_eigenvalues().min()
    }

    pub fn is_physical(&self) -> bool {
        self.min_uncertainty_eigenvalue() >= PHYSICALITY_TOL
    }

    pub fn two_mode_squeeze(&self, r: f64) -> Self {
        GaussianChannel::two_mode_squeeze(r).apply(self)
    }

    pub fn phase_shift(&self, mode: Mode, phi: f64) -> Self {
        GaussianChannel::phase_shift(mode, phi).apply(self)
    }

    pub fn loss(&self, mode: Mode, eta: f64) -> Result<Self> {
        Ok(GaussianChannel::loss(mode, eta)?.apply(self))
    }

    /// Mean and variance of the weighted quadrature `uᵀ (x_p, p_p, x_c, p_c)`.
    pub fn quadrature_stats(&self, u: &Vec4) -> (f64, f64) {
        (u.dot(&self.mean), (u.transpose() * self.cov * u)[(0, 0)])
    }

    fn block(&self, row: Mode, col: Mode) -> Matrix2<f64> {
        self.cov
            .fixed_view::<2, 2>(row.offset(), col.offset())
            .into_owned()
    }

    fn mode_mean(&self, mode: Mode) -> Vector2<f64> {
        self.mean.fixed_rows::<2>(mode.offset()).into_owned()
    }

    /// Photon-number mean and variance of one mode.
    ///
    /// With `n = (x² + p² - 2)/4` the Isserlis expansion of the fourth-order
    /// moments gives `⟨n⟩ = (tr V + |μ|² - 2)/4` and
    /// `Var n = (tr V² + 2 μᵀVμ)/8 - 1/4` for the mode's block `V` and mean `μ`;
    /// the `-1/4` is the ordering correction that makes the vacuum noiseless.
    pub fn number_stats(&self, mode: Mode) -> (f64, f64) {
        let v = self.block(mode, mode);
        let mu = self.mode_mean(mode);
        let mean = (v.trace() + mu.norm_squared() - 2.0) / 4.0;
        let var = ((v * v).trace() + 2.0 * (mu.transpose() * v * mu)[(0, 0)]) / 8.0 - 0.25;
        (mean, var)
    }

    /// `Cov(n_p, n_c)`; the modes commute so plain Wick pairing applies.
    pub fn number_covariance(&self) -> f64 {
        let c = self.block(Mode::Probe, Mode::Conjugate);
        let mp = self.mode_mean(Mode::Probe);
        let mc = self.mode_mean(Mode::Conjugate);
        ((c * c.transpose()).trace() + 2.0 * (mp.transpose() * c * mc)[(0, 0)]) / 8.0
    }

    /// Mean and variance of `A_p n_p + A_c n_c`.
    pub fn photon_sum_stats(&self, gain_p: f64, gain_c: f64) -> (f64, f64) {
        let (np, vp) = self.number_stats(Mode::Probe);
        let (nc, vc) = self.number_stats(Mode::Conjugate);
        let mean = gain_p * np + gain_c * nc;
        let var = gain_p * gain_p * vp
            + gain_c * gain_c * vc
            + 2.0 * gain_p * gain_c * self.number_covariance();
        (mean, var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn sum_p_weights() -> Vec4 {
        homodyne_weights(FRAC_PI_2, FRAC_PI_2, 1.0, 1.0)
    }

    #[test]
    fn vacuum_conventions() {
        let vac = GaussianState::vacuum();
        assert_eq!(vac.mean(), &Vec4::zeros());
        assert_eq!(vac.cov(), &Mat4::identity());
        for theta in [0.0f64, 0.4, 2.0] {
            let u = Vec4::new(theta.cos() * 0.6, theta.sin() * 0.6, 0.8, 0.0);
            let (m, v) = vac.quadrature_stats(&u);
            assert_abs_diff_eq!(m, 0.0);
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
        }
        assert_eq!(vac.number_stats(Mode::Probe), (0.0, 0.0));
        assert_eq!(vac.number_stats(Mode::Conjugate), (0.0, 0.0));
        assert!(vac.is_physical());
        assert_abs_diff_eq!(vac.min_uncertainty_eigenvalue(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_seed_moments() {
        assert_eq!(
            GaussianState::coherent_seed(Complex::new(0.0, 0.0)),
            GaussianState::vacuum()
        );
        let s = GaussianState::coherent_seed(Complex::new(10.0, 0.0));
        assert_eq!(s.mean(), &Vec4::new(20.0, 0.0, 0.0, 0.0));
        let (n, var) = s.number_stats(Mode::Probe);
        assert_abs_diff_eq!(n, 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 100.0, epsilon = 1e-12);
    }

    #[test]
    fn squeeze_photon_numbers() {
        let alpha2: f64 = 100.0;
        let spec = SqueezeSpec::from_gain(2.0).unwrap();
        let s = GaussianState::coherent_seed(Complex::new(alpha2.sqrt(), 0.0)).two_mode_squeeze(spec.r());
        let g = spec.gain();
        assert_abs_diff_eq!(s.number_stats(Mode::Probe).0, g * alpha2 + g - 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            s.number_stats(Mode::Conjugate).0,
            (g - 1.0) * alpha2 + g - 1.0,
            epsilon = 1e-10
        );
        let total = s.photon_sum_stats(1.0, 1.0).0;
        assert_abs_diff_eq!(total, (2.0 * g - 1.0) * alpha2 + 2.0 * (g - 1.0), epsilon = 1e-9);

        let seeded = GaussianState::coherent_seed(Complex::new(3.0, -1.0));
        assert_eq!(seeded.two_mode_squeeze(0.0), seeded);
    }

    #[test]
    fn four_db_joint_quadrature() {
        let r = 0.4605;
        let s = GaussianState::vacuum().two_mode_squeeze(r);
        let u = Vec4::new(0.0, FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2);
        let (_, v) = s.quadrature_stats(&u);
        assert_abs_diff_eq!(v, (-2.0 * r).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.3981, epsilon = 1e-4);
        assert_abs_diff_eq!(-10.0 * v.log10(), 4.0, epsilon = 0.01);
    }

    #[test]
    fn squeezed_vacuum_joint_variances() {
        let r = 0.7;
        let s = GaussianState::vacuum().two_mode_squeeze(r);
        let (_, v) = s.quadrature_stats(&sum_p_weights());
        assert_abs_diff_eq!(v, 2.0 * (-2.0 * r).exp(), epsilon = 1e-13);
        let anti = homodyne_weights(-FRAC_PI_2, FRAC_PI_2, 1.0, 1.0);
        let (_, v) = s.quadrature_stats(&anti);
        assert_abs_diff_eq!(v, 2.0 * (2.0 * r).exp(), epsilon = 1e-12);
    }

    #[test]
    fn thermal_marginals_of_squeezed_vacuum() {
        let r: f64 = 0.5;
        let s = GaussianState::vacuum().two_mode_squeeze(r);
        for mode in [Mode::Probe, Mode::Conjugate] {
            let (n, v) = s.number_stats(mode);
            assert_abs_diff_eq!(n, r.sinh().powi(2), epsilon = 1e-14);
            assert_abs_diff_eq!(n, 0.2715, epsilon = 1e-4);
            assert_abs_diff_eq!(v, (r.sinh() * r.cosh()).powi(2), epsilon = 1e-14);
        }
        // perfectly correlated photon numbers
        assert_abs_diff_eq!(s.number_covariance(), (r.sinh() * r.cosh()).powi(2), epsilon = 1e-14);
    }

    #[test]
    fn phase_shift_examples() {
        let s = GaussianState::coherent_seed(Complex::new(10.0, 0.0)).two_mode_squeeze(0.3);
        assert_eq!(s.phase_shift(Mode::Probe, 0.0), s);
        let full = s.phase_shift(Mode::Probe, 2.0 * PI);
        assert!((full.mean() - s.mean()).amax() < 1e-12);
        assert!((full.cov() - s.cov()).amax() < 1e-12);

        let c = GaussianState::coherent_seed(Complex::new(10.0, 0.0)).phase_shift(Mode::Probe, FRAC_PI_2);
        assert_abs_diff_eq!(c.mean()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.mean()[1], 20.0, epsilon = 1e-12);
    }

    #[test]
    fn loss_examples() {
        let s = GaussianState::coherent_seed(Complex::new(1.5, 0.5)).two_mode_squeeze(0.8);
        assert_eq!(s.loss(Mode::Probe, 1.0).unwrap(), s);
        let dark = s.loss(Mode::Conjugate, 0.0).unwrap();
        assert_eq!(dark.mean()[2], 0.0);
        assert_eq!(dark.mean()[3], 0.0);
        for i in 0..4 {
            for j in 2..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dark.cov()[(i, j)], expected, epsilon = 1e-15);
                assert_abs_diff_eq!(dark.cov()[(j, i)], expected, epsilon = 1e-15);
            }
        }
        assert_eq!(s.loss(Mode::Probe, 1.2), Err(Error::InvalidTransmission(1.2)));
        assert!(s.loss(Mode::Probe, -0.1).is_err());
        assert!(s.loss(Mode::Probe, f64::NAN).is_err());
    }

    #[test]
    fn squeeze_spec_gain_roundtrip() {
        let spec = SqueezeSpec::from_gain(3.3).unwrap();
        assert_abs_diff_eq!(spec.gain(), 3.3, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.r(), 1.2039, epsilon = 1e-4);
        assert!(SqueezeSpec::from_gain(0.9).is_err());
        assert_eq!(SqueezeSpec::from_gain(1.0).unwrap().r(), 0.0);
        assert!(SqueezeSpec::from_r(-0.4).is_ok());
    }

    #[test]
    fn rejects_unphysical_covariance() {
        let squeezed_too_much = Mat4::from_diagonal(&Vec4::new(0.5, 0.5, 1.0, 1.0));
        assert!(matches!(
            GaussianState::new(Vec4::zeros(), squeezed_too_much),
            Err(Error::Unphysical(_))
        ));
        let mut asym = Mat4::identity();
        asym[(0, 1)] = 1e-6;
        assert!(GaussianState::new(Vec4::zeros(), asym).is_err());
        assert!(GaussianState::new(Vec4::zeros(), Mat4::identity() * 3.0).is_ok());
    }

    fn arb_state() -> impl Strategy<Value = GaussianState> {
        (
            -2.0..2.0f64,
            -2.0..2.0f64,
            -1.2..1.2f64,
            -PI..PI,
            0.0..1.0f64,
            -1.0..1.0f64,
            -PI..PI,
        )
            .prop_map(|(re, im, r, phi, eta, s, phi2)| {
                GaussianState::coherent_seed(Complex::new(re, im))
                    .two_mode_squeeze(r)
                    .phase_shift(Mode::Probe, phi)
                    .loss(Mode::Conjugate, eta)
                    .unwrap()
                    .two_mode_squeeze(s)
                    .phase_shift(Mode::Conjugate, phi2)
            })
    }

    fn arb_pure_state() -> impl Strategy<Value = GaussianState> {
        (-2.0..2.0f64, -2.0..2.0f64, -1.2..1.2f64, -PI..PI, -1.0..1.0f64)
            .prop_map(|(re, im, r, phi, s)| {
                GaussianState::coherent_seed(Complex::new(re, im))
                    .two_mode_squeeze(r)
                    .phase_shift(Mode::Probe, phi)
                    .two_mode_squeeze(s)
            })
    }

    proptest! {
        #[test]
        fn symplectic_preservation(r in -3.0..3.0f64, phi in -10.0..10.0f64) {
            let omega = symplectic_form();
            for s in [
                two_mode_squeeze_matrix(r),
                phase_shift_matrix(Mode::Probe, phi),
                phase_shift_matrix(Mode::Conjugate, phi),
            ] {
                let scale = s.amax().powi(2).max(1.0);
                prop_assert!((s * omega * s.transpose() - omega).amax() < 1e-12 * scale);
            }
        }

        #[test]
        fn channel_outputs_stay_physical(state in arb_state()) {
            prop_assert!(state.is_physical());
            prop_assert!((state.cov() - state.cov().transpose()).amax() <= SYMMETRY_TOL);
        }

        #[test]
        fn loss_composes_multiplicatively(
            state in arb_state(),
            e1 in 0.0..=1.0f64,
            e2 in 0.0..=1.0f64,
            probe in any::<bool>(),
        ) {
            let mode = if probe { Mode::Probe } else { Mode::Conjugate };
            let twice = state.loss(mode, e1).unwrap().loss(mode, e2).unwrap();
            let once = state.loss(mode, e1 * e2).unwrap();
            prop_assert!((twice.mean() - once.mean()).amax() < 1e-12);
            prop_assert!((twice.cov() - once.cov()).amax() < 1e-12 * state.cov().amax().max(1.0));
        }

        #[test]
        fn loss_never_decreases_determinant(state in arb_pure_state(), eta in 0.0..1.0f64, probe in any::<bool>()) {
            let mode = if probe { Mode::Probe } else { Mode::Conjugate };
            let before = state.cov().determinant();
            let after = state.loss(mode, eta).unwrap().cov().determinant();
            prop_assert!(after >= before * (1.0 - 1e-10));
        }
    }
}
