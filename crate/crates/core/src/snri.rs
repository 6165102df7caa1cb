//! Coherent-state baselines, the standard quantum limit and SNR improvement.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::detection::{ClosedForm, InterferometerConfig};
use crate::error::{check_transmission, Error, Result};
use crate::fisher::cfi_homodyne;
use crate::gaussian::{homodyne_weights, GaussianState};

/// Which detected photons count as the resource of the SQL.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonAccounting {
    /// Photons through the phase object only, `N_p = ηG|α|²`.
    #[default]
    ProbeOnly,
    /// Both beams, `N_p + N_c = η(2G - 1)|α|²`.
    ProbeAndConjugate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub eta: f64,
    pub gain: f64,
    pub alpha2: f64,
}

impl BaselineSpec {
    pub fn new(eta: f64, gain: f64, alpha2: f64) -> Result<Self> {
        check_transmission(eta)?;
        if eta == 0.0 {
            return Err(Error::param("eta", "must be > 0"));
        }
        if !(gain.is_finite() && gain >= 1.0) {
            return Err(Error::param("gain", format!("must be >= 1, got {gain}")));
        }
        if !(alpha2.is_finite() && alpha2 > 0.0) {
            return Err(Error::param("alpha2", format!("must be > 0, got {alpha2}")));
        }
        Ok(Self { eta, gain, alpha2 })
    }

    /// Detected probe photons `N_p = ηG|α|²`.
    pub fn probe_photons(&self) -> f64 {
        self.eta * self.gain * self.alpha2
    }

    pub fn resource_photons(&self, accounting: PhotonAccounting) -> f64 {
        match accounting {
            PhotonAccounting::ProbeOnly => self.probe_photons(),
            PhotonAccounting::ProbeAndConjugate => self.eta * (2.0 * self.gain - 1.0) * self.alpha2,
        }
    }
}

/// `Δ²φ_SQL = 1/(2N)`.
pub fn sql_variance(photons: f64) -> Result<f64> {
    if !(photons.is_finite() && photons > 0.0) {
        return Err(Error::param("photons", format!("must be > 0, got {photons}")));
    }
    Ok(1.0 / (2.0 * photons))
}

/// Best coherent-beam variance at equal probe power, `1/(2ηG|α|²)`.
pub fn coherent_baseline(eta: f64, gain: f64, alpha2: f64) -> Result<f64> {
    sql_variance(BaselineSpec::new(eta, gain, alpha2)?.probe_photons())
}

pub fn coherent_baseline_with(spec: &BaselineSpec, accounting: PhotonAccounting) -> Result<f64> {
    sql_variance(spec.resource_photons(accounting))
}

/// SNR improvement in dB, `-10 log₁₀(Δ²φ / Δ²φ_coh)`.
pub fn snri_db(variance: f64, variance_coh: f64) -> Result<f64> {
    for (name, v) in [("variance", variance), ("variance_coh", variance_coh)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, format!("must be > 0, got {v}")));
        }
    }
    Ok(-10.0 * (variance / variance_coh).log10())
}

/// Phase `k` of an `n`-point grid covering `[-π, π)`; `n = 360` gives 1° steps
/// and places `π/2` on index `3n/4`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| -PI + 2.0 * PI * k as f64 / n as f64).collect()
}

fn insensitive(phi_p: f64) -> bool {
    phi_p.sin().abs() < 1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub phi_p: f64,
    /// From the SNR-based variance; `None` at insensitive points.
    pub snri_db: Option<f64>,
    /// From `1/F_C`; `None` where the Fisher information vanishes.
    pub cfi_snri_db: Option<f64>,
}

/// SNRI versus `φ_p` at fixed `φ_c` for the equal-loss truncated
/// interferometer. `φ_p = 0, ±π` are reported as gaps.
pub fn snri_scan_phip(eta: f64, gain: f64, alpha2: f64, phi_c: f64, points: usize) -> Result<Vec<ScanPoint>> {
    let spec = BaselineSpec::new(eta, gain, alpha2)?;
    let coh = sql_variance(spec.probe_photons())?;
    let r = crate::gaussian::SqueezeSpec::from_gain(gain)?.r();
    phase_grid(points)
        .into_iter()
        .map(|phi_p| {
            let snri = if insensitive(phi_p) {
                None
            } else {
                let form = ClosedForm::General { eta, r, phi_p, phi_c };
                Some(snri_db(form.scaled_variance()? / alpha2, coh)?)
            };
            let cfg = InterferometerConfig {
                phi_p,
                phi_c,
                ..InterferometerConfig::truncated(r, eta, alpha2)
            };
            let cfi = cfi_homodyne(&cfg)?.cfi;
            let cfi_snri = if cfi > 0.0 { Some(snri_db(1.0 / cfi, coh)?) } else { None };
            Ok(ScanPoint {
                phi_p,
                snri_db: snri,
                cfi_snri_db: cfi_snri,
            })
        })
        .collect()
}

/// SNRI over the two local-oscillator phases in the `|α|² ≫ 1` limit, with
/// the mean homodyne signals along each axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnriMap {
    pub r: f64,
    pub eta: f64,
    pub phi_p: Vec<f64>,
    pub phi_c: Vec<f64>,
    /// `snri_db[i][j]` at `(phi_p[i], phi_c[j])`.
    pub snri_db: Vec<Vec<Option<f64>>>,
    /// `⟨j_p⟩/|α|` at each `phi_p`.
    pub mean_jp: Vec<f64>,
    /// `⟨j_c⟩/|α|` at each `phi_c`.
    pub mean_jc: Vec<f64>,
}

impl SnriMap {
    /// Largest SNRI and its `(φ_p, φ_c)`.
    pub fn max(&self) -> Option<(f64, f64, f64)> {
        let mut best: Option<(f64, f64, f64)> = None;
        for (i, row) in self.snri_db.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(v) = *v {
                    if best.is_none_or(|b| v > b.2) {
                        best = Some((self.phi_p[i], self.phi_c[j], v));
                    }
                }
            }
        }
        best
    }
}

pub fn snri_map(r: f64, eta: f64, points: usize) -> Result<SnriMap> {
    use rayon::prelude::*;
    check_transmission(eta)?;
    let gain = r.cosh().powi(2);
    // α² cancels between the variance and the baseline
    let coh = coherent_baseline(eta, gain, 1.0)?;
    let grid = phase_grid(points);
    let snri = grid
        .par_iter()
        .map(|&phi_p| {
            grid.iter()
                .map(|&phi_c| {
                    if insensitive(phi_p) {
                        return Ok(None);
                    }
                    let v = ClosedForm::General { eta, r, phi_p, phi_c }.scaled_variance()?;
                    Ok(Some(snri_db(v, coh)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let cfg = InterferometerConfig::truncated(r, eta, 1.0);
    let out = crate::detection::build_output_state(&cfg)?;
    let signal = |state: &GaussianState, phi_p: f64, phi_c: f64, a_p: f64, a_c: f64| {
        state.quadrature_stats(&homodyne_weights(phi_p, phi_c, a_p, a_c)).0
    };
    let mean_jp = grid.iter().map(|&p| signal(&out, p, FRAC_PI_2, 1.0, 0.0)).collect();
    let mean_jc = grid.iter().map(|&c| signal(&out, FRAC_PI_2, c, 0.0, 1.0)).collect();
    Ok(SnriMap {
        r,
        eta,
        phi_p: grid.clone(),
        phi_c: grid,
        snri_db: snri,
        mean_jp,
        mean_jc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::SqueezeSpec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn r_of(gain: f64) -> f64 {
        SqueezeSpec::from_gain(gain).unwrap().r()
    }

    #[test]
    fn baselines() {
        assert_relative_eq!(coherent_baseline(1.0, 1.0, 50.0).unwrap(), 0.01, max_relative = 1e-15);
        assert_abs_diff_eq!(coherent_baseline(0.65, 3.3, 1.0).unwrap(), 0.2331, epsilon = 1e-4);
        for (eta, g, a) in [(0.3, 1.0, 7.0), (0.9, 4.2, 1e6), (1.0, 2.0, 0.5)] {
            let spec = BaselineSpec::new(eta, g, a).unwrap();
            assert_relative_eq!(spec.probe_photons(), eta * g * a, max_relative = 1e-12);
            assert_eq!(
                sql_variance(spec.probe_photons()).unwrap(),
                coherent_baseline(eta, g, a).unwrap()
            );
        }
        let spec = BaselineSpec::new(1.0, 2.0, 10.0).unwrap();
        assert_relative_eq!(
            coherent_baseline_with(&spec, PhotonAccounting::ProbeAndConjugate).unwrap(),
            1.0 / 60.0,
            max_relative = 1e-15
        );
        assert!(coherent_baseline(0.0, 2.0, 1.0).is_err());
        assert!(coherent_baseline(0.5, 0.5, 1.0).is_err());
        assert!(coherent_baseline(0.5, 2.0, 0.0).is_err());
    }

    #[test]
    fn snri_examples() {
        assert_eq!(snri_db(0.3, 0.3).unwrap(), 0.0);
        assert!(snri_db(0.0, 1.0).is_err());
        assert!(snri_db(1.0, -1.0).is_err());

        let r = r_of(3.3);
        let v = ClosedForm::Truncated { eta: 0.65, r, phi_p: FRAC_PI_2 }.scaled_variance().unwrap();
        let s = snri_db(v, coherent_baseline(0.65, 3.3, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(s, 3.9, epsilon = 0.1);

        let r = r_of(2.0);
        let v = ClosedForm::General { eta: 1.0, r, phi_p: -FRAC_PI_2, phi_c: FRAC_PI_2 }
            .scaled_variance()
            .unwrap();
        assert!(snri_db(v, coherent_baseline(1.0, 2.0, 1.0).unwrap()).unwrap() < 0.0);
    }

    #[test]
    fn phase_scan_at_fitted_loss() {
        let scan = snri_scan_phip(0.65, 3.3, 1e6, FRAC_PI_2, 360).unwrap();
        assert_eq!(scan.len(), 360);
        assert_eq!(scan[0].snri_db, None);
        assert_eq!(scan[180].snri_db, None);
        let plus = scan[270];
        let minus = scan[90];
        assert_abs_diff_eq!(plus.phi_p, FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(minus.phi_p, -FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(plus.snri_db.unwrap(), 3.888, epsilon = 0.01);
        assert!(minus.snri_db.unwrap() < 0.0);
        let peak = scan
            .iter()
            .filter_map(|p| p.snri_db.map(|s| (p.phi_p, s)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert_eq!(peak.0, plus.phi_p);
        assert_abs_diff_eq!(plus.cfi_snri_db.unwrap(), plus.snri_db.unwrap(), epsilon = 1e-6);
        for p in &scan {
            if let (Some(a), Some(b)) = (p.snri_db, p.cfi_snri_db) {
                assert!(b >= a - 1e-9);
            }
        }
    }

    #[test]
    fn no_gain_no_improvement() {
        let scan = snri_scan_phip(1.0, 1.0, 1e6, FRAC_PI_2, 360).unwrap();
        assert_abs_diff_eq!(scan[270].snri_db.unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(scan[90].snri_db.unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn squeezing_always_helps_at_phase_quadrature() {
        let mut last = f64::INFINITY;
        for g in [3.0, 2.0, 1.5, 1.1, 1.01, 1.0001] {
            let r = r_of(g);
            let v = ClosedForm::General { eta: 1.0, r, phi_p: FRAC_PI_2, phi_c: FRAC_PI_2 }
                .scaled_variance()
                .unwrap();
            let s = snri_db(v, coherent_baseline(1.0, g, 1.0).unwrap()).unwrap();
            assert!(s > 0.0 && s < last);
            last = s;
        }
        assert!(last < 0.1);
    }

    #[test]
    fn snri_independent_of_seed_power() {
        let reference = snri_scan_phip(0.8, 2.5, 1.0, 1.0, 36).unwrap();
        for alpha2 in [1e3, 1e7] {
            let scan = snri_scan_phip(0.8, 2.5, alpha2, 1.0, 36).unwrap();
            for (a, b) in reference.iter().zip(&scan) {
                match (a.snri_db, b.snri_db) {
                    (Some(x), Some(y)) => assert_abs_diff_eq!(x, y, epsilon = 1e-9),
                    (x, y) => assert_eq!(x, y),
                }
            }
        }
    }

    #[test]
    fn two_phase_map() {
        let map = snri_map(0.4605, 1.0, 360).unwrap();
        let (pp, pc, v) = map.max().unwrap();
        assert_abs_diff_eq!(v, 4.0, epsilon = 0.05);
        // maxima at (π/2, π/2) and its mirror (-π/2, -π/2)
        assert_abs_diff_eq!(pp.abs(), FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(pp, pc, epsilon = 1e-12);
        assert_abs_diff_eq!(map.snri_db[270][270].unwrap(), v, epsilon = 1e-12);

        // φ_c = π/2 slice equals the φ_p scan
        let scan = snri_scan_phip(1.0, 0.4605f64.cosh().powi(2), 1e6, map.phi_c[270], 360).unwrap();
        for (i, p) in scan.iter().enumerate() {
            match (p.snri_db, map.snri_db[i][270]) {
                (Some(a), Some(b)) => assert_abs_diff_eq!(a, b, epsilon = 1e-12),
                (a, b) => assert_eq!(a, b),
            }
        }

        // ⟨j_p⟩ crosses zero at φ_p = ±π/2
        for (k, &phi) in map.phi_p.iter().enumerate() {
            if (phi.abs() - FRAC_PI_2).abs() < 1e-12 {
                assert_abs_diff_eq!(map.mean_jp[k], 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(map.mean_jc[k], 0.0, epsilon = 1e-12);
            }
        }
        // same slope sign at the lock point
        let dp = map.mean_jp[271] - map.mean_jp[269];
        let dc = map.mean_jc[271] - map.mean_jc[269];
        assert!(dp * dc > 0.0);
    }

    #[test]
    fn map_is_periodic() {
        let r = 0.4605;
        for &(pp, pc) in &[(0.3, 1.2), (2.0, -0.7), (-1.1, 3.0)] {
            let a = ClosedForm::General { eta: 1.0, r, phi_p: pp, phi_c: pc }.scaled_variance().unwrap();
            let b = ClosedForm::General { eta: 1.0, r, phi_p: pp + 2.0 * PI, phi_c: pc }
                .scaled_variance()
                .unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }
}
