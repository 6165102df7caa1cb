//! Simulated measurement chain: sinusoidal phase modulation, sampled joint
//! homodyne photocurrent and a Welch periodogram SNR estimate.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::detection::{phase_variance_homodyne, InterferometerConfig, PhaseModel};
use crate::error::{check_transmission, Error, Result};
use crate::gaussian::homodyne_weights;

/// Above this RMS modulation depth the signal is no longer linear in `φ`.
pub const SMALL_SIGNAL_LIMIT: f64 = 0.05;

/// Bins on each side of the tone bin that hold the window's main lobe.
const TONE_HALF_WIDTH: usize = 2;
/// Bins on each side of the tone excluded from the noise estimate.
const NOISE_GUARD: usize = 4;
/// Neighbouring bins on each side used for the noise median.
const NOISE_SPAN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulationConfig {
    /// RMS phase amplitude (rad); `φ(t) = √2 δφ cos(2πΩt)`.
    pub delta_phi: f64,
    /// Modulation frequency Ω (Hz).
    pub omega: f64,
    pub sample_rate: f64,
    /// Record length (s).
    pub duration: f64,
    /// Resolution bandwidth (Hz).
    pub rbw: f64,
    pub seed: u64,
}

impl Default for ModulationConfig {
    fn default() -> Self {
        Self {
            delta_phi: 1.7e-3,
            omega: 1e6,
            sample_rate: 1e7,
            duration: 0.1,
            rbw: 3e4,
            seed: 0,
        }
    }
}

impl ModulationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("sample_rate", self.sample_rate),
            ("duration", self.duration),
            ("rbw", self.rbw),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.delta_phi.is_finite() && self.delta_phi >= 0.0) {
            return Err(Error::param("delta_phi", format!("must be >= 0, got {}", self.delta_phi)));
        }
        if self.sample_rate <= 2.0 * self.omega {
            return Err(Error::param(
                "sample_rate",
                format!("must exceed 2*omega = {}, got {}", 2.0 * self.omega, self.sample_rate),
            ));
        }
        if self.rbw > self.omega {
            return Err(Error::param("rbw", format!("must not exceed omega, got {}", self.rbw)));
        }
        if self.sample_count() == 0 {
            return Err(Error::param("duration", "shorter than one sample"));
        }
        if self.delta_phi > SMALL_SIGNAL_LIMIT {
            log::warn!(
                "delta_phi = {} rad is outside the small-signal regime (> {SMALL_SIGNAL_LIMIT} rad)",
                self.delta_phi
            );
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn phase_at(&self, k: usize) -> f64 {
        let t = k as f64 / self.sample_rate;
        2f64.sqrt() * self.delta_phi * (2.0 * PI * self.omega * t).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationInputs {
    /// Detection transmission of the coherent measurement.
    pub eta_coh: f64,
    /// Responsivity at unit quantum efficiency (A/W).
    pub rho: f64,
    /// Probe power (W).
    pub power: f64,
    /// Equivalent noise bandwidth (Hz).
    pub bandwidth: f64,
    /// Elementary charge (C).
    pub charge: f64,
}

impl Default for CalibrationInputs {
    fn default() -> Self {
        Self {
            eta_coh: 0.8,
            rho: 0.64,
            power: 400e-9,
            bandwidth: 30e3,
            charge: 1.602176634e-19,
        }
    }
}

impl CalibrationInputs {
    pub fn validate(&self) -> Result<()> {
        check_transmission(self.eta_coh)?;
        for (name, v) in [
            ("eta_coh", self.eta_coh),
            ("rho", self.rho),
            ("power", self.power),
            ("bandwidth", self.bandwidth),
            ("charge", self.charge),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Shot-noise photon number `N_p = 2η_coh ρP/(eB)`.
pub fn photons_from_power(cal: &CalibrationInputs) -> Result<f64> {
    cal.validate()?;
    Ok(2.0 * cal.eta_coh * cal.rho * cal.power / (cal.charge * cal.bandwidth))
}

/// `10 log₁₀(δφ² N_p)`.
pub fn expected_coherent_snr_db(photons: f64, delta_phi: f64) -> Result<f64> {
    if !(photons.is_finite() && photons > 0.0) {
        return Err(Error::param("photons", format!("must be > 0, got {photons}")));
    }
    if !(delta_phi.is_finite() && delta_phi > 0.0) {
        return Err(Error::param("delta_phi", format!("must be > 0, got {delta_phi}")));
    }
    Ok(10.0 * (delta_phi * delta_phi * photons).log10())
}

/// Joint homodyne photocurrent sampled while the probe phase is modulated
/// around `config.phi`. One independent Gaussian draw per sample.
pub fn simulate_homodyne_timeseries(config: &InterferometerConfig, modulation: &ModulationConfig) -> Result<Vec<f64>> {
    modulation.validate()?;
    let model = PhaseModel::new(config)?;
    let u = homodyne_weights(config.phi_p, config.phi_c, config.a_p, config.a_c);
    let mut rng = ChaCha8Rng::seed_from_u64(modulation.seed);
    let samples = (0..modulation.sample_count())
        .map(|k| {
            let (mean, var) = model.quadrature_at(&u, config.phi + modulation.phase_at(k));
            let z: f64 = StandardNormal.sample(&mut rng);
            mean + var.max(0.0).sqrt() * z
        })
        .collect();
    Ok(samples)
}

/// One-sided power spectral density averaged over Hann-windowed segments
/// with 50% overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodogram {
    pub frequency_hz: Vec<f64>,
    /// Power per Hz.
    pub psd: Vec<f64>,
    pub bin_width: f64,
    /// Equivalent noise bandwidth of the window (Hz).
    pub enbw: f64,
    pub segments: usize,
}

impl Periodogram {
    /// `frequency_hz,power_db` with the power integrated over the window's
    /// noise bandwidth.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "frequency_hz,power_db")?;
        for (f, p) in self.frequency_hz.iter().zip(&self.psd) {
            writeln!(out, "{},{}", f, 10.0 * (p * self.enbw).log10())?;
        }
        Ok(())
    }
}

pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos()))
        .collect()
}

pub fn welch_periodogram(samples: &[f64], sample_rate: f64, segment: usize) -> Result<Periodogram> {
    if segment < 8 {
        return Err(Error::param("segment", format!("must be >= 8, got {segment}")));
    }
    if samples.len() < segment {
        return Err(Error::InsufficientData(format!(
            "{} samples is shorter than one {segment}-sample segment",
            samples.len()
        )));
    }
    let window = hann(segment);
    let sum_w: f64 = window.iter().sum();
    let sum_w2: f64 = window.iter().map(|w| w * w).sum();
    let hop = segment / 2;
    let segments = (samples.len() - segment) / hop + 1;
    let bins = segment / 2 + 1;

    let fft = FftPlanner::new().plan_fft_forward(segment);
    let mut buf = vec![Complex::new(0.0, 0.0); segment];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut acc = vec![0.0; bins];
    for s in 0..segments {
        let chunk = &samples[s * hop..s * hop + segment];
        let mean = chunk.iter().sum::<f64>() / segment as f64;
        for ((b, x), w) in buf.iter_mut().zip(chunk).zip(&window) {
            *b = Complex::new((x - mean) * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let scale = 1.0 / (sample_rate * sum_w2 * segments as f64);
    let psd = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || (segment.is_multiple_of(2) && k == bins - 1) { 1.0 } else { 2.0 };
            one_sided * a * scale
        })
        .collect();
    let bin_width = sample_rate / segment as f64;
    Ok(Periodogram {
        frequency_hz: (0..bins).map(|k| k as f64 * bin_width).collect(),
        psd,
        bin_width,
        enbw: bin_width * segment as f64 * sum_w2 / (sum_w * sum_w),
        segments,
    })
}

/// Segment length whose Hann window has the requested noise bandwidth.
pub fn segment_for_rbw(sample_rate: f64, rbw: f64) -> usize {
    (1.5 * sample_rate / rbw).round() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrEstimate {
    pub snr_db: f64,
    /// Mean-square tone amplitude.
    pub tone_power: f64,
    /// Noise density (per Hz) near the tone.
    pub noise_psd: f64,
    pub rbw: f64,
    pub segments: usize,
}

/// Tone power at `omega` over the median noise in the neighbouring bins,
/// referred to the resolution bandwidth `rbw`.
pub fn estimate_snr(samples: &[f64], sample_rate: f64, omega: f64, rbw: f64) -> Result<SnrEstimate> {
    let duration = samples.len() as f64 / sample_rate;
    if duration * rbw < 10.0 || duration.is_nan() {
        return Err(Error::InsufficientData(format!(
            "duration*rbw = {} < 10",
            duration * rbw
        )));
    }
    let segment = segment_for_rbw(sample_rate, rbw);
    let pg = welch_periodogram(samples, sample_rate, segment)?;
    let tone_bin = (omega / pg.bin_width).round() as usize;
    let last = pg.psd.len() - 1;
    if tone_bin < NOISE_GUARD + 1 || tone_bin + NOISE_GUARD + 1 > last {
        return Err(Error::param("omega", "tone too close to DC or Nyquist for this rbw"));
    }

    let mut noise: Vec<f64> = (tone_bin.saturating_sub(NOISE_SPAN).max(1)..=(tone_bin + NOISE_SPAN).min(last - 1))
        .filter(|&k| k.abs_diff(tone_bin) > NOISE_GUARD)
        .map(|k| pg.psd[k])
        .collect();
    noise.sort_by(f64::total_cmp);
    let mid = noise.len() / 2;
    let noise_psd = if noise.len() % 2 == 1 {
        noise[mid]
    } else {
        0.5 * (noise[mid - 1] + noise[mid])
    };

    let tone_power: f64 = (tone_bin - TONE_HALF_WIDTH..=tone_bin + TONE_HALF_WIDTH)
        .map(|k| (pg.psd[k] - noise_psd) * pg.bin_width)
        .sum();
    if !(tone_power > 0.0 && noise_psd > 0.0) {
        return Err(Error::InsufficientData(format!(
            "no tone above the noise floor at {omega} Hz"
        )));
    }
    Ok(SnrEstimate {
        snr_db: 10.0 * (tone_power / (noise_psd * rbw)).log10(),
        tone_power,
        noise_psd,
        rbw,
        segments: pg.segments,
    })
}

/// `δφ² f_s / (2B Δ²φ)` in dB, with `Δ²φ` the per-sample phase variance of the
/// joint homodyne readout.
pub fn analytic_snr_db(config: &InterferometerConfig, modulation: &ModulationConfig) -> Result<f64> {
    modulation.validate()?;
    let dphi = modulation.delta_phi;
    if dphi == 0.0 {
        return Err(Error::param("delta_phi", "no modulation, SNR undefined"));
    }
    let var = phase_variance_homodyne(config)?.phase_variance;
    Ok(10.0 * (dphi * dphi * modulation.sample_rate / (2.0 * modulation.rbw * var)).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub analytic_snr_db: f64,
    pub estimated_snr_db: f64,
    pub phase_variance: f64,
    pub noise_psd: f64,
    pub tone_power: f64,
    pub samples: usize,
}

pub fn run_experiment(config: &InterferometerConfig, modulation: &ModulationConfig) -> Result<RunSummary> {
    let samples = simulate_homodyne_timeseries(config, modulation)?;
    let est = estimate_snr(&samples, modulation.sample_rate, modulation.omega, modulation.rbw)?;
    Ok(RunSummary {
        analytic_snr_db: analytic_snr_db(config, modulation)?,
        estimated_snr_db: est.snr_db,
        phase_variance: phase_variance_homodyne(config)?.phase_variance,
        noise_psd: est.noise_psd,
        tone_power: est.tone_power,
        samples: samples.len(),
    })
}

/// Unsqueezed reference with the same probe power at the phase object.
pub fn coherent_reference(config: &InterferometerConfig) -> InterferometerConfig {
    InterferometerConfig {
        r: 0.0,
        s: 0.0,
        alpha2: config.alpha2 * config.r.cosh().powi(2),
        phi_p: FRAC_PI_2,
        phi_c: FRAC_PI_2,
        a_p: 1.0,
        a_c: 1.0,
        ..*config
    }
}

/// Lossless coherent configuration whose per-sample photon number reproduces
/// the calibrated `N_p` in the calibration bandwidth.
pub fn calibrated_coherent_config(cal: &CalibrationInputs, modulation: &ModulationConfig) -> Result<InterferometerConfig> {
    let photons = photons_from_power(cal)?;
    Ok(InterferometerConfig {
        alpha2: photons * cal.bandwidth / modulation.sample_rate,
        ..InterferometerConfig::default()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedExperiment {
    pub squeezed: RunSummary,
    pub coherent: RunSummary,
    pub analytic_difference_db: f64,
    pub estimated_difference_db: f64,
}

/// Squeezed run and its equal-power coherent reference, with noise drawn from
/// independent streams (`seed` and `seed + 1`).
pub fn paired_experiment(config: &InterferometerConfig, modulation: &ModulationConfig) -> Result<PairedExperiment> {
    let squeezed = run_experiment(config, modulation)?;
    let coherent_mod = ModulationConfig {
        seed: modulation.seed.wrapping_add(1),
        ..*modulation
    };
    let coherent = run_experiment(&coherent_reference(config), &coherent_mod)?;
    Ok(PairedExperiment {
        analytic_difference_db: squeezed.analytic_snr_db - coherent.analytic_snr_db,
        estimated_difference_db: squeezed.estimated_snr_db - coherent.estimated_snr_db,
        squeezed,
        coherent,
    })
}

/// Raw samples as consecutive little-endian f64.
pub fn write_samples_le<W: Write>(samples: &[f64], mut out: W) -> io::Result<()> {
    for s in samples {
        out.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::SqueezeSpec;
    use approx::assert_abs_diff_eq;

    fn synthetic(amplitude: f64, fs: f64, omega: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|k| {
                let z: f64 = StandardNormal.sample(&mut rng);
                amplitude * (2.0 * PI * omega * k as f64 / fs).cos() + z
            })
            .collect()
    }

    // unit white noise has one-sided density 2/fs
    fn tone_snr_db(amplitude: f64, fs: f64, rbw: f64) -> f64 {
        10.0 * (amplitude * amplitude * fs / (4.0 * rbw)).log10()
    }

    #[test]
    fn calibration() {
        let cal = CalibrationInputs::default();
        let n = photons_from_power(&cal).unwrap();
        assert_abs_diff_eq!(n / 1e7, 8.52, epsilon = 0.01);
        let snr = expected_coherent_snr_db(n, 1.7e-3).unwrap();
        assert!((snr - 22.5).abs() <= 2.0, "{snr}");
        let doubled = CalibrationInputs { bandwidth: 60e3, ..cal };
        assert_abs_diff_eq!(photons_from_power(&doubled).unwrap(), n / 2.0, epsilon = 1e-6);
        for bad in [0.0, -1.0, f64::NAN] {
            assert!(photons_from_power(&CalibrationInputs { bandwidth: bad, ..cal }).is_err());
        }
    }

    #[test]
    fn modulation_validation() {
        assert!(ModulationConfig::default().validate().is_ok());
        let m = ModulationConfig::default();
        assert!(ModulationConfig { sample_rate: 2e6, ..m }.validate().is_err());
        assert!(ModulationConfig { rbw: 2e6, ..m }.validate().is_err());
        assert!(ModulationConfig { delta_phi: -1.0, ..m }.validate().is_err());
        assert!(ModulationConfig { delta_phi: 0.1, ..m }.validate().is_ok());
    }

    #[test]
    fn hann_noise_bandwidth() {
        let pg = welch_periodogram(&vec![0.0; 1000], 1e7, 500).unwrap();
        assert_abs_diff_eq!(pg.enbw, 3e4, epsilon = 1e-6);
        assert_eq!(pg.segments, 3);
        assert_eq!(segment_for_rbw(1e7, 3e4), 500);
    }

    #[test]
    fn synthetic_tone_recovered() {
        let (fs, omega, rbw) = (1e7, 1e6, 3e4);
        for amp in [0.3, 1.0] {
            let x = synthetic(amp, fs, omega, 200_000, 7);
            let est = estimate_snr(&x, fs, omega, rbw).unwrap();
            let want = tone_snr_db(amp, fs, rbw);
            assert!((est.snr_db - want).abs() < 0.3, "{} vs {want}", est.snr_db);
            assert_abs_diff_eq!(est.noise_psd, 2.0 / fs, epsilon = 0.05 * 2.0 / fs);
        }
    }

    #[test]
    fn estimator_unbiased_over_seeds() {
        let (fs, omega, rbw, amp) = (1e7, 1e6, 3e4, 0.3);
        let want = tone_snr_db(amp, fs, rbw);
        let mean = (0..50)
            .map(|seed| estimate_snr(&synthetic(amp, fs, omega, 100_000, seed), fs, omega, rbw).unwrap().snr_db)
            .sum::<f64>()
            / 50.0;
        assert!((mean - want).abs() < 0.2, "{mean} vs {want}");
    }

    #[test]
    fn halving_rbw_gains_3db() {
        let (fs, omega) = (1e7, 1e6);
        let x = synthetic(0.3, fs, omega, 400_000, 3);
        let wide = estimate_snr(&x, fs, omega, 3e4).unwrap();
        let narrow = estimate_snr(&x, fs, omega, 1.5e4).unwrap();
        assert_abs_diff_eq!(narrow.snr_db - wide.snr_db, 10.0 * 2f64.log10(), epsilon = 0.3);
        // same density, half the bandwidth
        let floor_drop = 10.0 * (wide.noise_psd * 3e4 / (narrow.noise_psd * 1.5e4)).log10();
        assert_abs_diff_eq!(floor_drop, 3.0103, epsilon = 0.2);
    }

    #[test]
    fn insufficient_data() {
        let x = synthetic(0.1, 1e7, 1e6, 3000, 0);
        assert!(matches!(estimate_snr(&x, 1e7, 1e6, 3e4), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn stationary_statistics() {
        let cfg = InterferometerConfig::truncated(SqueezeSpec::from_gain(3.3).unwrap().r(), 0.65, 100.0);
        let m = ModulationConfig { delta_phi: 0.0, ..ModulationConfig::default() };
        let x = simulate_homodyne_timeseries(&cfg, &m).unwrap();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let (m0, v0) = PhaseModel::new(&cfg)
            .unwrap()
            .quadrature_at(&homodyne_weights(cfg.phi_p, cfg.phi_c, 1.0, 1.0), 0.0);
        assert!((mean - m0).abs() < 5.0 * (v0 / n).sqrt());
        assert!((var / v0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn deterministic_samples() {
        let cfg = InterferometerConfig::truncated(0.7, 0.9, 1e4);
        let m = ModulationConfig { duration: 0.002, ..ModulationConfig::default() };
        let a = simulate_homodyne_timeseries(&cfg, &m).unwrap();
        let b = simulate_homodyne_timeseries(&cfg, &m).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = simulate_homodyne_timeseries(&cfg, &ModulationConfig { seed: 1, ..m }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn coherent_line_above_floor() {
        let cal = CalibrationInputs::default();
        let m = ModulationConfig { duration: 0.02, ..ModulationConfig::default() };
        let cfg = calibrated_coherent_config(&cal, &m).unwrap();
        let run = run_experiment(&cfg, &m).unwrap();
        let expected = expected_coherent_snr_db(photons_from_power(&cal).unwrap(), m.delta_phi).unwrap();
        assert_abs_diff_eq!(run.analytic_snr_db, expected, epsilon = 1e-9);
        assert!((run.estimated_snr_db - expected).abs() < 0.5);
    }

    #[test]
    fn squeezed_noise_floor_ratio() {
        let r = SqueezeSpec::from_gain(3.3).unwrap().r();
        let cfg = InterferometerConfig::truncated(r, 0.65, 1e4);
        let m = ModulationConfig { duration: 0.02, ..ModulationConfig::default() };
        let pair = paired_experiment(&cfg, &m).unwrap();
        let u = homodyne_weights(FRAC_PI_2, FRAC_PI_2, 1.0, 1.0);
        let (_, v_sq) = PhaseModel::new(&cfg).unwrap().quadrature_at(&u, 0.0);
        let (_, v_coh) = PhaseModel::new(&coherent_reference(&cfg)).unwrap().quadrature_at(&u, 0.0);
        let ratio = pair.squeezed.noise_psd / pair.coherent.noise_psd;
        assert!((ratio / (v_sq / v_coh) - 1.0).abs() < 0.05, "{ratio} vs {}", v_sq / v_coh);
        assert!((pair.estimated_difference_db - pair.analytic_difference_db).abs() < 0.3);
    }

    #[test]
    fn outputs() {
        let mut buf = Vec::new();
        write_samples_le(&[1.5, -2.0], &mut buf).unwrap();
        assert_eq!(buf.len(), 16);
        assert_eq!(f64::from_le_bytes(buf[8..].try_into().unwrap()), -2.0);

        let pg = welch_periodogram(&synthetic(0.1, 1e6, 1e5, 4000, 1), 1e6, 50).unwrap();
        let mut csv = Vec::new();
        pg.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("frequency_hz,power_db\n"));
        assert_eq!(text.lines().count(), 27);
    }
}
