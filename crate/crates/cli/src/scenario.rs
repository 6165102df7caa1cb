//! JSON scenario files, one shape per command. Every field has a default and
//! unknown fields are rejected.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use serde::Deserialize;
use su11::detection::ScanOptions;
use su11::experiment::{CalibrationInputs, ModulationConfig};
use su11::{DetectionScheme, InterferometerConfig, SqueezeSpec};

use crate::CliError;

fn check_points(points: usize, min: usize) -> Result<(), CliError> {
    if points < min {
        return Err(CliError::Validation(format!("points must be >= {min}, got {points}")));
    }
    Ok(())
}

/// Replaces `r` by the squeezing parameter of `gain` when one is given.
fn apply_gain(mut config: InterferometerConfig, gain: Option<f64>) -> Result<InterferometerConfig, CliError> {
    if let Some(g) = gain {
        config.r = SqueezeSpec::from_gain(g)?.r();
    }
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sensitivity {
    pub interferometer: InterferometerConfig,
    pub gain: Option<f64>,
    pub scheme: DetectionScheme,
    /// Search the best operating point instead of using the configured one.
    pub optimize: bool,
}

impl Default for Sensitivity {
    fn default() -> Self {
        Self {
            interferometer: InterferometerConfig::default(),
            gain: None,
            scheme: DetectionScheme::TruncatedDualHomodyne,
            optimize: false,
        }
    }
}

impl Sensitivity {
    pub fn config(&self) -> Result<InterferometerConfig, CliError> {
        apply_gain(self.interferometer, self.gain)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure2 {
    pub gain_min: f64,
    pub gain_max: f64,
    pub points: usize,
    pub schemes: Vec<DetectionScheme>,
    pub alpha2: f64,
    pub homodyne_points: usize,
    pub direct_points: usize,
}

impl Default for Figure2 {
    fn default() -> Self {
        let scan = ScanOptions::default();
        Self {
            gain_min: 1.0,
            gain_max: 5.0,
            points: 41,
            schemes: DetectionScheme::ALL.to_vec(),
            alpha2: 1e6,
            homodyne_points: scan.homodyne_points,
            direct_points: scan.direct_points,
        }
    }
}

impl Figure2 {
    pub fn gains(&self) -> Result<Vec<f64>, CliError> {
        check_points(self.points, 1)?;
        if !(self.gain_min >= 1.0 && self.gain_max >= self.gain_min && self.gain_max.is_finite()) {
            return Err(CliError::Validation(format!(
                "need 1 <= gain_min <= gain_max, got [{}, {}]",
                self.gain_min, self.gain_max
            )));
        }
        if self.schemes.is_empty() {
            return Err(CliError::Validation("schemes must not be empty".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.gain_min]);
        }
        let step = (self.gain_max - self.gain_min) / (self.points - 1) as f64;
        Ok((0..self.points).map(|k| self.gain_min + step * k as f64).collect())
    }

    pub fn scan(&self) -> Result<ScanOptions, CliError> {
        check_points(self.homodyne_points, 4)?;
        check_points(self.direct_points, 4)?;
        Ok(ScanOptions {
            homodyne_points: self.homodyne_points,
            direct_points: self.direct_points,
            ..ScanOptions::default()
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig4b {
    pub eta: f64,
    pub gain: f64,
    pub alpha2: f64,
    pub phi_c: f64,
    pub points: usize,
}

impl Default for Fig4b {
    fn default() -> Self {
        Self {
            eta: 0.65,
            gain: 3.3,
            alpha2: 1e6,
            phi_c: FRAC_PI_2,
            points: 360,
        }
    }
}

impl Fig4b {
    pub fn validate(&self) -> Result<(), CliError> {
        check_points(self.points, 2)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FigS2 {
    pub r: f64,
    pub eta: f64,
    pub points: usize,
}

impl Default for FigS2 {
    fn default() -> Self {
        Self {
            r: 0.4605,
            eta: 1.0,
            points: 360,
        }
    }
}

impl FigS2 {
    pub fn validate(&self) -> Result<(), CliError> {
        check_points(self.points, 2)?;
        if !self.r.is_finite() {
            return Err(CliError::Validation(format!("r must be finite, got {}", self.r)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fisher {
    pub interferometer: InterferometerConfig,
    pub gain: Option<f64>,
}

impl Fisher {
    pub fn config(&self) -> Result<InterferometerConfig, CliError> {
        apply_gain(self.interferometer, self.gain)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McMode {
    /// Lossless coherent run at the calibrated photon number.
    #[default]
    Calibrated,
    /// The configured interferometer alone.
    Single,
    /// The configured interferometer and its equal-power coherent reference.
    Paired,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McExperiment {
    pub mode: McMode,
    pub interferometer: InterferometerConfig,
    pub gain: Option<f64>,
    pub modulation: ModulationConfig,
    pub calibration: CalibrationInputs,
    /// Runs with seeds `modulation.seed`, `modulation.seed + 2`, ...
    pub seeds: usize,
    /// Raw samples of the first run, little-endian f64.
    pub samples_out: Option<PathBuf>,
    /// Periodogram of the first run as CSV.
    pub periodogram_out: Option<PathBuf>,
}

impl Default for McExperiment {
    fn default() -> Self {
        Self {
            mode: McMode::Calibrated,
            interferometer: InterferometerConfig::default(),
            gain: None,
            modulation: ModulationConfig::default(),
            calibration: CalibrationInputs::default(),
            seeds: 1,
            samples_out: None,
            periodogram_out: None,
        }
    }
}

impl McExperiment {
    pub fn config(&self) -> Result<InterferometerConfig, CliError> {
        apply_gain(self.interferometer, self.gain)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateSql {
    pub calibration: CalibrationInputs,
    pub delta_phi: f64,
}

impl Default for CalibrateSql {
    fn default() -> Self {
        Self {
            calibration: CalibrationInputs::default(),
            delta_phi: ModulationConfig::default().delta_phi,
        }
    }
}
