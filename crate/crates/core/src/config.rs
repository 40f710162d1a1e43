//! Flat key-value run configuration shared by the CLI pipelines.

use crate::cls::GateConfig;
use crate::error::ConfigError;

/// Parameters of a filtering/analysis run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Encoder sector count L.
    pub sector_count: usize,
    /// Wheel radius (m).
    pub wheel_radius_m: f64,
    /// Effective estimator window N_w (revolutions).
    pub window_revolutions: u32,
    /// Speed-gate threshold (km/h).
    pub enable_threshold_kmh: f64,
    /// Uniform resampling rate for spectral analysis (Hz).
    pub resample_rate_hz: f64,
    /// Wheel revolutions per crank revolution; the cadence ripple appears
    /// at twice this gain times the rotation frequency.
    pub gear_gain: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sector_count: 36,
            wheel_radius_m: 0.334,
            window_revolutions: 20,
            enable_threshold_kmh: 5.0,
            resample_rate_hz: 100.0,
            gear_gain: 0.43035,
        }
    }
}

impl RunConfig {
    pub fn gate(&self) -> GateConfig {
        GateConfig {
            enable_threshold_kmh: self.enable_threshold_kmh,
            wheel_radius_m: self.wheel_radius_m,
        }
    }

    fn validate(&self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = || ConfigError::InvalidValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        // Parsed floats can be NaN ("nan" parses), so test the positive
        // range directly rather than its complement.
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.sector_count < 2
            || self.window_revolutions < 1
            || !positive(self.wheel_radius_m)
            || !positive(self.enable_threshold_kmh)
            || !positive(self.resample_rate_hz)
            || !positive(self.gear_gain)
        {
            return Err(invalid());
        }
        Ok(())
    }
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are
/// ignored, and unknown keys are errors so typos surface immediately.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::Malformed { line })?;
        let key = key.trim();
        let value = value.trim();
        let invalid = || ConfigError::InvalidValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "L" => cfg.sector_count = value.parse().map_err(|_| invalid())?,
            "wheel_radius_m" => cfg.wheel_radius_m = value.parse().map_err(|_| invalid())?,
            "window_revolutions" => {
                cfg.window_revolutions = value.parse().map_err(|_| invalid())?
            }
            "enable_threshold_kmh" => {
                cfg.enable_threshold_kmh = value.parse().map_err(|_| invalid())?
            }
            "resample_rate_hz" => cfg.resample_rate_hz = value.parse().map_err(|_| invalid())?,
            "gear_gain" => cfg.gear_gain = value.parse().map_err(|_| invalid())?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        cfg.validate(line, key, value)?;
    }
    Ok(cfg)
}
