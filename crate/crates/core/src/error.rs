//! Error types for every subsystem in the crate.

use std::fmt;

/// Errors from wheel construction and pulse generation.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// Sector count below 2 or inconsistent with the error vector.
    BadSectorCount(usize),
    /// Per-sector errors do not sum to zero within tolerance.
    NonZeroErrorSum(f64),
    /// A sector angle collapsed to zero or below.
    NonPositiveSector { sector: usize, angle: f64 },
    /// The speed profile evaluates to zero or below somewhere on the horizon.
    NonPositiveSpeed(f64),
    /// Evaluation outside the profile's defined horizon, or a malformed
    /// horizon/parameter.
    OutOfHorizon(f64),
    /// Raw timestamps are not strictly increasing.
    NonMonotonicTimestamps { index: usize },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::BadSectorCount(l) => write!(f, "invalid sector count {l} (need >= 2)"),
            SimError::NonZeroErrorSum(s) => {
                write!(f, "sector errors sum to {s:e}, expected 0 within 1e-9")
            }
            SimError::NonPositiveSector { sector, angle } => {
                write!(f, "sector {sector} has non-positive angle {angle}")
            }
            SimError::NonPositiveSpeed(w) => write!(f, "speed profile reaches {w} rad/s (<= 0)"),
            SimError::OutOfHorizon(t) => write!(f, "value {t} outside the defined horizon"),
            SimError::NonMonotonicTimestamps { index } => {
                write!(f, "timestamp at index {index} not strictly increasing")
            }
        }
    }
}

impl std::error::Error for SimError {}

/// Errors from streaming pulse ingestion.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedError {
    /// A pulse arrived at or before the previous one.
    NonMonotonicTimestamp { t: f64, last: f64 },
    /// Non-positive speed or radius where positive values are required.
    NonPositiveInput(f64),
    /// Sector count below 2.
    BadSectorCount(usize),
}

impl fmt::Display for SpeedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpeedError::NonMonotonicTimestamp { t, last } => {
                write!(f, "pulse at t={t} not after previous pulse at t={last}")
            }
            SpeedError::NonPositiveInput(v) => write!(f, "non-positive input {v}"),
            SpeedError::BadSectorCount(l) => write!(f, "invalid sector count {l} (need >= 2)"),
        }
    }
}

impl std::error::Error for SpeedError {}

/// Errors from the constrained least-squares estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum ClsError {
    /// No observation rows were provided.
    EmptyData,
    /// An observation is NaN or infinite.
    NonFiniteObservation { row: usize, sector: usize },
    /// Observation rows disagree on the sector count.
    RowLengthMismatch { expected: usize, got: usize },
    /// Update requested while the estimator is gated off.
    EstimatorDisabled,
    /// An update row does not cover one full revolution.
    IncompleteRevolution { expected: usize, got: usize },
    /// Sector index outside `[0, L)`.
    BadSector { sector: usize, count: usize },
    /// Non-positive inter-pulse interval.
    NonPositiveDt(f64),
    /// Forgetting factor outside the domain of the requested quantity.
    OutOfRange(f64),
}

impl fmt::Display for ClsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClsError::EmptyData => write!(f, "no observations provided"),
            ClsError::NonFiniteObservation { row, sector } => {
                write!(f, "non-finite observation at row {row}, sector {sector}")
            }
            ClsError::RowLengthMismatch { expected, got } => {
                write!(f, "observation row has {got} entries, expected {expected}")
            }
            ClsError::EstimatorDisabled => write!(f, "estimator is disabled by the speed gate"),
            ClsError::IncompleteRevolution { expected, got } => {
                write!(f, "revolution row has {got} observations, expected {expected}")
            }
            ClsError::BadSector { sector, count } => {
                write!(f, "sector {sector} out of range (count {count})")
            }
            ClsError::NonPositiveDt(dt) => write!(f, "non-positive interval {dt}"),
            ClsError::OutOfRange(mu) => {
                write!(f, "forgetting factor {mu} outside the valid range")
            }
        }
    }
}

impl std::error::Error for ClsError {}

/// Errors from resampling and spectral analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    /// Fewer than two usable samples.
    InsufficientData,
    /// The requested speed field is absent from every sample.
    FieldAbsent,
    /// The series is too short for a meaningful spectrum.
    TooShort(usize),
    /// Non-positive resampling rate.
    BadRate(f64),
    /// No significant peak outside the excluded harmonic bands.
    NoPeak,
    /// Gear gain or exclusion width outside its domain.
    BadParameter(f64),
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::InsufficientData => write!(f, "need at least two usable samples"),
            SpectralError::FieldAbsent => write!(f, "requested field absent from all samples"),
            SpectralError::TooShort(n) => write!(f, "series of length {n} too short (need >= 16)"),
            SpectralError::BadRate(r) => write!(f, "non-positive sample rate {r}"),
            SpectralError::NoPeak => write!(f, "no significant peak outside harmonic bands"),
            SpectralError::BadParameter(v) => write!(f, "parameter {v} outside its valid range"),
        }
    }
}

impl std::error::Error for SpectralError {}

/// Errors from the reference filters.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineError {
    /// Cutoff outside `(0, rate/2)` or order below 1.
    BadCutoff { cutoff_hz: f64, rate_hz: f64 },
    /// A notch center at or above the Nyquist frequency.
    NotchAboveNyquist { freq_hz: f64, rate_hz: f64 },
    /// Frequency track length differs from the series length.
    TrackLengthMismatch { series: usize, track: usize },
    /// Non-positive or non-finite entry in the frequency track.
    BadTrack { index: usize },
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::BadCutoff { cutoff_hz, rate_hz } => {
                write!(f, "cutoff {cutoff_hz} Hz invalid for rate {rate_hz} Hz")
            }
            BaselineError::NotchAboveNyquist { freq_hz, rate_hz } => {
                write!(f, "notch at {freq_hz} Hz at or above Nyquist for rate {rate_hz} Hz")
            }
            BaselineError::TrackLengthMismatch { series, track } => {
                write!(f, "frequency track length {track} != series length {series}")
            }
            BaselineError::BadTrack { index } => {
                write!(f, "frequency track entry {index} not a positive finite value")
            }
        }
    }
}

impl std::error::Error for BaselineError {}

/// Errors from the streaming filter pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    Speed(SpeedError),
    Estimator(ClsError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Speed(e) => write!(f, "{e}"),
            PipelineError::Estimator(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<SpeedError> for PipelineError {
    fn from(e: SpeedError) -> Self {
        PipelineError::Speed(e)
    }
}

impl From<ClsError> for PipelineError {
    fn from(e: ClsError) -> Self {
        PipelineError::Estimator(e)
    }
}

/// Errors from configuration files.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// A key the schema does not define.
    UnknownKey { line: usize, key: String },
    /// A value failed to parse or violates an invariant.
    InvalidValue { line: usize, key: String, value: String },
    /// A line that is not `key = value`, a comment, or blank.
    Malformed { line: usize },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownKey { line, key } => {
                write!(f, "line {line}: unknown key '{key}'")
            }
            ConfigError::InvalidValue { line, key, value } => {
                write!(f, "line {line}: invalid value '{value}' for key '{key}'")
            }
            ConfigError::Malformed { line } => {
                write!(f, "line {line}: expected 'key = value'")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Errors from CSV reading and writing.
#[derive(Debug)]
pub enum CsvError {
    Io(std::io::Error),
    /// A malformed row; `line` is 1-based and counts the header.
    Parse { line: usize, message: String },
    /// The header row does not match the expected schema.
    BadHeader { expected: String, got: String },
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsvError::Io(e) => write!(f, "{e}"),
            CsvError::Parse { line, message } => write!(f, "line {line}: {message}"),
            CsvError::BadHeader { expected, got } => {
                write!(f, "bad header '{got}', expected '{expected}'")
            }
        }
    }
}

impl std::error::Error for CsvError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CsvError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for CsvError {
    fn from(e: std::io::Error) -> Self {
        CsvError::Io(e)
    }
}
