//! Online model-based filtering of incremental-encoder wheel speed.
//!
//! The fixed-position algorithm divides a nominal sector angle by the time
//! between pulses, so any deviation of the real magnet spacing from nominal
//! shows up as periodic noise at multiples of the rotation frequency. This
//! crate estimates the per-sector geometry online with recursive
//! constrained least squares and divides by the *estimated* angles instead,
//! which removes the periodic disturbance while leaving narrow-band signal
//! content (such as the cadence ripple of a bicycle rider) untouched.
//!
//! Subsystems:
//!
//! - [`sim`]: synthetic encoder oracle (known geometry + speed profile →
//!   pulse train) for testing everything else against ground truth.
//! - [`speed`]: streaming pulse ingestion, basic and mean-revolution speed,
//!   per-sector regression observations.
//! - [`cls`]: batch and recursive constrained least-squares estimation with
//!   forgetting, speed gating, and compensated speed output.
//! - [`pipeline`]: the online filter tying ingestion, gating, and
//!   estimation together.
//! - [`spectral`]: resampling of event-based samples and amplitude spectra
//!   with harmonic marking and cadence-peak extraction.
//! - [`baseline`]: low-pass and adaptive-notch reference filters.
//! - [`config`] / [`io`]: run configuration and the CSV artifact schemas.

pub mod baseline;
pub mod cls;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod sim;
pub mod spectral;
pub mod speed;

pub use cls::{batch_estimate, effective_window, EstimatorState, GateConfig};
pub use config::RunConfig;
pub use pipeline::SpeedFilter;
pub use sim::{generate_pulses, MagneticWheel, PulseTrain, SpeedProfile};
pub use speed::{IngestState, SectorObservation, SpeedSample};
pub use spectral::{amplitude_spectrum, resample, Spectrum, UniformSeries};
