//! Streaming pulse ingestion: sector indexing, the basic fixed-position
//! speed, the mean revolution speed, and per-sector regression observations.
//!
//! The encoder carries no index pulse, so absolute sector identity is
//! unobservable: sector 0 is defined as the first pulse after stream start
//! (or after a gating reset), and labels advance cyclically from there. The
//! downstream estimator is invariant to that cyclic relabeling.

use std::f64::consts::TAU;

use crate::error::SpeedError;

/// One per-sector regression observation, produced once the same sector has
/// been seen on two consecutive revolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorObservation {
    /// Sector label in `[0, L)`.
    pub sector: usize,
    /// Revolution counter (1-based; observations first appear at 2).
    pub revolution: u64,
    /// Time to traverse this sector (s).
    pub dt: f64,
    /// Time between consecutive visits to this sector (s).
    pub dt_rev: f64,
    /// Regression target `2π · dt / dt_rev` (radians): the apparent sector
    /// width under the mean-revolution-speed approximation.
    pub y: f64,
}

/// Event-timestamped speed sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSample {
    /// Pulse time (s).
    pub t: f64,
    /// Sector label in `[0, L)`.
    pub sector: usize,
    /// Basic fixed-position speed `α_nom / Δt` (rad/s).
    pub omega_basic: f64,
    /// Mean revolution speed `2π / Δt_rev` (rad/s); absent during the first
    /// revolution after start or reset.
    pub omega_rev: Option<f64>,
    /// Compensated speed (rad/s); filled by the filter pipeline once the
    /// estimator is enabled.
    pub omega_filtered: Option<f64>,
}

/// Streaming state machine that turns raw pulse times into samples and
/// observations. Single-owner: feed pulses in time order.
#[derive(Debug, Clone)]
pub struct IngestState {
    sector_count: usize,
    alpha_nom: f64,
    next_sector: usize,
    revolution: u64,
    last_pulse_t: Option<f64>,
    per_sector_last_t: Vec<Option<f64>>,
}

impl IngestState {
    pub fn new(sector_count: usize) -> Result<Self, SpeedError> {
        if sector_count < 2 {
            return Err(SpeedError::BadSectorCount(sector_count));
        }
        Ok(Self {
            sector_count,
            alpha_nom: TAU / sector_count as f64,
            next_sector: 0,
            revolution: 1,
            last_pulse_t: None,
            per_sector_last_t: vec![None; sector_count],
        })
    }

    pub fn sector_count(&self) -> usize {
        self.sector_count
    }

    /// Nominal sector angle `2π/L`.
    pub fn alpha_nom(&self) -> f64 {
        self.alpha_nom
    }

    /// Consume one pulse.
    ///
    /// The first pulse only establishes the timing reference and yields
    /// nothing. Every later pulse yields a [`SpeedSample`]; once the same
    /// sector has two timestamps it also yields the [`SectorObservation`]
    /// with `y = 2π·Δt/Δt_rev`.
    pub fn ingest(
        &mut self,
        t: f64,
    ) -> Result<(Option<SpeedSample>, Option<SectorObservation>), SpeedError> {
        if !t.is_finite() {
            return Err(SpeedError::NonMonotonicTimestamp {
                t,
                last: self.last_pulse_t.unwrap_or(f64::NEG_INFINITY),
            });
        }
        let last = match self.last_pulse_t {
            None => {
                self.last_pulse_t = Some(t);
                return Ok((None, None));
            }
            Some(last) => {
                if t <= last {
                    return Err(SpeedError::NonMonotonicTimestamp { t, last });
                }
                last
            }
        };

        let dt = t - last;
        let sector = self.next_sector;
        let revolution = self.revolution;
        let omega_basic = self.alpha_nom / dt;

        let mut omega_rev = None;
        let mut observation = None;
        if let Some(prev_visit) = self.per_sector_last_t[sector] {
            let dt_rev = t - prev_visit;
            omega_rev = Some(TAU / dt_rev);
            observation = Some(SectorObservation {
                sector,
                revolution,
                dt,
                dt_rev,
                y: TAU * dt / dt_rev,
            });
        }

        self.per_sector_last_t[sector] = Some(t);
        self.last_pulse_t = Some(t);
        self.next_sector += 1;
        if self.next_sector == self.sector_count {
            self.next_sector = 0;
            self.revolution += 1;
        }

        let sample = SpeedSample {
            t,
            sector,
            omega_basic,
            omega_rev,
            omega_filtered: None,
        };
        Ok((Some(sample), observation))
    }

    /// Restart sector labeling: the next pulse becomes sector 0 of
    /// revolution 1. The timing reference is kept, so the basic speed stays
    /// available across a gating reset; revolution references are dropped.
    pub fn reset_labeling(&mut self) {
        self.next_sector = 0;
        self.revolution = 1;
        self.per_sector_last_t.fill(None);
    }
}

/// Convert a rotational speed (rad/s) and wheel radius (m) to km/h.
pub fn linear_speed_kmh(omega: f64, radius_m: f64) -> Result<f64, SpeedError> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(SpeedError::NonPositiveInput(omega));
    }
    if !(radius_m.is_finite() && radius_m > 0.0) {
        return Err(SpeedError::NonPositiveInput(radius_m));
    }
    Ok(omega * radius_m * 3.6)
}
