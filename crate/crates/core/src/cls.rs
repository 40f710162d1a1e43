//! Constrained least-squares estimation of per-sector angles.
//!
//! Each revolution yields one observation of every sector's apparent width;
//! the true widths minimize the squared residual subject to the closure
//! constraint that the widths sum to 2π. The batch solution is the
//! column-wise mean with the constraint violation split evenly over the L
//! sectors and removed; the recursive form maintains the same quantity
//! with an exponential forgetting factor so stale geometry ages out.
//!
//! A speed gate enables estimation only above a linear-speed threshold and
//! resets it below, because a stopped wheel can creep backwards without the
//! encoder noticing and corrupt the sector labeling.

use std::f64::consts::TAU;

use crate::error::ClsError;
use crate::speed::SectorObservation;

/// Effective averaging window (revolutions) for a forgetting factor:
/// `N_w = 1/(1-μ)`. Defined for `0 < μ < 1`.
pub fn effective_window(mu: f64) -> Result<f64, ClsError> {
    if !(mu.is_finite() && mu > 0.0 && mu < 1.0) {
        return Err(ClsError::OutOfRange(mu));
    }
    Ok(1.0 / (1.0 - mu))
}

/// Forgetting factor giving an effective window of `window` revolutions:
/// `μ = 1 - 1/N_w`.
pub fn window_forgetting(window: u32) -> Result<f64, ClsError> {
    if window == 0 {
        return Err(ClsError::OutOfRange(0.0));
    }
    Ok(1.0 - 1.0 / window as f64)
}

/// Closed-form batch estimate of the sector angles from `N` complete
/// revolution rows.
///
/// Returns the column-wise mean with the constraint violation divided into
/// L equal parts and removed, which is the minimizer of the stacked squared
/// residual subject to the angles summing to 2π.
pub fn batch_estimate(rows: &[Vec<f64>]) -> Result<Vec<f64>, ClsError> {
    let first = rows.first().ok_or(ClsError::EmptyData)?;
    let l = first.len();
    if l == 0 {
        return Err(ClsError::EmptyData);
    }
    let mut mean = vec![0.0f64; l];
    for (r, row) in rows.iter().enumerate() {
        if row.len() != l {
            return Err(ClsError::RowLengthMismatch {
                expected: l,
                got: row.len(),
            });
        }
        for (i, y) in row.iter().enumerate() {
            if !y.is_finite() {
                return Err(ClsError::NonFiniteObservation { row: r, sector: i });
            }
            mean[i] += y;
        }
    }
    let n = rows.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    Ok(project_onto_constraint(&mean))
}

/// Remove the closure violation from an unconstrained estimate: subtract
/// `(Σα - 2π)/L` from every component. This is the Euclidean projection
/// onto the hyperplane `Σα = 2π`.
fn project_onto_constraint(alpha_unc: &[f64]) -> Vec<f64> {
    let violation = (alpha_unc.iter().sum::<f64>() - TAU) / alpha_unc.len() as f64;
    alpha_unc.iter().map(|a| a - violation).collect()
}

/// Speed-gate configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    /// Linear speed (km/h) at or above which estimation is enabled;
    /// below it the estimator resets.
    pub enable_threshold_kmh: f64,
    /// Wheel radius (m) used to convert rotational to linear speed.
    pub wheel_radius_m: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            enable_threshold_kmh: 5.0,
            wheel_radius_m: 0.334,
        }
    }
}

/// Outcome of applying the speed gate to one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateDecision {
    /// Estimation enabled (stays or becomes active).
    Enabled,
    /// Speed below threshold: the estimator state was reset.
    Reset,
}

/// Recursive constrained least-squares estimator state.
///
/// Before any update the estimate equals the nominal geometry, so the
/// compensated speed degenerates to the basic fixed-position algorithm.
#[derive(Debug, Clone)]
pub struct EstimatorState {
    sector_count: usize,
    mu: f64,
    n: f64,
    alpha_unc: Vec<f64>,
    alpha_hat: Vec<f64>,
    enabled: bool,
    pending: Vec<(usize, f64)>,
    update_count: u64,
}

impl EstimatorState {
    /// Estimator with a forgetting factor in `(0, 1]`; `μ = 1` keeps every
    /// revolution with equal weight (pure running mean).
    pub fn with_forgetting(sector_count: usize, mu: f64) -> Result<Self, ClsError> {
        if sector_count < 2 {
            return Err(ClsError::BadSector {
                sector: sector_count,
                count: sector_count,
            });
        }
        if !(mu.is_finite() && mu > 0.0 && mu <= 1.0) {
            return Err(ClsError::OutOfRange(mu));
        }
        let alpha_nom = TAU / sector_count as f64;
        Ok(Self {
            sector_count,
            mu,
            n: 0.0,
            alpha_unc: vec![alpha_nom; sector_count],
            alpha_hat: vec![alpha_nom; sector_count],
            enabled: false,
            pending: Vec::with_capacity(sector_count),
            update_count: 0,
        })
    }

    /// Estimator tuned by effective window length in revolutions
    /// (`μ = 1 - 1/N_w`). A window of 1 keeps only the latest revolution.
    pub fn with_window(sector_count: usize, window: u32) -> Result<Self, ClsError> {
        if window == 0 {
            return Err(ClsError::OutOfRange(0.0));
        }
        if window == 1 {
            // μ = 0 lies outside (0, 1]; emulate the single-revolution
            // window with a forgetting factor negligibly above zero.
            return Self::with_forgetting(sector_count, f64::MIN_POSITIVE);
        }
        Self::with_forgetting(sector_count, 1.0 - 1.0 / window as f64)
    }

    pub fn sector_count(&self) -> usize {
        self.sector_count
    }

    pub fn forgetting(&self) -> f64 {
        self.mu
    }

    /// Effective sample count `n(k)` accumulated so far.
    pub fn effective_samples(&self) -> f64 {
        self.n
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    /// Number of completed revolution updates since the last reset.
    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    /// Current constrained angle estimates (radians).
    pub fn angle_estimates(&self) -> &[f64] {
        &self.alpha_hat
    }

    /// Current unconstrained running mean (radians).
    pub fn unconstrained(&self) -> &[f64] {
        &self.alpha_unc
    }

    /// `|Σ α_unc - 2π|`: how far the unconstrained mean drifts from closure.
    pub fn constraint_violation(&self) -> f64 {
        (self.alpha_unc.iter().sum::<f64>() - TAU).abs()
    }

    /// Force the estimator on without a gate decision (for offline runs).
    pub fn enable(&mut self) {
        self.enabled = true;
    }

    /// Apply the speed gate: at or above the threshold estimation is
    /// enabled; below it the state resets to nominal geometry and the
    /// pending revolution is discarded.
    pub fn gate(&mut self, omega: f64, cfg: &GateConfig) -> GateDecision {
        let kmh = omega * cfg.wheel_radius_m * 3.6;
        if kmh >= cfg.enable_threshold_kmh {
            self.enabled = true;
            GateDecision::Enabled
        } else {
            self.reset();
            GateDecision::Reset
        }
    }

    /// Reset to the cold state: nominal angles, zero effective samples,
    /// pending revolution cleared, estimation disabled.
    pub fn reset(&mut self) {
        let alpha_nom = TAU / self.sector_count as f64;
        self.alpha_unc.fill(alpha_nom);
        self.alpha_hat.fill(alpha_nom);
        self.n = 0.0;
        self.enabled = false;
        self.pending.clear();
        self.update_count = 0;
    }

    /// One recursive update from a complete revolution row `Y(k)`:
    ///
    /// ```text
    /// n ← μ·n + 1
    /// α_unc ← α_unc + (Y - α_unc)/n
    /// α_hat ← α_unc - (Σα_unc - 2π)/L
    /// ```
    ///
    /// The first update after a reset has weight 1, so the estimate then
    /// equals the single-row batch solution exactly.
    pub fn update(&mut self, row: &[f64]) -> Result<(), ClsError> {
        if !self.enabled {
            return Err(ClsError::EstimatorDisabled);
        }
        if row.len() != self.sector_count {
            return Err(ClsError::IncompleteRevolution {
                expected: self.sector_count,
                got: row.len(),
            });
        }
        if let Some(i) = row.iter().position(|y| !y.is_finite()) {
            return Err(ClsError::NonFiniteObservation { row: 0, sector: i });
        }
        self.n = self.mu * self.n + 1.0;
        for (a, y) in self.alpha_unc.iter_mut().zip(row) {
            *a += (y - *a) / self.n;
        }
        self.alpha_hat = project_onto_constraint(&self.alpha_unc);
        self.update_count += 1;
        Ok(())
    }

    /// Feed one streaming observation; observations are buffered until a
    /// full revolution (sectors `0..L` in order) is assembled, then a
    /// recursive update fires. Returns the revolution number on update.
    ///
    /// Observations arriving while disabled, or out of cyclic order (which
    /// happens only across resets), discard the partial revolution.
    pub fn add_observation(&mut self, obs: &SectorObservation) -> Result<Option<u64>, ClsError> {
        if obs.sector >= self.sector_count {
            return Err(ClsError::BadSector {
                sector: obs.sector,
                count: self.sector_count,
            });
        }
        if !self.enabled {
            self.pending.clear();
            return Ok(None);
        }
        if obs.sector != self.pending.len() {
            self.pending.clear();
            if obs.sector != 0 {
                return Ok(None);
            }
        }
        self.pending.push((obs.sector, obs.y));
        if self.pending.len() < self.sector_count {
            return Ok(None);
        }
        let row: Vec<f64> = self.pending.iter().map(|(_, y)| *y).collect();
        self.pending.clear();
        self.update(&row)?;
        Ok(Some(obs.revolution))
    }

    /// Compensated fixed-position speed for one sector traversal:
    /// the estimated sector angle divided by the measured interval.
    pub fn filtered_speed(&self, sector: usize, dt: f64) -> Result<f64, ClsError> {
        if sector >= self.sector_count {
            return Err(ClsError::BadSector {
                sector,
                count: self.sector_count,
            });
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ClsError::NonPositiveDt(dt));
        }
        Ok(self.alpha_hat[sector] / dt)
    }
}
