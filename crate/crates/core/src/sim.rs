//! Synthetic magnetic-encoder oracle.
//!
//! Generates pulse trains from a known wheel geometry and speed profile, so
//! that every estimator in this crate can be tested against exact ground
//! truth. Crossing times are located by bisection on the integrated wheel
//! angle, which has a closed form for every supported profile.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::SimError;

/// Absolute tolerance (seconds) for boundary-crossing bisection.
const CROSSING_TOL: f64 = 1e-12;

/// Encoder wheel geometry: `L` sectors whose true widths deviate from the
/// nominal `2π/L` by per-sector error angles that sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticWheel {
    sector_angles: Vec<f64>,
    theta: Vec<f64>,
}

impl MagneticWheel {
    /// Build a wheel from a sector count and per-sector error angles (radians).
    ///
    /// The errors must sum to zero within 1e-9; inputs inside that tolerance
    /// are re-centered so the geometric closure is exact. Every resulting
    /// sector angle must stay positive.
    pub fn with_errors(sector_count: usize, theta: &[f64]) -> Result<Self, SimError> {
        if sector_count < 2 {
            return Err(SimError::BadSectorCount(sector_count));
        }
        if theta.len() != sector_count {
            return Err(SimError::BadSectorCount(theta.len()));
        }
        let sum: f64 = theta.iter().sum();
        if sum.abs() > 1e-9 || theta.iter().any(|t| !t.is_finite()) {
            return Err(SimError::NonZeroErrorSum(sum));
        }
        // Re-center so the closure constraint holds exactly.
        let mean = sum / sector_count as f64;
        let alpha_nom = TAU / sector_count as f64;
        let theta: Vec<f64> = theta.iter().map(|t| t - mean).collect();
        let sector_angles: Vec<f64> = theta.iter().map(|t| alpha_nom + t).collect();
        if let Some(i) = sector_angles.iter().position(|a| *a <= 0.0) {
            return Err(SimError::NonPositiveSector {
                sector: i,
                angle: sector_angles[i],
            });
        }
        Ok(Self {
            sector_angles,
            theta,
        })
    }

    /// A wheel with perfectly equispaced sectors.
    pub fn ideal(sector_count: usize) -> Result<Self, SimError> {
        Self::with_errors(sector_count, &vec![0.0; sector_count])
    }

    pub fn sector_count(&self) -> usize {
        self.sector_angles.len()
    }

    /// Nominal sector angle `2π/L`.
    pub fn alpha_nom(&self) -> f64 {
        TAU / self.sector_angles.len() as f64
    }

    /// True sector widths (radians).
    pub fn sector_angles(&self) -> &[f64] {
        &self.sector_angles
    }

    /// Per-sector error angles (radians), summing to zero.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Cumulative boundary angle after `i` sectors, `i` in `0..=L`.
    fn boundary(&self, i: usize) -> f64 {
        self.sector_angles[..i].iter().sum()
    }
}

/// Bounds for drawing a random per-sector error pattern.
#[derive(Debug, Clone, Copy)]
pub struct ErrorPattern {
    /// Smallest admissible |error| in radians.
    pub min_abs: f64,
    /// Largest admissible |error| in radians.
    pub max_abs: f64,
    /// Target mean |error| in radians.
    pub mean_abs: f64,
}

impl Default for ErrorPattern {
    /// Magnitudes between 0.05° and 0.98° with a 0.44° mean, typical of a
    /// hand-assembled magnet ring.
    fn default() -> Self {
        Self {
            min_abs: 0.05f64.to_radians(),
            max_abs: 0.98f64.to_radians(),
            mean_abs: 0.44f64.to_radians(),
        }
    }
}

/// Draw a zero-sum error pattern for an even sector count.
///
/// Magnitudes are drawn uniformly in `[min_abs, max_abs]`, rescaled toward
/// the requested mean, and assigned in `+m/-m` pairs at shuffled positions so
/// the pattern sums to zero exactly.
pub fn random_sector_errors<R: Rng + ?Sized>(
    sector_count: usize,
    pattern: &ErrorPattern,
    rng: &mut R,
) -> Result<Vec<f64>, SimError> {
    if sector_count < 2 || !sector_count.is_multiple_of(2) {
        return Err(SimError::BadSectorCount(sector_count));
    }
    let half = sector_count / 2;
    let mut mags: Vec<f64> = (0..half)
        .map(|_| rng.random_range(pattern.min_abs..pattern.max_abs))
        .collect();
    // Nudge the magnitudes toward the target mean, clamping into bounds.
    for _ in 0..8 {
        let mean = mags.iter().sum::<f64>() / half as f64;
        let scale = pattern.mean_abs / mean;
        for m in &mut mags {
            *m = (*m * scale).clamp(pattern.min_abs, pattern.max_abs);
        }
    }
    let mut theta = Vec::with_capacity(sector_count);
    for m in mags {
        theta.push(m);
        theta.push(-m);
    }
    // Fisher-Yates shuffle keeps the zero sum while randomizing placement.
    for i in (1..theta.len()).rev() {
        let j = rng.random_range(0..=i);
        theta.swap(i, j);
    }
    Ok(theta)
}

/// Rotational speed profile ω(t) over the simulation horizon, ω > 0.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedProfile {
    /// Constant ω̄ (rad/s).
    Constant { omega: f64 },
    /// Linear ramp from `omega_start` at t=0 to `omega_end` at `t_end`,
    /// holding `omega_end` afterwards.
    Ramp {
        omega_start: f64,
        omega_end: f64,
        t_end: f64,
    },
    /// ω̄·(1 + a·sin(2π f t)): a cadence-like ripple on a constant base.
    Sinusoid {
        base_omega: f64,
        modulation_amplitude: f64,
        modulation_freq_hz: f64,
    },
    /// Piecewise-linear interpolation through `(t, ω)` knots, holding the
    /// last value afterwards.
    Piecewise { knots: Vec<(f64, f64)> },
}

impl SpeedProfile {
    /// Validate the profile invariants: positivity over the whole horizon
    /// and well-formed parameters.
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            SpeedProfile::Constant { omega } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(SimError::NonPositiveSpeed(*omega));
                }
            }
            SpeedProfile::Ramp {
                omega_start,
                omega_end,
                t_end,
            } => {
                if !(omega_start.is_finite() && *omega_start > 0.0) {
                    return Err(SimError::NonPositiveSpeed(*omega_start));
                }
                if !(omega_end.is_finite() && *omega_end > 0.0) {
                    return Err(SimError::NonPositiveSpeed(*omega_end));
                }
                if !(t_end.is_finite() && *t_end > 0.0) {
                    return Err(SimError::OutOfHorizon(*t_end));
                }
            }
            SpeedProfile::Sinusoid {
                base_omega,
                modulation_amplitude,
                modulation_freq_hz,
            } => {
                if !(base_omega.is_finite() && *base_omega > 0.0) {
                    return Err(SimError::NonPositiveSpeed(*base_omega));
                }
                if !(modulation_amplitude.is_finite()
                    && (0.0..1.0).contains(modulation_amplitude))
                {
                    return Err(SimError::NonPositiveSpeed(
                        base_omega * (1.0 - modulation_amplitude),
                    ));
                }
                if !(modulation_freq_hz.is_finite() && *modulation_freq_hz >= 0.0) {
                    return Err(SimError::OutOfHorizon(*modulation_freq_hz));
                }
            }
            SpeedProfile::Piecewise { knots } => {
                if knots.is_empty() {
                    return Err(SimError::OutOfHorizon(0.0));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(SimError::OutOfHorizon(w[1].0));
                    }
                }
                if let Some(&(_, omega)) = knots.iter().find(|(_, o)| !(*o > 0.0 && o.is_finite()))
                {
                    return Err(SimError::NonPositiveSpeed(omega));
                }
            }
        }
        Ok(())
    }

    /// Instantaneous speed ω(t) in rad/s.
    pub fn omega_at(&self, t: f64) -> Result<f64, SimError> {
        if !t.is_finite() {
            return Err(SimError::OutOfHorizon(t));
        }
        match self {
            SpeedProfile::Constant { omega } => {
                if t < 0.0 {
                    return Err(SimError::OutOfHorizon(t));
                }
                Ok(*omega)
            }
            SpeedProfile::Ramp {
                omega_start,
                omega_end,
                t_end,
            } => {
                if t < 0.0 {
                    return Err(SimError::OutOfHorizon(t));
                }
                if t >= *t_end {
                    Ok(*omega_end)
                } else {
                    Ok(omega_start + (omega_end - omega_start) * t / t_end)
                }
            }
            SpeedProfile::Sinusoid {
                base_omega,
                modulation_amplitude,
                modulation_freq_hz,
            } => {
                if t < 0.0 {
                    return Err(SimError::OutOfHorizon(t));
                }
                Ok(base_omega
                    * (1.0 + modulation_amplitude * (TAU * modulation_freq_hz * t).sin()))
            }
            SpeedProfile::Piecewise { knots } => {
                if t < knots[0].0 {
                    return Err(SimError::OutOfHorizon(t));
                }
                let last = knots[knots.len() - 1];
                if t >= last.0 {
                    return Ok(last.1);
                }
                let idx = knots.partition_point(|(kt, _)| *kt <= t) - 1;
                let (t0, w0) = knots[idx];
                let (t1, w1) = knots[idx + 1];
                Ok(w0 + (w1 - w0) * (t - t0) / (t1 - t0))
            }
        }
    }

    /// Angle covered since the profile's time origin: ∫₀ᵗ ω(τ) dτ.
    ///
    /// Every supported profile integrates in closed form, so the simulated
    /// angle carries no quadrature error.
    pub fn angle_at(&self, t: f64) -> Result<f64, SimError> {
        match self {
            SpeedProfile::Constant { omega } => {
                if t < 0.0 || !t.is_finite() {
                    return Err(SimError::OutOfHorizon(t));
                }
                Ok(omega * t)
            }
            SpeedProfile::Ramp {
                omega_start,
                omega_end,
                t_end,
            } => {
                if t < 0.0 || !t.is_finite() {
                    return Err(SimError::OutOfHorizon(t));
                }
                let slope = (omega_end - omega_start) / t_end;
                if t <= *t_end {
                    Ok(omega_start * t + 0.5 * slope * t * t)
                } else {
                    let ramp_part = omega_start * t_end + 0.5 * slope * t_end * t_end;
                    Ok(ramp_part + omega_end * (t - t_end))
                }
            }
            SpeedProfile::Sinusoid {
                base_omega,
                modulation_amplitude,
                modulation_freq_hz,
            } => {
                if t < 0.0 || !t.is_finite() {
                    return Err(SimError::OutOfHorizon(t));
                }
                if *modulation_freq_hz == 0.0 || *modulation_amplitude == 0.0 {
                    return Ok(base_omega * t);
                }
                let w = TAU * modulation_freq_hz;
                Ok(base_omega * (t + modulation_amplitude * (1.0 - (w * t).cos()) / w))
            }
            SpeedProfile::Piecewise { knots } => {
                if !t.is_finite() || t < knots[0].0 {
                    return Err(SimError::OutOfHorizon(t));
                }
                // Piecewise-linear ω integrates to piecewise-quadratic angle.
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let (t0, w0) = w[0];
                    let (t1, w1) = w[1];
                    if t >= t1 {
                        acc += 0.5 * (w0 + w1) * (t1 - t0);
                    } else {
                        let dt = t - t0;
                        let wt = w0 + (w1 - w0) * dt / (t1 - t0);
                        acc += 0.5 * (w0 + wt) * dt;
                        return Ok(acc);
                    }
                }
                let last = knots[knots.len() - 1];
                Ok(acc + last.1 * (t - last.0))
            }
        }
    }
}

/// Profile evaluator with the piecewise cumulative angles precomputed, so
/// crossing-time searches stay cheap on knot-dense profiles.
enum ProfileEval<'a> {
    Direct(&'a SpeedProfile),
    Piecewise {
        profile: &'a SpeedProfile,
        times: Vec<f64>,
        cum_angle: Vec<f64>,
    },
}

impl<'a> ProfileEval<'a> {
    fn new(profile: &'a SpeedProfile) -> Self {
        match profile {
            SpeedProfile::Piecewise { knots } => {
                let times: Vec<f64> = knots.iter().map(|(t, _)| *t).collect();
                let mut cum_angle = Vec::with_capacity(knots.len());
                let mut acc = 0.0;
                cum_angle.push(0.0);
                for w in knots.windows(2) {
                    acc += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
                    cum_angle.push(acc);
                }
                ProfileEval::Piecewise {
                    profile,
                    times,
                    cum_angle,
                }
            }
            _ => ProfileEval::Direct(profile),
        }
    }

    fn omega_at(&self, t: f64) -> Result<f64, SimError> {
        match self {
            ProfileEval::Direct(p) | ProfileEval::Piecewise { profile: p, .. } => p.omega_at(t),
        }
    }

    fn angle_at(&self, t: f64) -> Result<f64, SimError> {
        match self {
            ProfileEval::Direct(p) => p.angle_at(t),
            ProfileEval::Piecewise {
                profile,
                times,
                cum_angle,
            } => {
                if !t.is_finite() || t < times[0] {
                    return Err(SimError::OutOfHorizon(t));
                }
                let last = times.len() - 1;
                if t >= times[last] {
                    let w_last = profile.omega_at(times[last])?;
                    return Ok(cum_angle[last] + w_last * (t - times[last]));
                }
                let idx = times.partition_point(|kt| *kt <= t) - 1;
                let w0 = profile.omega_at(times[idx])?;
                let wt = profile.omega_at(t)?;
                Ok(cum_angle[idx] + 0.5 * (w0 + wt) * (t - times[idx]))
            }
        }
    }
}

/// Ordered pulse timestamps produced by the encoder, plus the sensor's
/// angular position within sector 0 at t=0.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    timestamps: Vec<f64>,
    start_phase: f64,
}

impl PulseTrain {
    /// Wrap raw timestamps, validating strict monotonicity.
    pub fn from_timestamps(timestamps: Vec<f64>) -> Result<Self, SimError> {
        for (i, w) in timestamps.windows(2).enumerate() {
            if !(w[1] > w[0] && w[1].is_finite()) {
                return Err(SimError::NonMonotonicTimestamps { index: i + 1 });
            }
        }
        if let Some(first) = timestamps.first() {
            if !first.is_finite() {
                return Err(SimError::NonMonotonicTimestamps { index: 0 });
            }
        }
        Ok(Self {
            timestamps,
            start_phase: 0.0,
        })
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn start_phase(&self) -> f64 {
        self.start_phase
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

/// Simulate the pulse train a wheel produces over `[0, t_end]`.
///
/// One timestamp is emitted per crossing of a cumulative sector boundary by
/// the integrated angle `Θ(t) = start_phase + ∫ω`. With `start_phase = 0`
/// the first pulse closes physical sector 0; no pulse is emitted at t=0.
pub fn generate_pulses(
    wheel: &MagneticWheel,
    profile: &SpeedProfile,
    t_end: f64,
    start_phase: f64,
) -> Result<PulseTrain, SimError> {
    profile.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(SimError::OutOfHorizon(t_end));
    }
    if !(0.0..TAU).contains(&start_phase) {
        return Err(SimError::OutOfHorizon(start_phase));
    }
    let l = wheel.sector_count();
    let eval = ProfileEval::new(profile);
    let boundaries: Vec<f64> = (0..=l).map(|i| wheel.boundary(i)).collect();

    // First boundary strictly ahead of the sensor's initial position.
    let mut next_idx = (1..=l)
        .find(|i| boundaries[*i] > start_phase)
        .unwrap_or(l);
    let mut full_turns = 0u64;

    let mut timestamps = Vec::new();
    let mut t_cursor = 0.0f64;
    let total_angle = eval.angle_at(t_end)?;

    loop {
        let target = full_turns as f64 * TAU + boundaries[next_idx] - start_phase;
        if target > total_angle + 1e-9 {
            break;
        }
        let t = crossing_time(&eval, target, t_cursor, t_end)?;
        if t > t_end + CROSSING_TOL {
            break;
        }
        timestamps.push(t);
        t_cursor = t;
        next_idx += 1;
        if next_idx > l {
            next_idx = 1;
            full_turns += 1;
        }
    }

    Ok(PulseTrain {
        timestamps,
        start_phase,
    })
}

/// As [`generate_pulses`], with zero-mean Gaussian timestamp jitter of the
/// given standard deviation (seconds) added to every pulse.
pub fn generate_pulses_with_jitter<R: Rng + ?Sized>(
    wheel: &MagneticWheel,
    profile: &SpeedProfile,
    t_end: f64,
    start_phase: f64,
    jitter_sigma: f64,
    rng: &mut R,
) -> Result<PulseTrain, SimError> {
    let clean = generate_pulses(wheel, profile, t_end, start_phase)?;
    if jitter_sigma == 0.0 {
        return Ok(clean);
    }
    if !(jitter_sigma.is_finite() && jitter_sigma > 0.0) {
        return Err(SimError::OutOfHorizon(jitter_sigma));
    }
    let normal = Normal::new(0.0, jitter_sigma).expect("finite positive sigma");
    let mut timestamps: Vec<f64> = clean
        .timestamps
        .iter()
        .map(|t| t + normal.sample(rng))
        .collect();
    // Jitter far smaller than any gap in practice; clamp to keep the train
    // strictly increasing regardless.
    for i in 1..timestamps.len() {
        if timestamps[i] <= timestamps[i - 1] {
            timestamps[i] = timestamps[i - 1] + 1e-9;
        }
    }
    Ok(PulseTrain {
        timestamps,
        start_phase,
    })
}

/// Find the time at which the integrated angle reaches `target`, given that
/// the crossing lies at or after `t_lo`. The angle is strictly increasing
/// because ω > 0, so plain bracketing plus bisection is robust.
fn crossing_time(
    profile: &ProfileEval<'_>,
    target: f64,
    t_lo: f64,
    t_end: f64,
) -> Result<f64, SimError> {
    let mut lo = t_lo;
    let angle_lo = profile.angle_at(lo)?;
    if angle_lo >= target {
        return Ok(lo);
    }
    // Expand the bracket using the local speed as a step hint.
    let mut step = (target - angle_lo) / profile.omega_at(lo)?.max(1e-12);
    let mut hi = lo + step;
    let horizon = t_end * 2.0 + 1.0;
    while profile.angle_at(hi.min(horizon))? < target {
        if hi >= horizon {
            return Ok(horizon); // caller discards anything past t_end
        }
        lo = hi;
        step *= 2.0;
        hi += step;
    }
    hi = hi.min(horizon);
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // f64 resolution reached
        }
        if profile.angle_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_wheel_has_ten_degree_sectors() {
        let wheel = MagneticWheel::ideal(36).unwrap();
        for a in wheel.sector_angles() {
            assert!((a - 10f64.to_radians()).abs() < 1e-15, "angle {a}");
            assert!((a - 0.174533).abs() < 1e-6);
        }
        assert!((wheel.sector_angles().iter().sum::<f64>() - TAU).abs() < 1e-12);
    }

    #[test]
    fn two_sector_wheel_splits_at_plus_minus_error() {
        let wheel = MagneticWheel::with_errors(2, &[0.1, -0.1]).unwrap();
        let a = wheel.sector_angles();
        assert!((a[0] - (std::f64::consts::PI + 0.1)).abs() < 1e-15);
        assert!((a[1] - (std::f64::consts::PI - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn wheel_rejects_bad_inputs() {
        assert!(matches!(
            MagneticWheel::with_errors(1, &[0.0]),
            Err(SimError::BadSectorCount(1))
        ));
        assert!(matches!(
            MagneticWheel::with_errors(2, &[0.1, 0.1]),
            Err(SimError::NonZeroErrorSum(_))
        ));
        // Sector 1 collapses to a non-positive width.
        let alpha = TAU / 2.0;
        assert!(matches!(
            MagneticWheel::with_errors(2, &[alpha, -alpha]),
            Err(SimError::NonPositiveSector { .. })
        ));
    }

    #[test]
    fn wheel_recenters_small_residual_sums() {
        let wheel = MagneticWheel::with_errors(4, &[0.01 + 2e-10, -0.01, 0.02, -0.02]).unwrap();
        let sum: f64 = wheel.theta().iter().sum();
        assert!(sum.abs() < 1e-15, "sum {sum}");
    }

    #[test]
    fn random_errors_match_requested_stats() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pattern = ErrorPattern::default();
        let theta = random_sector_errors(36, &pattern, &mut rng).unwrap();
        assert_eq!(theta.len(), 36);
        let sum: f64 = theta.iter().sum();
        assert!(sum.abs() < 1e-15);
        let mean_abs = theta.iter().map(|t| t.abs()).sum::<f64>() / 36.0;
        assert!(
            (mean_abs - pattern.mean_abs).abs() < 0.01f64.to_radians(),
            "mean |theta| {} vs target {}",
            mean_abs.to_degrees(),
            pattern.mean_abs.to_degrees()
        );
        for t in &theta {
            assert!(t.abs() >= pattern.min_abs - 1e-12 && t.abs() <= pattern.max_abs + 1e-12);
        }
        // Wheel construction accepts the pattern as-is.
        MagneticWheel::with_errors(36, &theta).unwrap();
    }

    #[test]
    fn uniform_rotation_yields_evenly_spaced_pulses() {
        let wheel = MagneticWheel::ideal(36).unwrap();
        let profile = SpeedProfile::Constant { omega: TAU };
        let train = generate_pulses(&wheel, &profile, 1.0, 0.0).unwrap();
        assert_eq!(train.len(), 36);
        for (i, t) in train.timestamps().iter().enumerate() {
            let expected = (i + 1) as f64 / 36.0;
            assert!((t - expected).abs() < 1e-10, "pulse {i}: {t} vs {expected}");
        }
    }

    #[test]
    fn constant_speed_gap_matches_nominal_angle_over_speed() {
        let wheel = MagneticWheel::ideal(36).unwrap();
        let profile = SpeedProfile::Constant { omega: 17.64 };
        let train = generate_pulses(&wheel, &profile, 1.0, 0.0).unwrap();
        let expected_gap = wheel.alpha_nom() / 17.64;
        assert!((expected_gap - 9.894e-3).abs() < 5e-6, "gap {expected_gap}");
        let ts = train.timestamps();
        let mut prev = 0.0;
        for t in ts {
            assert!(((t - prev) - expected_gap).abs() < 1e-10);
            prev = *t;
        }
    }

    #[test]
    fn two_sector_wheel_alternates_gaps() {
        let wheel = MagneticWheel::with_errors(2, &[0.1, -0.1]).unwrap();
        let profile = SpeedProfile::Constant { omega: 1.0 };
        let train = generate_pulses(&wheel, &profile, 20.0, 0.0).unwrap();
        let ts = train.timestamps();
        assert!(ts.len() >= 6);
        let mut prev = 0.0;
        for (i, t) in ts.iter().enumerate() {
            let gap = t - prev;
            let expected = if i % 2 == 0 {
                std::f64::consts::PI + 0.1
            } else {
                std::f64::consts::PI - 0.1
            };
            assert!((gap - expected).abs() < 1e-10, "gap {i}: {gap}");
            prev = *t;
        }
    }

    #[test]
    fn profile_evaluation_matches_definitions() {
        let constant = SpeedProfile::Constant { omega: 17.64 };
        assert_eq!(constant.omega_at(5.0).unwrap(), 17.64);

        let flat = SpeedProfile::Sinusoid {
            base_omega: 10.0,
            modulation_amplitude: 0.0,
            modulation_freq_hz: 2.0,
        };
        assert_eq!(flat.omega_at(1.234).unwrap(), 10.0);

        let modulated = SpeedProfile::Sinusoid {
            base_omega: 10.0,
            modulation_amplitude: 0.05,
            modulation_freq_hz: 2.41,
        };
        assert!((modulated.omega_at(0.0).unwrap() - 10.0).abs() < 1e-15);

        assert!(matches!(
            constant.omega_at(-1.0),
            Err(SimError::OutOfHorizon(_))
        ));
    }

    #[test]
    fn piecewise_profile_interpolates_and_holds() {
        let profile = SpeedProfile::Piecewise {
            knots: vec![(0.0, 10.0), (2.0, 20.0)],
        };
        assert!((profile.omega_at(1.0).unwrap() - 15.0).abs() < 1e-15);
        assert!((profile.omega_at(5.0).unwrap() - 20.0).abs() < 1e-15);
        // Angle: 1.0*... trapezoid over [0,2] = 30, then hold 20 rad/s.
        assert!((profile.angle_at(2.0).unwrap() - 30.0).abs() < 1e-12);
        assert!((profile.angle_at(3.0).unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn sinusoid_angle_integral_is_exact() {
        let profile = SpeedProfile::Sinusoid {
            base_omega: 17.64,
            modulation_amplitude: 0.02,
            modulation_freq_hz: 2.41,
        };
        // d/dt of the closed form must give back omega: spot-check by a
        // central difference.
        for &t in &[0.3, 1.7, 12.9] {
            let h = 1e-6;
            let deriv =
                (profile.angle_at(t + h).unwrap() - profile.angle_at(t - h).unwrap()) / (2.0 * h);
            let omega = profile.omega_at(t).unwrap();
            assert!((deriv - omega).abs() < 1e-6, "t={t}: {deriv} vs {omega}");
        }
    }

    #[test]
    fn nonpositive_profiles_are_rejected() {
        let bad = SpeedProfile::Constant { omega: 0.0 };
        let wheel = MagneticWheel::ideal(4).unwrap();
        assert!(matches!(
            generate_pulses(&wheel, &bad, 1.0, 0.0),
            Err(SimError::NonPositiveSpeed(_))
        ));
        let bad_knot = SpeedProfile::Piecewise {
            knots: vec![(0.0, 5.0), (1.0, -1.0)],
        };
        assert!(matches!(
            generate_pulses(&wheel, &bad_knot, 1.0, 0.0),
            Err(SimError::NonPositiveSpeed(_))
        ));
    }

    #[test]
    fn start_phase_delays_the_first_pulse() {
        let wheel = MagneticWheel::ideal(4).unwrap();
        let profile = SpeedProfile::Constant { omega: 1.0 };
        let phase = 0.5; // inside sector 0 (width pi/2)
        let train = generate_pulses(&wheel, &profile, 10.0, phase).unwrap();
        let expected_first = wheel.sector_angles()[0] - phase;
        assert!((train.timestamps()[0] - expected_first).abs() < 1e-10);
    }

    #[test]
    fn jitter_preserves_monotonicity() {
        let wheel = MagneticWheel::ideal(36).unwrap();
        let profile = SpeedProfile::Constant { omega: 17.64 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let train =
            generate_pulses_with_jitter(&wheel, &profile, 5.0, 0.0, 10e-6, &mut rng).unwrap();
        for w in train.timestamps().windows(2) {
            assert!(w[1] > w[0]);
        }
        // Jitter should stay small against the ~9.9 ms gaps.
        let clean = generate_pulses(&wheel, &profile, 5.0, 0.0).unwrap();
        assert_eq!(train.len(), clean.len());
        for (a, b) in train.timestamps().iter().zip(clean.timestamps()) {
            assert!((a - b).abs() < 1e-4);
        }
    }
}
