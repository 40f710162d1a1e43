//! Frequency-domain analysis of event-based speed samples.
//!
//! Event-based samples are non-uniform in time, so they are first linearly
//! interpolated onto a uniform grid; the single-sided amplitude spectrum
//! then reveals the harmonic disturbance comb at multiples of the rotation
//! frequency and the cadence ripple between them.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::SpectralError;
use crate::speed::SpeedSample;

/// Which speed signal of a sample to analyze.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedField {
    Basic,
    Rev,
    Filtered,
}

impl SpeedField {
    fn get(&self, sample: &SpeedSample) -> Option<f64> {
        match self {
            SpeedField::Basic => Some(sample.omega_basic),
            SpeedField::Rev => sample.omega_rev,
            SpeedField::Filtered => sample.omega_filtered,
        }
    }
}

/// Uniformly sampled speed series.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSeries {
    /// Time of the first sample (s).
    pub t0: f64,
    /// Sample rate (Hz).
    pub rate: f64,
    /// Speed values (rad/s).
    pub values: Vec<f64>,
}

impl UniformSeries {
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Restrict to samples with `t_start <= t <= t_end`.
    pub fn slice_time(&self, t_start: f64, t_end: f64) -> UniformSeries {
        let lo = ((t_start - self.t0) * self.rate).ceil().max(0.0) as usize;
        let hi = (((t_end - self.t0) * self.rate).floor() as isize + 1).max(0) as usize;
        let hi = hi.min(self.values.len());
        let lo = lo.min(hi);
        UniformSeries {
            t0: self.t0 + lo as f64 / self.rate,
            rate: self.rate,
            values: self.values[lo..hi].to_vec(),
        }
    }
}

/// Linearly interpolate one speed field onto a uniform grid spanning the
/// first through last event carrying that field.
pub fn resample(
    samples: &[SpeedSample],
    field: SpeedField,
    rate: f64,
) -> Result<UniformSeries, SpectralError> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(SpectralError::BadRate(rate));
    }
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|s| field.get(s).map(|v| (s.t, v)))
        .collect();
    if points.is_empty() {
        if samples.is_empty() {
            return Err(SpectralError::InsufficientData);
        }
        return Err(SpectralError::FieldAbsent);
    }
    if points.len() < 2 {
        return Err(SpectralError::InsufficientData);
    }
    let t0 = points[0].0;
    let t1 = points[points.len() - 1].0;
    let count = ((t1 - t0) * rate + 1e-9).floor() as usize + 1;
    let values = interpolate_onto(&points, t0, rate, count);
    Ok(UniformSeries { t0, rate, values })
}

/// Interpolate one speed field onto the grid of an existing series, so
/// that several signals line up sample for sample (a comparison pipeline
/// needs a common time base). Values outside the field's event span clamp
/// to its edge values.
pub fn resample_onto(
    samples: &[SpeedSample],
    field: SpeedField,
    grid: &UniformSeries,
) -> Result<UniformSeries, SpectralError> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|s| field.get(s).map(|v| (s.t, v)))
        .collect();
    if points.is_empty() {
        if samples.is_empty() {
            return Err(SpectralError::InsufficientData);
        }
        return Err(SpectralError::FieldAbsent);
    }
    if points.len() < 2 {
        return Err(SpectralError::InsufficientData);
    }
    Ok(UniformSeries {
        t0: grid.t0,
        rate: grid.rate,
        values: interpolate_onto(&points, grid.t0, grid.rate, grid.values.len()),
    })
}

/// Interpolate raw `(t, value)` points (sorted by time) onto the grid of
/// an existing series, clamping outside the point span. Used to align an
/// externally recorded reference trace with resampled speed signals.
pub fn interpolate_points(
    points: &[(f64, f64)],
    grid: &UniformSeries,
) -> Result<UniformSeries, SpectralError> {
    if points.len() < 2 {
        return Err(SpectralError::InsufficientData);
    }
    Ok(UniformSeries {
        t0: grid.t0,
        rate: grid.rate,
        values: interpolate_onto(points, grid.t0, grid.rate, grid.values.len()),
    })
}

/// Linear interpolation of `(t, v)` points (sorted by t) onto the grid
/// `t0 + i/rate`, `i` in `0..count`. Grid points outside the point span
/// clamp to the edge values.
pub(crate) fn interpolate_onto(
    points: &[(f64, f64)],
    t0: f64,
    rate: f64,
    count: usize,
) -> Vec<f64> {
    let mut values = Vec::with_capacity(count);
    let mut seg = 0usize;
    for i in 0..count {
        let t = t0 + i as f64 / rate;
        while seg + 2 < points.len() && points[seg + 1].0 < t {
            seg += 1;
        }
        let (ta, va) = points[seg];
        let (tb, vb) = points[seg + 1];
        let v = if t <= ta {
            va
        } else if t >= tb {
            vb
        } else {
            va + (vb - va) * (t - ta) / (tb - ta)
        };
        values.push(v);
    }
    values
}

/// Analysis window applied before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    /// No tapering; exact for tones on a bin.
    Rect,
    /// Hann taper; limits leakage on quasi-stationary rides.
    Hann,
}

/// Single-sided amplitude spectrum of a speed series.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin frequencies (Hz), 0 through Nyquist, spacing `rate/len`.
    pub freqs: Vec<f64>,
    /// Bin amplitudes (rad/s).
    pub amps: Vec<f64>,
    /// Rotation frequency f̄ (Hz) of the analyzed window, taken from the
    /// series mean speed: f̄ = mean(ω)/2π. Override if the series is not a
    /// wheel-speed signal.
    pub fundamental: f64,
}

impl Spectrum {
    /// Frequency spacing between bins (Hz).
    pub fn bin_width(&self) -> f64 {
        if self.freqs.len() > 1 {
            self.freqs[1] - self.freqs[0]
        } else {
            0.0
        }
    }

    /// Largest amplitude within `halfwidth` of `freq` (0 if the band is
    /// empty).
    pub fn peak_near(&self, freq: f64, halfwidth: f64) -> f64 {
        self.freqs
            .iter()
            .zip(&self.amps)
            .filter(|(f, _)| (**f - freq).abs() <= halfwidth)
            .map(|(_, a)| *a)
            .fold(0.0, f64::max)
    }
}

/// Single-sided amplitude spectrum after mean removal.
///
/// The window is normalized by its coherent gain, so an on-bin tone of
/// amplitude `a` shows a peak of `a` under either window.
pub fn amplitude_spectrum(
    series: &UniformSeries,
    window: WindowKind,
) -> Result<Spectrum, SpectralError> {
    let n = series.values.len();
    if n < 16 {
        return Err(SpectralError::TooShort(n));
    }
    let mean = series.mean();
    let taper: Vec<f64> = match window {
        WindowKind::Rect => vec![1.0; n],
        WindowKind::Hann => (0..n)
            .map(|i| 0.5 * (1.0 - (TAU * i as f64 / (n - 1) as f64).cos()))
            .collect(),
    };
    let gain: f64 = taper.iter().sum();

    let mut buf: Vec<Complex<f64>> = series
        .values
        .iter()
        .zip(&taper)
        .map(|(v, w)| Complex::new((v - mean) * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let bins = n / 2 + 1;
    let mut freqs = Vec::with_capacity(bins);
    let mut amps = Vec::with_capacity(bins);
    for (k, value) in buf.iter().take(bins).enumerate() {
        freqs.push(k as f64 * series.rate / n as f64);
        // Double everything except DC and (for even n) the Nyquist bin.
        let single_sided = if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            1.0
        } else {
            2.0
        };
        amps.push(single_sided * value.norm() / gain);
    }

    Ok(Spectrum {
        freqs,
        amps,
        fundamental: mean / TAU,
    })
}

/// Harmonic positions `[f̄, 2f̄, …, count·f̄]` in Hz.
pub fn harmonic_marks(f_bar: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 * f_bar).collect()
}

/// A detected cadence peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CadencePeak {
    /// Frequency of the strongest non-harmonic line (Hz).
    pub peak_freq_hz: f64,
    /// Pedaling rate (rev/s): `peak_freq / (2·gear_gain)`, the torque
    /// ripple running at twice the crank rate through the transmission.
    pub cadence_rev_s: f64,
}

/// Locate the strongest spectral line outside the harmonic comb of the
/// fundamental and convert it to a pedaling rate.
///
/// Bands of `exclusion_halfwidth` around every harmonic of the fundamental
/// (and the DC bin) are ignored. A peak is only significant if it exceeds
/// three times the median of the considered amplitudes.
pub fn cadence_estimate(
    spectrum: &Spectrum,
    gear_gain: f64,
    exclusion_halfwidth: f64,
) -> Result<CadencePeak, SpectralError> {
    if !(gear_gain.is_finite() && gear_gain > 0.0) {
        return Err(SpectralError::BadParameter(gear_gain));
    }
    if !(exclusion_halfwidth.is_finite() && exclusion_halfwidth >= 0.0) {
        return Err(SpectralError::BadParameter(exclusion_halfwidth));
    }
    let f_bar = spectrum.fundamental;
    if !(f_bar.is_finite() && f_bar > 0.0) {
        return Err(SpectralError::BadParameter(f_bar));
    }

    let mut considered: Vec<(f64, f64)> = Vec::new();
    for (f, a) in spectrum.freqs.iter().zip(&spectrum.amps) {
        if *f <= 0.0 {
            continue;
        }
        let harmonic = (f / f_bar).round();
        if harmonic >= 1.0 && (f - harmonic * f_bar).abs() <= exclusion_halfwidth {
            continue;
        }
        considered.push((*f, *a));
    }
    if considered.is_empty() {
        return Err(SpectralError::NoPeak);
    }

    let mut amps: Vec<f64> = considered.iter().map(|(_, a)| *a).collect();
    amps.sort_by(|a, b| a.total_cmp(b));
    let median = amps[amps.len() / 2];

    let (peak_freq_hz, peak_amp) = considered
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("considered is non-empty");

    // Numerical-noise floor: a real tone always towers over f64 rounding
    // residue of a mean-removed series.
    let floor = 1e-12 * (TAU * f_bar).max(1.0);
    if peak_amp < 3.0 * median || peak_amp < floor {
        return Err(SpectralError::NoPeak);
    }

    Ok(CadencePeak {
        peak_freq_hz,
        cadence_rev_s: peak_freq_hz / (2.0 * gear_gain),
    })
}
