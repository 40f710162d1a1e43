//! Reference filters for comparing against the model-based approach:
//! causal Butterworth low-pass, zero-phase (offline) low-pass, and a bank
//! of adaptive notches tracking harmonics of the rotation frequency.

use std::f64::consts::PI;

use crate::error::BaselineError;
use crate::spectral::UniformSeries;

/// Notch bank parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchBankConfig {
    /// Number of harmonics of the rotation frequency to notch.
    pub harmonics: usize,
    /// -3 dB width of each notch (Hz).
    pub bandwidth_hz: f64,
    /// Attenuation at each notch center (dB).
    pub depth_db: f64,
}

impl Default for NotchBankConfig {
    fn default() -> Self {
        Self {
            harmonics: 3,
            bandwidth_hz: 0.1,
            depth_db: 40.0,
        }
    }
}

/// Second-order section, direct form I.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

impl Biquad {
    fn identity() -> Self {
        Self {
            b0: 1.0,
            b1: 0.0,
            b2: 0.0,
            a1: 0.0,
            a2: 0.0,
            x1: 0.0,
            x2: 0.0,
            y1: 0.0,
            y2: 0.0,
        }
    }

    /// Butterworth-style low-pass section with quality `q`.
    fn lowpass(cutoff_hz: f64, rate_hz: f64, q: f64) -> Self {
        let w0 = 2.0 * PI * cutoff_hz / rate_hz;
        let (sin_w0, cos_w0) = w0.sin_cos();
        let alpha = sin_w0 / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: (1.0 - cos_w0) / 2.0 / a0,
            b1: (1.0 - cos_w0) / a0,
            b2: (1.0 - cos_w0) / 2.0 / a0,
            a1: -2.0 * cos_w0 / a0,
            a2: (1.0 - alpha) / a0,
            x1: 0.0,
            x2: 0.0,
            y1: 0.0,
            y2: 0.0,
        }
    }

    /// First-order low-pass (bilinear transform), for odd filter orders.
    fn lowpass_first_order(cutoff_hz: f64, rate_hz: f64) -> Self {
        let t = (PI * cutoff_hz / rate_hz).tan();
        let a0 = 1.0 + t;
        Self {
            b0: t / a0,
            b1: t / a0,
            b2: 0.0,
            a1: (t - 1.0) / a0,
            a2: 0.0,
            x1: 0.0,
            x2: 0.0,
            y1: 0.0,
            y2: 0.0,
        }
    }

    /// Finite-depth notch: a peaking section cutting `depth_db` at the
    /// center with a -3 dB width of `bandwidth_hz`.
    fn set_notch(&mut self, center_hz: f64, rate_hz: f64, bandwidth_hz: f64, depth_db: f64) {
        let a = 10f64.powf(-depth_db / 40.0);
        let q = center_hz / (bandwidth_hz * a);
        let w0 = 2.0 * PI * center_hz / rate_hz;
        let (sin_w0, cos_w0) = w0.sin_cos();
        let alpha = sin_w0 / (2.0 * q);
        let a0 = 1.0 + alpha / a;
        self.b0 = (1.0 + alpha * a) / a0;
        self.b1 = -2.0 * cos_w0 / a0;
        self.b2 = (1.0 - alpha * a) / a0;
        self.a1 = -2.0 * cos_w0 / a0;
        self.a2 = (1.0 - alpha / a) / a0;
    }

    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    /// Seed the delay line with a steady input, avoiding startup steps.
    fn reset_to(&mut self, input: f64) {
        let output = input * self.dc_gain();
        self.x1 = input;
        self.x2 = input;
        self.y1 = output;
        self.y2 = output;
    }

    fn process(&mut self, input: f64) -> f64 {
        let output = self.b0 * input + self.b1 * self.x1 + self.b2 * self.x2
            - self.a1 * self.y1
            - self.a2 * self.y2;
        self.x2 = self.x1;
        self.x1 = input;
        self.y2 = self.y1;
        self.y1 = output;
        output
    }
}

/// Butterworth pole qualities for an order-`n` cascade; `None` marks the
/// extra first-order section of odd orders.
fn butterworth_sections(cutoff_hz: f64, rate_hz: f64, order: usize) -> Vec<Biquad> {
    let mut sections = Vec::new();
    let pairs = order / 2;
    for k in 0..pairs {
        let q = 1.0 / (2.0 * ((2 * k + 1) as f64 * PI / (2.0 * order as f64)).sin());
        sections.push(Biquad::lowpass(cutoff_hz, rate_hz, q));
    }
    if order % 2 == 1 {
        sections.push(Biquad::lowpass_first_order(cutoff_hz, rate_hz));
    }
    sections
}

fn check_cutoff(cutoff_hz: f64, rate_hz: f64, order: usize) -> Result<(), BaselineError> {
    if !(cutoff_hz.is_finite() && cutoff_hz > 0.0 && cutoff_hz < rate_hz / 2.0) || order == 0 {
        return Err(BaselineError::BadCutoff {
            cutoff_hz,
            rate_hz,
        });
    }
    Ok(())
}

fn run_cascade(sections: &mut [Biquad], input: &[f64]) -> Vec<f64> {
    if let Some(first) = input.first() {
        for s in sections.iter_mut() {
            s.reset_to(*first);
        }
    }
    input
        .iter()
        .map(|x| sections.iter_mut().fold(*x, |v, s| s.process(v)))
        .collect()
}

/// Causal Butterworth low-pass of the given order.
pub fn lowpass(
    series: &UniformSeries,
    cutoff_hz: f64,
    order: usize,
) -> Result<UniformSeries, BaselineError> {
    check_cutoff(cutoff_hz, series.rate, order)?;
    let mut sections = butterworth_sections(cutoff_hz, series.rate, order);
    Ok(UniformSeries {
        t0: series.t0,
        rate: series.rate,
        values: run_cascade(&mut sections, &series.values),
    })
}

/// Forward-backward low-pass: zero phase shift, offline only.
pub fn zero_phase_lowpass(
    series: &UniformSeries,
    cutoff_hz: f64,
    order: usize,
) -> Result<UniformSeries, BaselineError> {
    check_cutoff(cutoff_hz, series.rate, order)?;
    let mut sections = butterworth_sections(cutoff_hz, series.rate, order);
    let mut forward = run_cascade(&mut sections, &series.values);
    forward.reverse();
    let mut sections = butterworth_sections(cutoff_hz, series.rate, order);
    let mut backward = run_cascade(&mut sections, &forward);
    backward.reverse();
    Ok(UniformSeries {
        t0: series.t0,
        rate: series.rate,
        values: backward,
    })
}

/// Cascaded notches at `{h · f̄(t)}`, h = 1..=harmonics, with the centers
/// re-tuned from the per-sample rotation-frequency track.
pub fn notch_bank(
    series: &UniformSeries,
    f_bar_track: &[f64],
    cfg: &NotchBankConfig,
) -> Result<UniformSeries, BaselineError> {
    if f_bar_track.len() != series.values.len() {
        return Err(BaselineError::TrackLengthMismatch {
            series: series.values.len(),
            track: f_bar_track.len(),
        });
    }
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if cfg.harmonics == 0 || !positive(cfg.bandwidth_hz) || !positive(cfg.depth_db) {
        return Err(BaselineError::BadCutoff {
            cutoff_hz: cfg.bandwidth_hz,
            rate_hz: series.rate,
        });
    }
    let nyquist = series.rate / 2.0;
    for (i, f) in f_bar_track.iter().enumerate() {
        if !(f.is_finite() && *f > 0.0) {
            return Err(BaselineError::BadTrack { index: i });
        }
        if *f * cfg.harmonics as f64 >= nyquist {
            return Err(BaselineError::NotchAboveNyquist {
                freq_hz: *f * cfg.harmonics as f64,
                rate_hz: series.rate,
            });
        }
    }

    let mut sections = vec![Biquad::identity(); cfg.harmonics];
    let mut centers = vec![f64::NAN; cfg.harmonics];
    let mut values = Vec::with_capacity(series.values.len());
    for (i, x) in series.values.iter().enumerate() {
        let mut v = *x;
        for (h, section) in sections.iter_mut().enumerate() {
            let center = f_bar_track[i] * (h + 1) as f64;
            if center != centers[h] {
                section.set_notch(center, series.rate, cfg.bandwidth_hz, cfg.depth_db);
                centers[h] = center;
                if i == 0 {
                    section.reset_to(*x);
                }
            }
            v = section.process(v);
        }
        values.push(v);
    }
    Ok(UniformSeries {
        t0: series.t0,
        rate: series.rate,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{amplitude_spectrum, WindowKind};
    use std::f64::consts::TAU;

    fn tone(offset: f64, a: f64, freq: f64, rate: f64, n: usize) -> UniformSeries {
        UniformSeries {
            t0: 0.0,
            rate,
            values: (0..n)
                .map(|i| offset + a * (TAU * freq * i as f64 / rate).sin())
                .collect(),
        }
    }

    /// Amplitude of the steady-state portion at one frequency.
    fn steady_amp(series: &UniformSeries, freq: f64) -> f64 {
        let skip = series.values.len() / 2;
        let tail = UniformSeries {
            t0: series.t0,
            rate: series.rate,
            values: series.values[skip..].to_vec(),
        };
        let spec = amplitude_spectrum(&tail, WindowKind::Rect).unwrap();
        spec.peak_near(freq, 2.0 * spec.bin_width())
    }

    #[test]
    fn lowpass_passes_dc_unchanged() {
        let series = UniformSeries {
            t0: 0.0,
            rate: 100.0,
            values: vec![17.64; 512],
        };
        for order in [1, 2, 3, 4] {
            let out = lowpass(&series, 4.0, order).unwrap();
            for v in &out.values {
                assert!((v - 17.64).abs() < 1e-9, "order {order}: {v}");
            }
        }
    }

    #[test]
    fn lowpass_is_three_db_down_at_cutoff() {
        // 8192 samples at 128 Hz -> 4 Hz is on-bin.
        let series = tone(10.0, 1.0, 4.0, 128.0, 8192);
        for order in [1, 2, 4] {
            let out = lowpass(&series, 4.0, order).unwrap();
            let amp = steady_amp(&out, 4.0);
            let expected = 1.0 / 2f64.sqrt();
            assert!(
                (amp - expected).abs() / expected < 0.05,
                "order {order}: {amp} vs {expected}"
            );
        }
    }

    #[test]
    fn lowpass_attenuates_by_asymptotic_slope() {
        // Tone at 4x cutoff must drop at least 12 dB per order.
        let series = tone(10.0, 1.0, 16.0, 256.0, 8192);
        for order in [1, 2, 3] {
            let out = lowpass(&series, 4.0, order).unwrap();
            let amp = steady_amp(&out, 16.0);
            let db = -20.0 * amp.log10();
            assert!(
                db >= 12.0 * order as f64,
                "order {order}: only {db:.1} dB at 4x cutoff"
            );
        }
        // And a tone at 10x cutoff under order 2 loses at least 35 dB.
        let far = tone(10.0, 1.0, 40.0, 256.0, 8192);
        let out = lowpass(&far, 4.0, 2).unwrap();
        let db = -20.0 * steady_amp(&out, 40.0).log10();
        assert!(db >= 35.0, "got {db:.1} dB");
    }

    #[test]
    fn lowpass_rejects_bad_cutoffs() {
        let series = tone(0.0, 1.0, 1.0, 50.0, 64);
        assert!(matches!(
            lowpass(&series, 0.0, 2),
            Err(BaselineError::BadCutoff { .. })
        ));
        assert!(matches!(
            lowpass(&series, 25.0, 2),
            Err(BaselineError::BadCutoff { .. })
        ));
        assert!(matches!(
            lowpass(&series, 4.0, 0),
            Err(BaselineError::BadCutoff { .. })
        ));
    }

    #[test]
    fn zero_phase_has_no_lag_on_passband_tone() {
        let rate = 128.0;
        let series = tone(5.0, 1.0, 0.5, rate, 4096);
        let out = zero_phase_lowpass(&series, 4.0, 2).unwrap();
        // Cross-correlate over integer lags: the peak must sit at 0.
        let n = series.values.len();
        let mean_in = series.mean();
        let mean_out = out.mean();
        let mut best = (0i64, f64::MIN);
        for lag in -8i64..=8 {
            let mut acc = 0.0;
            for i in 0..n {
                let j = i as i64 + lag;
                if j < 0 || j >= n as i64 {
                    continue;
                }
                acc += (series.values[i] - mean_in) * (out.values[j as usize] - mean_out);
            }
            if acc > best.1 {
                best = (lag, acc);
            }
        }
        assert_eq!(best.0, 0, "correlation peak at lag {}", best.0);

        // The causal filter on the same tone does lag.
        let causal = lowpass(&series, 4.0, 2).unwrap();
        let mut causal_best = (0i64, f64::MIN);
        for lag in -64i64..=64 {
            let mut acc = 0.0;
            for i in 0..n {
                let j = i as i64 + lag;
                if j < 0 || j >= n as i64 {
                    continue;
                }
                acc += (series.values[i] - mean_in) * (causal.values[j as usize] - 10.0);
            }
            if acc > causal_best.1 {
                causal_best = (lag, acc);
            }
        }
        assert!(causal_best.0 > 0, "causal lag {}", causal_best.0);
    }

    #[test]
    fn zero_phase_passes_dc_unchanged() {
        let series = UniformSeries {
            t0: 0.0,
            rate: 100.0,
            values: vec![3.25; 300],
        };
        let out = zero_phase_lowpass(&series, 4.0, 2).unwrap();
        for v in &out.values {
            assert!((v - 3.25).abs() < 1e-9);
        }
    }

    #[test]
    fn notch_kills_tone_at_center() {
        let rate = 100.0;
        // 80 s: analyze the second half, clear of the notch transient.
        let series = tone(17.64, 0.5, 2.8, rate, 8000);
        let track = vec![2.8; 8000];
        let cfg = NotchBankConfig {
            harmonics: 3,
            bandwidth_hz: 0.1,
            depth_db: 30.0,
        };
        let out = notch_bank(&series, &track, &cfg).unwrap();
        let residual = steady_amp(&out, 2.8) / steady_amp(&series, 2.8);
        assert!(
            residual <= 10f64.powf(-30.0 / 20.0),
            "residual {residual:.5} above -30 dB"
        );
    }

    #[test]
    fn notch_preserves_tone_off_center() {
        let rate = 100.0;
        // Cadence at 2.41 Hz with notches on the 2.8 Hz comb.
        let series = tone(17.64, 0.5, 2.41, rate, 8000);
        let track = vec![2.8; 8000];
        let cfg = NotchBankConfig {
            harmonics: 3,
            bandwidth_hz: 0.05,
            depth_db: 40.0,
        };
        let out = notch_bank(&series, &track, &cfg).unwrap();
        let kept = steady_amp(&out, 2.41) / steady_amp(&series, 2.41);
        assert!((kept - 1.0).abs() < 0.05, "kept {kept}");

        // Generic spacing guarantee: a tone five bandwidths away survives.
        let near = tone(17.64, 0.5, 2.8 + 5.0 * 0.05, rate, 8000);
        let out = notch_bank(&near, &track, &cfg).unwrap();
        let kept = steady_amp(&out, 2.8 + 0.25) / steady_amp(&near, 2.8 + 0.25);
        assert!((kept - 1.0).abs() < 0.05, "kept {kept}");
    }

    #[test]
    fn notch_collision_destroys_the_cadence_tone() {
        let rate = 100.0;
        let series = tone(17.64, 0.5, 2.8, rate, 8000);
        let track = vec![2.8; 8000];
        let cfg = NotchBankConfig::default();
        let out = notch_bank(&series, &track, &cfg).unwrap();
        let db = -20.0 * (steady_amp(&out, 2.8) / steady_amp(&series, 2.8)).log10();
        assert!(db >= cfg.depth_db, "only {db:.1} dB of {}", cfg.depth_db);
    }

    #[test]
    fn notch_rejects_invalid_setups() {
        let series = tone(1.0, 0.1, 2.0, 20.0, 64);
        let cfg = NotchBankConfig::default();
        assert!(matches!(
            notch_bank(&series, &[2.0; 10], &cfg),
            Err(BaselineError::TrackLengthMismatch { .. })
        ));
        // 3 harmonics of 4 Hz exceed the 10 Hz Nyquist.
        assert!(matches!(
            notch_bank(&series, &vec![4.0; 64], &cfg),
            Err(BaselineError::NotchAboveNyquist { .. })
        ));
        assert!(matches!(
            notch_bank(&series, &vec![0.0; 64], &cfg),
            Err(BaselineError::BadTrack { .. })
        ));
    }

    #[test]
    fn filters_are_linear_in_scale() {
        let series = tone(2.0, 0.3, 1.5, 64.0, 512);
        let scaled = UniformSeries {
            t0: 0.0,
            rate: 64.0,
            values: series.values.iter().map(|v| v * 3.0).collect(),
        };
        let a = lowpass(&series, 4.0, 2).unwrap();
        let b = lowpass(&scaled, 4.0, 2).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((y - 3.0 * x).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
}
