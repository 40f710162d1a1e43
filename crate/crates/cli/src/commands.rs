//! Implementations of the four pipelines.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use wheelspeed::baseline::{lowpass, notch_bank, zero_phase_lowpass, NotchBankConfig};
use wheelspeed::config::{parse_config, RunConfig};
use wheelspeed::io::{self, CompareRow};
use wheelspeed::pipeline::SpeedFilter;
use wheelspeed::sim::{
    generate_pulses_with_jitter, random_sector_errors, ErrorPattern, MagneticWheel, SpeedProfile,
};
use wheelspeed::spectral::{
    amplitude_spectrum, cadence_estimate, interpolate_points, resample, resample_onto, SpeedField,
    Spectrum, UniformSeries, WindowKind,
};
use wheelspeed::speed::SpeedSample;

use crate::{
    CliError, CompareArgs, FieldArg, FilterArgs, ProfileKind, SimulateArgs, SpectrumArgs,
    WindowArg, SEED_ENV,
};

type Result<T> = std::result::Result<T, CliError>;

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })?;
            parse_config(&text).map_err(|e| CliError::Config {
                path: p.clone(),
                message: e.to_string(),
            })
        }
    }
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl FnOnce(wheelspeed::error::CsvError) -> CliError + '_ {
    move |e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

impl From<wheelspeed::error::PipelineError> for CliError {
    fn from(e: wheelspeed::error::PipelineError) -> Self {
        CliError::Pipeline(e.to_string())
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Pipeline(format!("bad {what} entry '{s}'")))
        })
        .collect()
}

fn parse_knots(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (t, w) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Pipeline(format!("bad knot '{pair}', expected t:omega")))?;
            let t = t.trim().parse::<f64>();
            let w = w.trim().parse::<f64>();
            match (t, w) {
                (Ok(t), Ok(w)) => Ok((t, w)),
                _ => Err(CliError::Pipeline(format!("bad knot '{pair}'"))),
            }
        })
        .collect()
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let cfg = load_config(&args.io.config)?;
    ensure_out_dir(&args.io.out)?;

    let seed = args.seed.or_else(|| {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));

    let theta: Vec<f64> = if let Some(list) = &args.theta_deg {
        let degs = parse_list(list, "theta")?;
        degs.iter().map(|d| d.to_radians()).collect()
    } else if args.ideal {
        vec![0.0; cfg.sector_count]
    } else {
        random_sector_errors(cfg.sector_count, &ErrorPattern::default(), &mut rng)
            .map_err(|e| CliError::Pipeline(e.to_string()))?
    };
    let wheel = MagneticWheel::with_errors(cfg.sector_count, &theta)
        .map_err(|e| CliError::Pipeline(e.to_string()))?;

    let profile = match args.profile {
        ProfileKind::Constant => SpeedProfile::Constant { omega: args.omega },
        ProfileKind::Sinusoid => SpeedProfile::Sinusoid {
            base_omega: args.omega,
            modulation_amplitude: args.modulation_amplitude,
            modulation_freq_hz: args.modulation_freq_hz,
        },
        ProfileKind::Ramp => SpeedProfile::Ramp {
            omega_start: args.omega,
            omega_end: args
                .ramp_to
                .ok_or_else(|| CliError::Pipeline("ramp profile requires --ramp-to".into()))?,
            t_end: args.t_end,
        },
        ProfileKind::Piecewise => SpeedProfile::Piecewise {
            knots: parse_knots(args.knots.as_deref().ok_or_else(|| {
                CliError::Pipeline("piecewise profile requires --knots".into())
            })?)?,
        },
    };

    let train = generate_pulses_with_jitter(
        &wheel,
        &profile,
        args.t_end,
        args.start_phase,
        args.jitter_sigma,
        &mut rng,
    )
    .map_err(|e| CliError::Pipeline(e.to_string()))?;

    let pulses_path = args.io.out.join("pulses.csv");
    io::write_pulse_csv(&pulses_path, train.timestamps()).map_err(csv_err(&pulses_path))?;

    let wheel_path = args.io.out.join("wheel.csv");
    io::write_wheel_csv(&wheel_path, wheel.sector_angles(), wheel.theta())
        .map_err(csv_err(&wheel_path))?;

    // True instantaneous speed at the emitted pulse times.
    let truth: Vec<(f64, f64)> = train
        .timestamps()
        .iter()
        .map(|&t| {
            let omega = profile
                .omega_at(t)
                .map_err(|e| CliError::Pipeline(e.to_string()))?;
            Ok((t, omega))
        })
        .collect::<Result<_>>()?;
    let truth_path = args.io.out.join("speed_truth.csv");
    io::write_truth_csv(&truth_path, &truth).map_err(csv_err(&truth_path))?;

    println!(
        "simulate: {} pulses over {} s -> {}",
        train.len(),
        args.t_end,
        args.io.out.display()
    );
    Ok(())
}

fn run_filter_pipeline(cfg: &RunConfig, timestamps: &[f64]) -> Result<(Vec<SpeedSample>, SpeedFilter)> {
    let mut filter = SpeedFilter::new(cfg.sector_count, cfg.window_revolutions, cfg.gate())?;
    let samples = filter.process_all(timestamps)?;
    Ok((samples, filter))
}

pub fn filter(args: FilterArgs) -> Result<()> {
    let cfg = load_config(&args.io.config)?;
    ensure_out_dir(&args.io.out)?;
    let timestamps = io::read_pulse_csv(&args.input).map_err(csv_err(&args.input))?;
    let (samples, filter) = run_filter_pipeline(&cfg, &timestamps)?;

    let speed_path = args.io.out.join("speed.csv");
    io::write_speed_csv(&speed_path, &samples).map_err(csv_err(&speed_path))?;
    let angles_path = args.io.out.join("angles.csv");
    io::write_angles_csv(&angles_path, filter.angle_log()).map_err(csv_err(&angles_path))?;

    println!(
        "filter: {} samples, {} angle updates -> {}",
        samples.len(),
        filter.angle_log().len(),
        args.io.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SpectrumSummary {
    fundamental_hz: f64,
    harmonic_amps: Vec<f64>,
    peak_freq_hz: Option<f64>,
    cadence_rev_s: Option<f64>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Pipeline(format!("json encoding failed: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn spectrum(args: SpectrumArgs) -> Result<()> {
    let cfg = load_config(&args.io.config)?;
    ensure_out_dir(&args.io.out)?;
    let mut samples = io::read_speed_csv(&args.input).map_err(csv_err(&args.input))?;
    if let Some(t0) = args.t_start {
        samples.retain(|s| s.t >= t0);
    }
    if let Some(t1) = args.t_end {
        samples.retain(|s| s.t <= t1);
    }

    let field = match args.field {
        FieldArg::Basic => SpeedField::Basic,
        FieldArg::Rev => SpeedField::Rev,
        FieldArg::Filtered => SpeedField::Filtered,
    };
    let rate = args.rate.unwrap_or(cfg.resample_rate_hz);
    let series = resample(&samples, field, rate).map_err(|e| CliError::Pipeline(e.to_string()))?;
    let window = match args.window {
        WindowArg::Rect => WindowKind::Rect,
        WindowArg::Hann => WindowKind::Hann,
    };
    let spec = amplitude_spectrum(&series, window).map_err(|e| CliError::Pipeline(e.to_string()))?;

    let band = 3.0 * spec.bin_width();
    let harmonic_amps: Vec<f64> = (1..=args.harmonics)
        .map(|h| spec.peak_near(h as f64 * spec.fundamental, band))
        .collect();
    let cadence = cadence_estimate(&spec, cfg.gear_gain, band).ok();

    let spectrum_path = args.io.out.join("spectrum.csv");
    io::write_spectrum_csv(&spectrum_path, &spec.freqs, &spec.amps)
        .map_err(csv_err(&spectrum_path))?;
    write_json(
        &args.io.out.join("summary.json"),
        &SpectrumSummary {
            fundamental_hz: spec.fundamental,
            harmonic_amps,
            peak_freq_hz: cadence.map(|c| c.peak_freq_hz),
            cadence_rev_s: cadence.map(|c| c.cadence_rev_s),
        },
    )?;

    println!(
        "spectrum: {} bins up to {:.2} Hz -> {}",
        spec.freqs.len(),
        spec.freqs.last().copied().unwrap_or(0.0),
        args.io.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct MethodMetrics {
    rms_error_vs_truth: Option<f64>,
    harmonic_residuals: Vec<f64>,
    cadence_retention: Option<f64>,
}

#[derive(Serialize)]
struct CompareMetrics {
    fundamental_hz: f64,
    cadence_freq_hz: Option<f64>,
    basic: MethodMetrics,
    cls: MethodMetrics,
    notch: MethodMetrics,
    lp: MethodMetrics,
    zplp: MethodMetrics,
}

fn rms_vs(series: &UniformSeries, reference: &UniformSeries) -> f64 {
    let n = series.values.len().min(reference.values.len());
    let sum: f64 = series.values[..n]
        .iter()
        .zip(&reference.values[..n])
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    (sum / n as f64).sqrt()
}

fn method_metrics(
    spec: &Spectrum,
    series: &UniformSeries,
    truth: Option<&UniformSeries>,
    f_bar: f64,
    band: f64,
    cadence: Option<(f64, f64)>,
) -> MethodMetrics {
    MethodMetrics {
        rms_error_vs_truth: truth.map(|t| rms_vs(series, t)),
        harmonic_residuals: (1..=3)
            .map(|h| spec.peak_near(h as f64 * f_bar, band))
            .collect(),
        cadence_retention: cadence.map(|(f_c, basic_amp)| spec.peak_near(f_c, band) / basic_amp),
    }
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let cfg = load_config(&args.io.config)?;
    ensure_out_dir(&args.io.out)?;
    let timestamps = io::read_pulse_csv(&args.input).map_err(csv_err(&args.input))?;
    let (samples, _) = run_filter_pipeline(&cfg, &timestamps)?;

    let rate = cfg.resample_rate_hz;
    let pipeline_err = |e: wheelspeed::error::SpectralError| CliError::Pipeline(e.to_string());
    let basic = resample(&samples, SpeedField::Basic, rate).map_err(pipeline_err)?;
    let cls = resample_onto(&samples, SpeedField::Filtered, &basic).map_err(pipeline_err)?;
    let rev = resample_onto(&samples, SpeedField::Rev, &basic).map_err(pipeline_err)?;
    let track: Vec<f64> = rev.values.iter().map(|w| w / std::f64::consts::TAU).collect();

    let notch_cfg = NotchBankConfig {
        harmonics: args.notch_harmonics,
        bandwidth_hz: args.notch_bandwidth_hz,
        depth_db: args.notch_depth_db,
    };
    let baseline_err = |e: wheelspeed::error::BaselineError| CliError::Pipeline(e.to_string());
    let notched = notch_bank(&basic, &track, &notch_cfg).map_err(baseline_err)?;
    let lp = lowpass(&basic, args.lp_cutoff_hz, args.lp_order).map_err(baseline_err)?;
    let zplp = zero_phase_lowpass(&basic, args.lp_cutoff_hz, args.lp_order).map_err(baseline_err)?;

    let truth_series = match &args.truth {
        None => None,
        Some(path) => {
            let points = io::read_truth_csv(path).map_err(csv_err(path))?;
            Some(interpolate_points(&points, &basic).map_err(pipeline_err)?)
        }
    };

    let spec_basic = amplitude_spectrum(&basic, WindowKind::Hann).map_err(pipeline_err)?;
    let spec_cls = amplitude_spectrum(&cls, WindowKind::Hann).map_err(pipeline_err)?;
    let spec_notch = amplitude_spectrum(&notched, WindowKind::Hann).map_err(pipeline_err)?;
    let spec_lp = amplitude_spectrum(&lp, WindowKind::Hann).map_err(pipeline_err)?;
    let spec_zplp = amplitude_spectrum(&zplp, WindowKind::Hann).map_err(pipeline_err)?;

    let f_bar = spec_basic.fundamental;
    let band = 3.0 * spec_basic.bin_width();
    // The cadence reference: an explicit frequency, or the strongest
    // off-harmonic line of the uncompensated spectrum.
    let cadence_freq = args
        .cadence_freq_hz
        .or_else(|| cadence_estimate(&spec_basic, cfg.gear_gain, band).ok().map(|c| c.peak_freq_hz));
    let cadence = cadence_freq.map(|f_c| (f_c, spec_basic.peak_near(f_c, band)));

    let truth_ref = truth_series.as_ref();
    let metrics = CompareMetrics {
        fundamental_hz: f_bar,
        cadence_freq_hz: cadence_freq,
        basic: method_metrics(&spec_basic, &basic, truth_ref, f_bar, band, cadence),
        cls: method_metrics(&spec_cls, &cls, truth_ref, f_bar, band, cadence),
        notch: method_metrics(&spec_notch, &notched, truth_ref, f_bar, band, cadence),
        lp: method_metrics(&spec_lp, &lp, truth_ref, f_bar, band, cadence),
        zplp: method_metrics(&spec_zplp, &zplp, truth_ref, f_bar, band, cadence),
    };

    let rows: Vec<CompareRow> = (0..basic.values.len())
        .map(|i| CompareRow {
            t: basic.t0 + i as f64 / rate,
            omega_true: truth_series.as_ref().map(|t| t.values[i]),
            omega_basic: basic.values[i],
            omega_cls: cls.values[i],
            omega_notch: notched.values[i],
            omega_lp: lp.values[i],
            omega_zplp: zplp.values[i],
        })
        .collect();
    let compare_path = args.io.out.join("compare.csv");
    io::write_compare_csv(&compare_path, &rows).map_err(csv_err(&compare_path))?;
    write_json(&args.io.out.join("metrics.json"), &metrics)?;

    println!(
        "compare: {} aligned samples at {} Hz -> {}",
        rows.len(),
        rate,
        args.io.out.display()
    );
    Ok(())
}
