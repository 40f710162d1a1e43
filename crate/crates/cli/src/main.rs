//! Command-line pipelines around the wheel-speed filtering library:
//! simulate encoder pulse trains, filter them online, analyze spectra, and
//! compare against notch/low-pass baselines. Every artifact is CSV or JSON.

mod commands;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed source for randomized wheel-error generation.
pub const SEED_ENV: &str = "ENCODER_CLS_SEED";

#[derive(Parser)]
#[command(
    name = "wheelspeed",
    about = "Model-based filtering of incremental-encoder wheel speed",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic pulse train from a known wheel and speed profile.
    Simulate(SimulateArgs),
    /// Run the online filter over a pulse CSV, writing speed and angle logs.
    Filter(FilterArgs),
    /// Amplitude spectrum of a speed CSV with harmonic and cadence summary.
    Spectrum(SpectrumArgs),
    /// Run the compensated filter and the reference filters side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct CommonIo {
    /// Flat key-value run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileKind {
    Constant,
    Sinusoid,
    Ramp,
    Piecewise,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    io: CommonIo,
    /// Base rotational speed (rad/s).
    #[arg(long, default_value_t = 17.64)]
    omega: f64,
    /// Simulation horizon (s).
    #[arg(long, default_value_t = 60.0)]
    t_end: f64,
    #[arg(long, value_enum, default_value_t = ProfileKind::Constant)]
    profile: ProfileKind,
    /// Ripple amplitude as a fraction of the base speed (sinusoid profile).
    #[arg(long, default_value_t = 0.02)]
    modulation_amplitude: f64,
    /// Ripple frequency in Hz (sinusoid profile).
    #[arg(long, default_value_t = 2.41)]
    modulation_freq_hz: f64,
    /// Final speed of a ramp profile (rad/s); the ramp spans the horizon.
    #[arg(long)]
    ramp_to: Option<f64>,
    /// Piecewise profile knots as `t:omega,t:omega,...`.
    #[arg(long)]
    knots: Option<String>,
    /// Explicit per-sector errors in degrees, comma separated (length L).
    #[arg(long)]
    theta_deg: Option<String>,
    /// Use a perfectly equispaced wheel instead of random errors.
    #[arg(long, default_value_t = false)]
    ideal: bool,
    /// Gaussian timestamp jitter standard deviation (s).
    #[arg(long, default_value_t = 0.0)]
    jitter_sigma: f64,
    /// Sensor position inside sector 0 at t=0 (rad).
    #[arg(long, default_value_t = 0.0)]
    start_phase: f64,
    /// RNG seed; overrides the ENCODER_CLS_SEED environment variable.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    io: CommonIo,
    /// Input pulse CSV (header `t_seconds`).
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Basic,
    Rev,
    Filtered,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WindowArg {
    Rect,
    Hann,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    io: CommonIo,
    /// Input speed CSV (schema of the `filter` output).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FieldArg::Basic)]
    field: FieldArg,
    /// Resampling rate (Hz); defaults to the configured rate.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_enum, default_value_t = WindowArg::Hann)]
    window: WindowArg,
    /// Restrict analysis to samples at or after this time (s).
    #[arg(long)]
    t_start: Option<f64>,
    /// Restrict analysis to samples at or before this time (s).
    #[arg(long)]
    t_end: Option<f64>,
    /// Number of harmonics reported in the summary.
    #[arg(long, default_value_t = 3)]
    harmonics: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    io: CommonIo,
    /// Input pulse CSV (header `t_seconds`).
    #[arg(long = "in")]
    input: PathBuf,
    /// Optional true-speed CSV (header `t_seconds,omega_rad_s`).
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    notch_harmonics: usize,
    #[arg(long, default_value_t = 0.1)]
    notch_bandwidth_hz: f64,
    #[arg(long, default_value_t = 40.0)]
    notch_depth_db: f64,
    #[arg(long, default_value_t = 4.0)]
    lp_cutoff_hz: f64,
    #[arg(long, default_value_t = 2)]
    lp_order: usize,
    /// Cadence tone frequency for the retention metric; estimated from the
    /// basic spectrum when omitted.
    #[arg(long)]
    cadence_freq_hz: Option<f64>,
}

/// Anything the pipelines can fail with, tagged with file context where it
/// applies.
#[derive(Debug)]
pub enum CliError {
    Config { path: PathBuf, message: String },
    Parse { path: PathBuf, message: String },
    Pipeline(String),
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { path, message } => {
                write!(f, "config {}: {message}", path.display())
            }
            CliError::Parse { path, message } => {
                write!(f, "{}: {message}", path.display())
            }
            CliError::Pipeline(message) => write!(f, "{message}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Filter(args) => commands::filter(args),
        Command::Spectrum(args) => commands::spectrum(args),
        Command::Compare(args) => commands::compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
