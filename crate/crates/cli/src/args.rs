use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ieh::optimize::MethodKind;

#[derive(Debug, Parser)]
#[command(
    name = "ieh",
    version,
    about = "Energy-conserving rectification of harvester voltages"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic two-resonator voltage CSV.
    Generate(GenerateArgs),
    /// Raw / diode bridge / intervention table on the test split.
    Compare(CompareArgs),
    /// Train intervention parameters and write the optimizer trajectory.
    Optimize(OptimizeArgs),
    /// Cost over a (tau, phi) grid as `tau,phi,cost`.
    Landscape(LandscapeArgs),
    /// Intervention vs diode bridge across signal-to-noise ratios.
    SnrSweep(SweepArgs),
}

/// Parameters of the synthetic bi-resonant source.
#[derive(Debug, Clone, Args)]
pub struct SyntheticArgs {
    #[arg(long, default_value_t = 25.0)]
    pub f1: f64,
    #[arg(long, default_value_t = 25.5)]
    pub f2: f64,
    #[arg(long, default_value_t = 0.0005)]
    pub zeta1: f64,
    #[arg(long, default_value_t = 0.0005)]
    pub zeta2: f64,
    /// RMS voltage of the first output.
    #[arg(long, default_value_t = 0.6)]
    pub amp1: f64,
    /// RMS voltage of the second output.
    #[arg(long, default_value_t = 0.4)]
    pub amp2: f64,
    /// Corner frequency of the shared drive (Hz).
    #[arg(long, default_value_t = 100.0)]
    pub drive_bandwidth: f64,
    /// Seconds.
    #[arg(long, default_value_t = 4.0)]
    pub duration: f64,
    /// Hz.
    #[arg(long, default_value_t = 1000.0)]
    pub sample_rate: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    /// Adds white Gaussian noise at this linear SNR to each column.
    #[arg(long)]
    pub snr: Option<f64>,
    /// Write only the first voltage.
    #[arg(long)]
    pub single: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Where the voltages come from: a CSV file, or the synthetic source.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// CSV with a `time,v1` or `time,v1,v2` header.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Seed of the synthetic source when no input is given.
    #[arg(long, default_value_t = 0)]
    pub source_seed: u64,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DiodeArgs {
    /// Forward drop per diode (V).
    #[arg(long, default_value_t = 0.1)]
    pub diode_v0: f64,
    /// Series resistance per diode (ohm).
    #[arg(long, default_value_t = 1.0)]
    pub diode_r: f64,
    /// Load resistance (ohm).
    #[arg(long, default_value_t = 8.0)]
    pub load_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gd,
    Ga,
    Grid,
}

impl From<MethodArg> for MethodKind {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gd => MethodKind::Gd,
            MethodArg::Ga => MethodKind::Ga,
            MethodArg::Grid => MethodKind::Grid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Two-voltage mode when the input has a second column.
    Auto,
    Single,
    Pair,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Ga)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.8)]
    pub train_frac: f64,
    #[arg(long, default_value_t = 50)]
    pub tau_max: usize,
    #[arg(long, default_value_t = 100)]
    pub phi_max: usize,
    /// Optimizer (and noise) seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub diode: DiodeArgs,
    /// CSV copy of the table.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// Gradient descent step size.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Gradient descent finite-difference probe.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    /// Trajectory CSV; defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1)]
    pub tau_min: usize,
    #[arg(long, default_value_t = 50)]
    pub tau_max: usize,
    #[arg(long, default_value_t = 0)]
    pub phi_min: usize,
    /// For a single voltage the phi axis is the flip offset.
    #[arg(long, default_value_t = 100)]
    pub phi_max: usize,
    /// Flip offset used in two-voltage mode.
    #[arg(long, default_value_t = 0)]
    pub offset: usize,
    /// Recorded in the header only; the grid is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    pub diode: DiodeArgs,
    #[arg(long, value_enum, default_value_t = Mode::Single)]
    pub mode: Mode,
    /// Linear signal-to-noise power ratios.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,5,10,20")]
    pub snrs: Vec<f64>,
    /// Noise realizations per SNR.
    #[arg(long, default_value_t = 10)]
    pub realizations: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
