use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "gmgd-sim", version, about = "Simulate GMGD Lévy processes and run validation studies")]
pub struct Cli {
    /// Worker threads for replication loops; results do not depend on it.
    #[arg(long, global = true, env = "GMGD_SIM_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate approximate sample paths and write them as CSV or JSON.
    Simulate(SimulateArgs),
    /// Monte Carlo moment study against closed-form moments.
    Study(StudyArgs),
    /// Small-jump convergence ratios over a decreasing list of thresholds.
    CheckConvergence(ConvergenceArgs),
    /// Empirical acceptance rate of the radial rejection sampler.
    Acceptance(AcceptanceArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// 30 atoms evenly spaced on the circle, p = 1, Q = δ₁, zero drift.
    PaperStudy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentArg {
    Full,
    LargeJumps,
    SmallJumps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    LargeJumps,
    FullProcess,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpecArgs {
    /// Built-in spec; the default when --spec is not given.
    #[arg(long, value_enum, conflicts_with = "spec")]
    pub preset: Option<Preset>,

    /// JSON spec file with fields d, p, gamma, spectral and thorin.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimArgs {
    /// Jump-size threshold ε.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub epsilon: f64,

    /// Time horizon T.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub horizon: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Shot-noise series truncation.
    #[arg(long = "shot-noise-K", default_value_t = 10_000)]
    pub shot_noise_k: usize,

    /// Mixture weight of the radial proposal for a < 1.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub beta: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    #[arg(long, value_enum, default_value_t = ComponentArg::Full)]
    pub component: ComponentArg,

    /// Number of paths; path k uses replication k of the seed.
    #[arg(short = 'N', default_value_t = 1)]
    pub paths: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StudyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Replications.
    #[arg(short = 'N', default_value_t = 100_000)]
    pub replications: usize,

    /// Number of evenly spaced study times in (0, T].
    #[arg(long, default_value_t = 20)]
    pub times: usize,

    #[arg(long, value_enum, default_value_t = TargetArg::FullProcess)]
    pub target: TargetArg,

    /// Also report the estimator that drops the small jumps, on the same paths.
    #[arg(long)]
    pub compare_drop_small_jumps: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Strictly decreasing thresholds.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001", allow_negative_numbers = true)]
    pub epsilons: Vec<f64>,

    /// Moment order p'; defaults to the spec's p.
    #[arg(long, allow_negative_numbers = true)]
    pub p_test: Option<f64>,

    /// Atom subset: none, all, or comma-separated atom indices.
    #[arg(long, default_value = "all")]
    pub sector: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AcceptanceArgs {
    /// Lower bound a of the radial law.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub p: f64,

    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub beta: f64,

    /// Proposal rounds.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write a JSON report and manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,

    /// Output directory; defaults to the one recorded in the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
