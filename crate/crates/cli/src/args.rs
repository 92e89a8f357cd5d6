use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "causalflow", version, about = "Directed information and causal graph analysis for Gaussian time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one information measure.
    Measure(MeasureArgs),
    /// Table of DI, TE and IIE rates for every channel pair.
    Rates(RatesArgs),
    /// Infer a causal graph.
    Infer(InferArgs),
    /// Simulate a path of an AR(1) spec to CSV.
    Simulate(SimulateArgs),
    /// Re-run a named experiment.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// AR(1) spec as JSON.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// CSV panel with a header row of channel names.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Initial horizon of the rate doubling search.
    #[arg(long, default_value_t = 8)]
    pub initial_horizon: usize,
    /// Convergence tolerance between successive horizons, in nats.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 4096)]
    pub max_horizon: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Mi,
    Di,
    DiCausalCond,
    DelayedDi,
    Te,
    Iie,
    GewekeFwd,
    GewekeInst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Causal,
    Delayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Pairwise,
    Conditioned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub target: String,
    /// Number of samples, or `rate` for the per-sample limit.
    #[arg(long, default_value = "rate")]
    pub horizon: String,
    /// Side channels to condition on.
    #[arg(long, value_delimiter = ',')]
    pub side: Vec<String>,
    /// How side channels enter each term.
    #[arg(long, value_enum, default_value = "causal")]
    pub cond: ModeArg,
    /// Target history length for transfer entropy (defaults to the horizon).
    #[arg(long)]
    pub k: Option<usize>,
    /// Source history length for transfer entropy (defaults to the horizon).
    #[arg(long)]
    pub l: Option<usize>,
    /// Window length used for rates estimated from data.
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    /// Regression lag for Geweke indices estimated from data.
    #[arg(long, default_value_t = 5)]
    pub lag: usize,
    #[command(flatten)]
    pub rate: RateArgs,
    /// Report bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// How the remaining channels enter each rate.
    #[arg(long, value_enum, default_value = "causal")]
    pub cond: ModeArg,
    /// Only condition on nothing (pairwise rates).
    #[arg(long)]
    pub pairwise: bool,
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: TableFormat,
    #[arg(long)]
    pub bits: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "conditioned")]
    pub policy: PolicyArg,
    /// Edge threshold in nats for the analytic path.
    #[arg(long, default_value_t = 1e-7)]
    pub threshold: f64,
    #[arg(long, default_value_t = 99)]
    pub surrogates: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub lag: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long, value_enum, default_value = "dot")]
    pub format: GraphFormat,
    #[arg(long)]
    pub bits: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Start from zero and discard this many samples instead of drawing the
    /// first sample from the stationary law.
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Chain network: true, pairwise and conditioned graphs.
    Fig2,
    /// Bivariate closed forms against numeric values.
    Bivariate,
    /// Three-channel cases A and B.
    Trivariate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReproduceSource {
    Analytic,
    Simulated,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub preset: Preset,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Analytic covariances, or a simulated path with surrogate tests.
    #[arg(long, value_enum, default_value = "analytic")]
    pub source: ReproduceSource,
    /// Path length when `--source simulated`.
    #[arg(long, default_value_t = 4000)]
    pub length: usize,
    #[arg(long)]
    pub bits: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}
