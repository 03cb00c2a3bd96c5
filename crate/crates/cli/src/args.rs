use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use qcomposite::probability::{parse_rational, Arithmetic};

#[derive(Debug, Parser)]
#[command(name = "qcomp", version, about = "q-composite key predistribution with on/off channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Link probabilities, bound, approximation and alpha for one point
    Prob(ProbArgs),
    /// Solve for the critical K, P or p (omit exactly one of them)
    Critical(CriticalArgs),
    /// Monte Carlo estimate at one point, as CSV
    Simulate(SimulateArgs),
    /// Monte Carlo sweep along one axis or over alpha targets, as CSV
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl From<Mode> for Arithmetic {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Arithmetic::Exact,
            Mode::Float => Arithmetic::Float,
        }
    }
}

/// Channel probability as typed: kept both as `f64` and as the exact
/// decimal rational.
#[derive(Clone, Debug)]
pub struct ChannelProb {
    pub value: f64,
    pub exact: BigRational,
}

impl FromStr for ChannelProb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
        let exact = parse_rational(s).ok_or_else(|| format!("not a decimal number: {s:?}"))?;
        Ok(ChannelProb { value, exact })
    }
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'K')]
    pub ring_size: u64,
    #[arg(short = 'P')]
    pub pool_size: u64,
    #[arg(short = 'q')]
    pub q: u64,
    #[arg(short = 'p')]
    pub p: ChannelProb,
    #[arg(short = 'k', default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'K')]
    pub ring_size: Option<u64>,
    #[arg(short = 'P')]
    pub pool_size: Option<u64>,
    #[arg(short = 'q')]
    pub q: u64,
    #[arg(short = 'p')]
    pub p: Option<ChannelProb>,
    #[arg(short = 'k', default_value_t = 1)]
    pub k: usize,
    /// Largest pool size considered when solving for P
    #[arg(long, default_value_t = 1_000_000_000)]
    pub pool_ceiling: u64,
    /// Target alpha instead of the critical point 0
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub offset: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Trials per point
    #[arg(short = 'T', long = "trials", default_value_t = qcomposite::experiment::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to all cores); never changes the output
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'K')]
    pub ring_size: u64,
    #[arg(short = 'P')]
    pub pool_size: u64,
    #[arg(short = 'q')]
    pub q: u64,
    #[arg(short = 'p')]
    pub p: ChannelProb,
    #[arg(short = 'k', default_value_t = 1)]
    pub k: usize,
    #[command(flatten)]
    pub run: RunArgs,
    /// Also write the per-trial table to this file
    #[arg(long)]
    pub dump_trials: Option<PathBuf>,
    /// Write the first trial's graph as an edge list to this file
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AxisArg {
    #[value(name = "K")]
    RingSize,
    #[value(name = "P")]
    PoolSize,
    #[value(name = "p")]
    ChannelProb,
    #[value(name = "n")]
    Nodes,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, requires = "values", conflicts_with = "alpha_list")]
    pub axis: Option<AxisArg>,
    /// Comma-separated values for --axis
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "axis")]
    pub values: Option<Vec<f64>>,
    /// Comma-separated alpha targets; p is solved for each
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required_unless_present = "axis")]
    pub alpha_list: Option<Vec<f64>>,
    #[arg(short = 'n')]
    pub n: Option<usize>,
    #[arg(short = 'K')]
    pub ring_size: Option<u64>,
    #[arg(short = 'P')]
    pub pool_size: Option<u64>,
    #[arg(short = 'q')]
    pub q: u64,
    #[arg(short = 'p')]
    pub p: Option<ChannelProb>,
    #[arg(short = 'k', default_value_t = 1)]
    pub k: usize,
    #[command(flatten)]
    pub run: RunArgs,
}
