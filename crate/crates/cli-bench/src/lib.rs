//! Command-line front end. `run` executes one algorithm on one graph and
//! prints a single-line JSON record, `bench` sweeps graph sizes (and
//! identifier widths) into CSV, `verify` re-checks a stored result against
//! its graph and prints a key=value report.
//!
//! Exit status: 0 when every requested check passes, 1 when one fails,
//! 2 on usage, file, format or algorithm errors.

pub mod bench;
pub mod run;
mod setup;
pub mod verify_cmd;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use setup::{load_graph_arg, load_network, Network};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    File { path: String, msg: String },
    #[error("format: {0}")]
    Format(String),
    #[error("algorithm: {0}")]
    Algorithm(String),
}

impl CliError {
    pub fn algorithm(e: impl std::fmt::Display) -> Self {
        CliError::Algorithm(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Fast,
    Rg,
    SlowId,
    FastId,
    Mis,
    Coloring,
    BalancedColor,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Fast => "fast",
            Algo::Rg => "rg",
            Algo::SlowId => "slow-id",
            Algo::FastId => "fast-id",
            Algo::Mis => "mis",
            Algo::Coloring => "coloring",
            Algo::BalancedColor => "balanced-color",
        }
    }

    /// The decomposition variant this algorithm is, if any.
    pub fn variant(self) -> Option<decomposition::Variant> {
        decomposition::Variant::parse(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Logical,
    Faithful,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Sequential,
    Shuffled,
    Padded,
}

#[derive(Args, Clone, Debug)]
pub struct GraphArgs {
    /// `gen:<family>:k=v,...` (e.g. `gen:gnp:n=256,p=0.03`) or an edge-list file.
    #[arg(long)]
    pub graph: String,
    /// Generator seed; required for random families. Also seeds shuffled ids.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Clone, Debug)]
pub struct NetArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Logical)]
    pub mode: ModeArg,
    /// Bits per edge per round, or `local` for unbounded messages.
    #[arg(long, default_value = "64")]
    pub bandwidth: String,
    /// Identifier width; defaults to `max(1, ⌈log2 n⌉)`.
    #[arg(long)]
    pub id_bits: Option<u32>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Sequential)]
    pub id_scheme: SchemeArg,
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Decomposition variant underlying `mis` and `coloring`.
    #[arg(long, value_enum, default_value_t = Algo::Fast)]
    pub via: Algo,
    /// Degree bound for `coloring`; defaults to the maximum degree.
    #[arg(long)]
    pub delta: Option<usize>,
    /// Run the applicable checkers; exit 1 if one fails.
    #[arg(long)]
    pub check: bool,
    /// Where to write the result in its text format.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the carve traces, one after another.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct BenchArgs {
    /// Graph template; the `n` and `p` placeholders in braces are substituted per size.
    #[arg(long, default_value = "gnp:n={n},p={p}")]
    pub family: String,
    /// `p = avg / (n - 1)` for the `p` placeholder.
    #[arg(long, default_value_t = 8.0)]
    pub avg_degree: f64,
    /// Comma-separated node counts; empty for an empty sweep.
    #[arg(long, default_value = "64,128,256,512,1024,2048,4096,8192")]
    pub sizes: String,
    /// Comma-separated generator seeds.
    #[arg(long, default_value = "1")]
    pub seeds: String,
    #[arg(long, value_enum, default_value_t = Algo::Fast)]
    pub algo: Algo,
    /// Comma-separated identifier widths to sweep; defaults to `⌈log2 n⌉`.
    #[arg(long)]
    pub id_bits: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Logical)]
    pub mode: ModeArg,
    #[arg(long, default_value = "64")]
    pub bandwidth: String,
    /// Write the CSV here and print a JSON summary instead.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Stored result: a decomposition, carve trace, `m`, `col` or `bc` lines.
    #[arg(long)]
    pub input: PathBuf,
    /// Disambiguates an empty input (default `mis`).
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    /// Degree bound of a coloring; defaults to the maximum degree.
    #[arg(long)]
    pub delta: Option<usize>,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Run one algorithm on one graph and print a JSON record
    Run(RunArgs),
    /// Sweep graph sizes and emit one CSV row per run
    Bench(BenchArgs),
    /// Check a stored result against its graph
    Verify(VerifyArgs),
}

#[derive(Parser, Clone, Debug)]
#[command(name = "netdecomp", version, about = "Network decomposition runs, sweeps and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// What a command prints and whether its checks passed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub passed: bool,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Run(a) => run::cmd_run(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Verify(a) => verify_cmd::cmd_verify(a),
    }
}

pub(crate) fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::File { path: path.display().to_string(), msg: e.to_string() })
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::File { path: path.display().to_string(), msg: e.to_string() })
}
