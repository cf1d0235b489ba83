//! `markovspan`: check, compose and analyse compositional Markov automata.

mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Deadlock analysis for systems built from Markov automata.
#[derive(Debug, Parser)]
#[command(name = "markovspan", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate every automaton and report whether it is Markov.
    Check(CheckArgs),
    /// Elaborate a system and print its canonical JSON form.
    Compose(ComposeArgs),
    /// Probability of being in a deadlock after 0..=k steps.
    Deadlock(DeadlockArgs),
    /// Limiting absorption probabilities and the convergence conditions.
    Limit(LimitArgs),
    /// Monte Carlo estimate of the k-step deadlock probability.
    Simulate(SimulateArgs),
    /// Check the algebraic laws on the automata of a model.
    Laws(LawsArgs),
    /// Build the ring of n dining philosophers, or emit it as model source.
    Dining(DiningArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Dining,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Where the automaton comes from: a built-in model or a model file.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Built-in model.
    #[arg(long, value_enum, conflicts_with = "file")]
    pub model: Option<Builtin>,
    /// Number of philosophers for the built-in model.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Model file (`.mkv`).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// System to elaborate; defaults to the file's only system.
    #[arg(long, requires = "file")]
    pub system: Option<String>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Mode {
    /// Exact rational arithmetic (the default).
    #[arg(long, conflicts_with = "float")]
    pub exact: bool,
    /// Double-precision arithmetic.
    #[arg(long)]
    pub float: bool,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct ComposeArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct DeadlockArgs {
    #[command(flatten)]
    pub source: Source,
    /// Initial state as comma-separated component labels, e.g. `1,1,1,1`.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub k: u64,
    #[command(flatten)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct LimitArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub init: Option<String>,
    #[command(flatten)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub k: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trajectories: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct LawsArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct DiningArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Print the equivalent model source instead of a summary.
    #[arg(long)]
    pub emit: bool,
    #[command(flatten)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: Output,
}

fn configure_threads() -> Result<(), run::CliError> {
    let Ok(value) = std::env::var("MARKOVSPAN_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| run::CliError::Input(format!("MARKOVSPAN_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .map_err(|e| run::CliError::Input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run::run(&cli.command));
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(if out.findings { 1 } else { 0 })
        }
        Err(run::CliError::Input(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
