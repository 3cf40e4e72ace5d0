//! `ncdrank` command-line front end.

mod check;
mod experiment;
mod inputs;
mod lab;
mod rank;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed inputs (exit 2).
    Input(anyhow::Error),
    /// The solver hit its iteration cap (exit 3).
    NotConverged(String),
    /// No-teleport model whose indicator matrix is reducible (exit 4).
    NotPrimitive(String),
    /// `check` verdict was reducible (exit 1).
    Reducible,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Reducible => 1,
            Failure::Input(_) => 2,
            Failure::NotConverged(_) => 3,
            Failure::NotPrimitive(_) => 4,
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

pub type CliResult<T = ()> = std::result::Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(
    name = "ncdrank",
    version,
    about = "Block-aware ranking of directed graphs"
)]
struct Cli {
    /// Log solver residuals and progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    /// Worker threads for the solvers (NCDRANK_WORKERS takes precedence).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a ranking vector.
    Rank(rank::RankArgs),
    /// Check primitivity and block-level separability.
    Check(check::CheckArgs),
    /// Dense Markov-chain operations on a small matrix.
    Lab(lab::LabArgs),
    /// Run a perturbation experiment and emit a CSV report.
    Experiment(experiment::ExperimentArgs),
}

/// Graph and decomposition inputs shared by several commands.
#[derive(Args, Debug, Clone)]
pub struct GraphInput {
    /// Edge list, one `source target` pair per line.
    #[arg(long)]
    pub graph: PathBuf,

    /// Block membership file (`node block` per line); repeat for several decompositions.
    #[arg(long = "blocks")]
    pub blocks: Vec<PathBuf>,
}

fn workers(flag: Option<usize>) -> CliResult<Option<usize>> {
    match std::env::var("NCDRANK_WORKERS") {
        Ok(s) if !s.trim().is_empty() => {
            let n: usize = s
                .trim()
                .parse()
                .map_err(|e| anyhow::anyhow!("NCDRANK_WORKERS=`{s}`: {e}"))?;
            Ok(Some(n))
        }
        _ => Ok(flag),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = workers(cli.workers).and_then(|w| match cli.command {
        Command::Rank(a) => rank::run(a, w),
        Command::Check(a) => check::run(a),
        Command::Lab(a) => lab::run(a),
        Command::Experiment(a) => experiment::run(a, w),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::NotConverged(m) => eprintln!("error: {m}"),
                Failure::NotPrimitive(m) => eprintln!("error: {m}"),
                Failure::Reducible => {}
            }
            ExitCode::from(f.code())
        }
    }
}
