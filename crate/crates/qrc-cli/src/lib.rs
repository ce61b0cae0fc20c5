//! Command-line benchmark runner over the reservoir library: seeded
//! parameter sweeps, parallel execution, and file outputs.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod sweep;

use clap::{Args, Parser, Subcommand};
use config::{ExperimentConfig, ExperimentKind};
use error::CliError;
use output::OutDir;
use std::path::PathBuf;

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML experiment description.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Master seed; every random draw derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
    /// Samples per grid cell.
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
    /// Also write signals.csv for the first cell's first sample.
    #[arg(long)]
    pub dump_signals: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "qrc",
    version,
    about = "Spin-reservoir benchmarks: capacity sweeps, nonlinear tasks, and invariant checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Delay-reproduction and parity capacity over a parameter grid.
    Capacity(RunArgs),
    /// Nonlinear autoregressive suite against the linear baseline.
    Narma(RunArgs),
    /// Cue-to-fire timer capacity from repeated trials.
    Timer(RunArgs),
    /// Chaotic-series continuation with closed-loop feedback.
    Mg(RunArgs),
    /// Echo-state-network baseline over a spectral-radius grid.
    Esn(RunArgs),
    /// Invariant suites; exits nonzero on any failure.
    Validate(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Capacity(a) => (ExperimentKind::Capacity, a),
            Command::Narma(a) => (ExperimentKind::Narma, a),
            Command::Timer(a) => (ExperimentKind::Timer, a),
            Command::Mg(a) => (ExperimentKind::Mg, a),
            Command::Esn(a) => (ExperimentKind::Esn, a),
            Command::Validate(a) => (ExperimentKind::Validate, a),
        }
    }
}

fn dispatch(config: &ExperimentConfig, out: &OutDir) -> Result<i32, CliError> {
    match config.experiment {
        ExperimentKind::Capacity => experiments::capacity::run(config, out),
        ExperimentKind::Narma => experiments::narma::run(config, out),
        ExperimentKind::Timer => experiments::timer::run(config, out),
        ExperimentKind::Mg => experiments::mackey_glass::run(config, out),
        ExperimentKind::Esn => experiments::esn::run(config, out),
        ExperimentKind::Validate => experiments::validate::run(config, out),
    }
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> Result<i32, CliError> {
    let config = ExperimentConfig::resolve(kind, args).map_err(CliError::Config)?;
    let out = OutDir::create(&config.out_dir)?;
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(&config, &out))
        }
        None => dispatch(&config, &out),
    }
}

/// Parse the command line and run it; returns the process exit code
/// (0 success, 1 usage or config error, 2 validation failure).
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = cli.command.split();
    match execute(kind, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
