//! `su11` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 computation failure or failed
//! check, 1 I/O error.

mod commands;
mod scenario;
mod table;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use thiserror::Error;

use commands::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Computation(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl From<su11::Error> for CliError {
    fn from(e: su11::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Computation(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "su11", version, about = "Phase sensitivity of seeded SU(1,1) interferometers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON scenario file; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// RNG seed, overrides the scenario's (mc-experiment only).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Phase variance of one scheme at one operating point.
    Sensitivity,
    /// Best-point sensitivity of the detection schemes versus gain.
    Figure2,
    /// SNR improvement versus the probe local-oscillator phase.
    Fig4b,
    /// SNR improvement over both local-oscillator phases.
    Figs2,
    /// Quantum and classical Fisher information.
    Fisher,
    /// Compare the Gaussian model against the Fock-space oracle.
    OracleCheck,
    /// Monte-Carlo modulated homodyne measurement.
    McExperiment,
    /// Shot-noise photon number from optical power.
    CalibrateSql,
}

impl Command {
    fn default_format(self) -> Format {
        match self {
            Command::Figure2 | Command::Fig4b | Command::Figs2 => Format::Csv,
            _ => Format::Json,
        }
    }
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("TSUI_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("TSUI_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Computation(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Sensitivity => commands::sensitivity(&load(cfg)?),
        Command::Figure2 => commands::figure2(&load(cfg)?),
        Command::Fig4b => commands::fig4b(&load(cfg)?),
        Command::Figs2 => commands::figs2(&load(cfg)?),
        Command::Fisher => commands::fisher(&load(cfg)?),
        Command::OracleCheck => commands::oracle_check(&load(cfg)?),
        Command::McExperiment => commands::mc_experiment(&load(cfg)?, cli.seed),
        Command::CalibrateSql => commands::calibrate_sql(&load(cfg)?),
    }
}

fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(fs::File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => report.table.write_csv(&mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &report.to_json()).map_err(io::Error::from)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let report = dispatch(cli)?;
    emit(&report, cli.format.unwrap_or(cli.command.default_format()), cli.out.as_deref())?;
    match report.failure {
        Some(msg) => Err(CliError::Computation(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
