//! `optotension`: simulation and analysis toolkit for a photo-reflector
//! tension sensor.
//!
//! Exit codes: 0 success, 1 usage error (bad flags, missing inputs), 2 domain
//! error (rate limits, window exits, malformed data). Every run is
//! deterministic under `--seed`, and every output embeds the fully resolved
//! configuration.

mod caldoc;
mod commands;
mod config;
mod logio;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// Errors split along the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: the invocation itself is wrong (flags, missing files).
    Usage(String),
    /// Exit 2: the model or the data rejected the run.
    Domain(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }

    pub fn domain_display(e: impl fmt::Display) -> Self {
        Self::Domain(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Domain(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Parser)]
#[command(
    name = "optotension",
    version,
    about = "Digital twin and analysis toolkit for a photo-reflector tension sensor"
)]
struct Cli {
    /// Key-value model configuration file overriding built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed for every stochastic element; equal seeds reproduce outputs
    /// byte for byte.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an acquisition run and write a sample log.
    Simulate(commands::simulate::SimulateArgs),
    /// Fit the cubic calibration from a sample log plus a reference log.
    Calibrate(commands::calibrate::CalibrateArgs),
    /// Compute the metrics report for logs under an existing calibration.
    Metrics(commands::metrics::MetricsArgs),
    /// Run a closed-loop force-control experiment on the simulated actuator.
    Control(commands::control::ControlArgs),
    /// Sweep geometry parameters and tabulate deflection and stiffness.
    Sweep(commands::sweep::SweepArgs),
    /// Encode or decode CAN-FD sample payloads as hex.
    Frame(commands::frame::FrameArgs),
    /// Re-emit a sample log with calibrated forces filled in.
    Replay(commands::replay::ReplayArgs),
}

#[cfg(unix)]
fn reset_sigpipe() {
    // Die quietly when a pipe reader goes away instead of panicking on print.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = (|| -> Result<(), CliError> {
        let model = config::ModelConfig::load(cli.config.as_deref())?;
        match cli.command {
            Command::Simulate(args) => commands::simulate::run(&model, cli.seed, args),
            Command::Calibrate(args) => commands::calibrate::run(&model, cli.seed, args),
            Command::Metrics(args) => commands::metrics::run(&model, cli.seed, args),
            Command::Control(args) => commands::control::run(&model, cli.seed, args),
            Command::Sweep(args) => commands::sweep::run(&model, cli.seed, args),
            Command::Frame(args) => commands::frame::run(args),
            Command::Replay(args) => commands::replay::run(&model, cli.seed, args),
        }
    })();

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
