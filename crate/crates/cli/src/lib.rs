//! Command-line front end for the `spinres` resonator toolkit.
//!
//! [`run`] executes one pipeline and writes `results.json`, CSV tables and
//! SVG plots into the output directory.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod plot;
pub mod units;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Circuit numbers, field map, coupling and Purcell metrics.
    Design,
    /// De-embed and fit a reflection trace.
    Fit,
    /// Quadratic tuning, hysteresis and vortex jumps of a field sweep.
    Tune,
    /// Photon-counting integration times and regime map.
    ProtocolCount,
    /// Dispersive readout fidelity versus detuning.
    ProtocolDispersive,
    /// Write a synthetic trace and field sweep.
    Simulate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Fit => "fit",
            Command::Tune => "tune",
            Command::ProtocolCount => "protocol-count",
            Command::ProtocolDispersive => "protocol-dispersive",
            Command::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Trace (fit) or sweep (tune) files; override `fit.trace` / `tune.sweep`.
    pub input_paths: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(name = "spinres", version, about = "Single-spin resonator design and analysis")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Input data files.
    pub inputs: Vec<PathBuf>,
    /// TOML file of unit-suffixed settings.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Seed for synthetic data and Monte Carlo checks.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Override one setting, e.g. `--set design.wire_width="4 um"`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            input_paths: cli.inputs,
            output_dir: cli.out,
            config_path: cli.config,
            overrides: cli.overrides,
            seed: cli.seed,
        }
    }
}

/// Execute one command.
pub fn run(rc: &RunConfig) -> Result<(), CliError> {
    let config = config::Config::load(rc.config_path.as_deref(), &rc.overrides)?;
    commands::execute(rc, config)
}

/// Parse `args`, run, report errors; returns the process exit status.
///
/// Errors go to stdout as one line of JSON and to stderr as text.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let err = CliError::Usage(
                e.to_string()
                    .lines()
                    .next()
                    .unwrap_or_default()
                    .trim_start_matches("error: ")
                    .to_owned(),
            );
            eprintln!("{e}");
            println!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(&cli.into()) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            println!("{}", err.to_json());
            err.exit_code()
        }
    }
}
