use std::path::PathBuf;

use crate::config::Config;
use crate::error::CliError;
use crate::output::Table;
use crate::output::{Artifacts, Section};
use crate::plot::{emit_plot, PlotSpec};
use crate::{Command, RunConfig};

mod count;
mod design;
mod dispersive;
mod fit;
mod simulate;
mod tune;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0;

pub struct Context {
    pub config: Config,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub out: Artifacts,
}

impl Context {
    /// First positional input, else the path stored under `key`.
    pub fn input(&self, key: &str) -> Result<PathBuf, CliError> {
        match self.inputs.first() {
            Some(p) => Ok(p.clone()),
            None => self.config.path(key).map(|p| p.to_owned()),
        }
    }

    pub fn plot(&mut self, spec: &PlotSpec, table: &Table) -> Result<(), CliError> {
        let svg = emit_plot(spec, table)?;
        self.out.write(&format!("{}.svg", spec.name), svg.as_bytes())
    }
}

pub fn execute(rc: &RunConfig, config: Config) -> Result<(), CliError> {
    let mut ctx = Context {
        config,
        seed: rc.seed.unwrap_or(DEFAULT_SEED),
        inputs: rc.input_paths.clone(),
        out: Artifacts::create(&rc.output_dir)?,
    };
    let body = match rc.command {
        Command::Design => design::run(&mut ctx)?,
        Command::Fit => fit::run(&mut ctx)?,
        Command::Tune => tune::run(&mut ctx)?,
        Command::ProtocolCount => count::run(&mut ctx)?,
        Command::ProtocolDispersive => dispersive::run(&mut ctx)?,
        Command::Simulate => simulate::run(&mut ctx)?,
    };
    let mut doc = Section::new();
    doc.text("command", rc.command.name())
        .count("seed", ctx.seed)
        .section("results", body);
    ctx.out.results(doc)
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn count_usize(ctx: &Context, key: &str) -> Result<usize, CliError> {
    let n = ctx.config.count(key)?;
    usize::try_from(n).map_err(|_| CliError::Config(format!("{key} is too large")))
}
