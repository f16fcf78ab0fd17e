//! `hfss`: run, select and verify harmonic map heat flow experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod archive;
mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Check;
use config::{ExperimentConfig, Overrides};
use error::{CliResult, Failure};

#[derive(Parser)]
#[command(name = "hfss", version, about = "Harmonic map heat flow experiments on the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scheme and write its trajectory archive.
    Simulate(RunArgs),
    /// Run every scheme, keep the admissible trajectories and archive them.
    Ensemble(RunArgs),
    /// Build the ensemble and select a trajectory per enumeration.
    Select(RunArgs),
    /// Re-check an archive and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file, TOML or JSON (by extension).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cells per axis of the ball mesh.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// `<tag>[:epsilon=..,damping=..,gate=..,ledger=..]`; repeatable.
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    /// constant, great-circle, equator, twisted, random-smooth[:seed] or custom-file:<path>.
    #[arg(long)]
    datum: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Functional ordering, e.g. `aligned`, `-aligned`, `reverse,shuffle:3`; a second one is compared.
    #[arg(long = "enumeration", allow_hyphen_values = true)]
    enumerations: Vec<String>,
    /// Store every stride-th snapshot after the dense prefix.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    dense_prefix: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trajectory archive directory.
    archive: PathBuf,
    /// Checks to run; all of them when omitted.
    #[arg(long = "check", value_enum)]
    checks: Vec<Check>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> CliResult<config::Resolved> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply(&Overrides {
            out: self.out.clone(),
            n: self.n,
            dt: self.dt,
            horizon: self.horizon,
            schemes: self.schemes.clone(),
            datum: self.datum.clone(),
            seed: self.seed,
            enumerations: self.enumerations.clone(),
            stride: self.stride,
            dense_prefix: self.dense_prefix,
        })?;
        cfg.resolve()
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("HFSS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Validation(format!("HFSS_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Validation(e.to_string()))
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    configure_threads()?;
    let summary = match cli.command {
        Command::Simulate(a) => commands::simulate(&a.resolve()?)?,
        Command::Ensemble(a) => commands::ensemble(&a.resolve()?)?,
        Command::Select(a) => commands::select(&a.resolve()?)?,
        Command::Verify(a) => {
            let report = commands::verify(&a.archive, &a.checks)?;
            if let Some(p) = &a.out {
                archive::write_json(p, &report)?;
            }
            print_json(&report)?;
            if !report.passed {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.check).collect();
                eprintln!("hfss: verification failed: {failed:?}");
                return Ok(ExitCode::from(3));
            }
            return Ok(ExitCode::SUCCESS);
        }
    };
    print_json(&summary)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hfss: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
