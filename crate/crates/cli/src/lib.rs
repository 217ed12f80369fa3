//! Command-line front end: configuration, dispatch and JSON reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{Overrides, RunConfig, SEED_ENV};
use crate::error::{exit, CliResult};
use crate::report::ReportDocument;

#[derive(Debug, Parser)]
#[command(
    name = "gamma2lab",
    version,
    about = "Numerical checks of Γ₂-type inequalities and entropy flows on spheres"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Integral and pointwise identities of the zonal calculus on a corpus.
    VerifyIdentities,
    /// Margin sweep of one inequality over a corpus.
    Check,
    /// Heat-flow trajectory, ODE and decay checks, trajectory CSV.
    Flow,
    /// Minimize Rayleigh ratios and compare with the theorem constants.
    Probe,
    /// The explicit failure of the modified inequality inside its gap.
    Counterexample,
}

fn finish<T: Serialize>(doc: ReportDocument<T>, cfg: &RunConfig) -> CliResult<bool> {
    doc.emit(cfg.output.as_deref())?;
    log::info!(
        "{}: {}",
        doc.command,
        if doc.pass { "pass" } else { "FAIL" }
    );
    Ok(doc.pass)
}

/// Runs one command and returns whether all non-exploratory checks passed.
pub fn execute(cli: &Cli, env_seed: Option<String>) -> CliResult<bool> {
    let cfg = RunConfig::resolve(&cli.overrides, env_seed)?;
    log::debug!("effective configuration: {cfg:?}");
    match cli.command {
        Command::VerifyIdentities => finish(commands::cmd_verify_identities(&cfg)?, &cfg),
        Command::Check => finish(commands::cmd_check(&cfg)?, &cfg),
        Command::Flow => finish(commands::cmd_flow(&cfg)?, &cfg),
        Command::Probe => finish(commands::cmd_probe(&cfg)?, &cfg),
        Command::Counterexample => finish(commands::cmd_counterexample(&cfg)?, &cfg),
    }
}

/// Parses `args`, runs, and maps the outcome to an exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::CONFIG
            } else {
                exit::PASS
            };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    match execute(&cli, std::env::var(SEED_ENV).ok()) {
        Ok(true) => exit::PASS,
        Ok(false) => exit::ASSERTION,
        Err(e) => {
            eprintln!("gamma2lab: {e}");
            e.exit_code()
        }
    }
}
