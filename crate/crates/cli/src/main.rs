//! `spinmodes` command-line front end.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::Loaded;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "spinmodes", version, about = "Collective spin states under non-uniform atom-light coupling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML); built-in defaults are used when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the seed of the scenario.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Wigner grid as `xmin:xmax:n,pmin:pmax:n`.
    #[arg(long, global = true, value_name = "SPEC", allow_hyphen_values = true)]
    grid: Option<String>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effective parameters of both modes and their overlap J.
    Params,
    /// Wigner function of the configured state after the mode change.
    Wigner,
    /// Metrological gain curves versus J.
    Gain,
    /// Exact many-spin verification suite.
    Verify,
    /// Thermal mode mismatch and the temperature budget.
    Thermal,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut loaded = match &cli.config {
        Some(path) => Loaded::from_file(path)?,
        None => Loaded::defaults(),
    };
    if let Some(seed) = cli.seed {
        loaded.config.seed = seed;
    }
    if cli.grid.is_some() && !matches!(cli.command, Command::Wigner) {
        return Err(CliError::Usage("--grid only applies to the wigner subcommand".into()));
    }
    let ctx = Context { loaded, out: cli.out, json: cli.json };
    match cli.command {
        Command::Params => commands::params(&ctx),
        Command::Wigner => commands::wigner(&ctx, cli.grid.as_deref()),
        Command::Gain => commands::gain(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Thermal => commands::thermal(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
