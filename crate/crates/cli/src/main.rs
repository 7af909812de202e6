//! `altproj`: run alternating-projection experiments and probes from JSON configs.

mod config;
mod output;
mod probe;
mod run;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Ctx;

#[derive(Parser)]
#[command(name = "altproj", version, about = "Alternating projections on convex sets: experiments and probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its trace (exit 2 if an adaptive block ran out of budget).
    Run(Common),
    /// Run a variational probe and write its JSON report.
    Probe(Common),
    /// Build the configured instances and print the checked-condition ledger.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `max_iter`.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Print nothing but errors and failed checks.
    #[arg(long)]
    quiet: bool,
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    let (common, cmd): (Common, fn(&Ctx) -> anyhow::Result<u8>) = match cli.command {
        Command::Run(c) => (c, run::cmd_run),
        Command::Probe(c) => (c, probe::cmd_probe),
        Command::Validate(c) => (c, validate::cmd_validate),
    };
    let loaded = config::load_config(&common.config)?;
    let ctx = Ctx::new(loaded, common.seed, common.max_iter, common.out, common.quiet);
    cmd(&ctx)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
