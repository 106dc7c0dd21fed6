//! Batch front-end: `tubelab <command> --config run.toml`.
//!
//! Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
//! failure or missed check, 4 output directory not writable.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod output;
mod plot;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, Format, Overrides, RunConfig};
use crate::error::CliError;
use crate::output::OutputDir;

#[derive(Parser)]
#[command(
    name = "tubelab",
    version,
    about = "Tube geometry, multiplier fields and nonexistence certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Certificate for one tube thickness.
    Certify(Common),
    /// Both sides of the integral identity on a ball or annulus.
    IdentityCheck(Common),
    /// Radial shooting on an annulus, or a bracket scan on a ball.
    Radial(Common),
    /// Certificates over a list of thicknesses and the certified threshold.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// coarse, default, fine or CxRxA.
    #[arg(long)]
    resolution: Option<String>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("TUBELAB_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        value.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            CliError::Validation(format!("TUBELAB_THREADS must be a positive integer, got '{value}'"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Certify(c) => (Command::Certify, c),
        Sub::IdentityCheck(c) => (Command::IdentityCheck, c),
        Sub::Radial(c) => (Command::Radial, c),
        Sub::Sweep(c) => (Command::Sweep, c),
    };
    let fail = |e: CliError| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code() as u8)
    };
    let overrides = Overrides {
        output: common.out,
        format: common.format,
        resolution: common.resolution,
    };
    let run = match configure_threads()
        .and_then(|()| RunConfig::load(&common.config))
        .and_then(|config| config::validate(config, command, overrides))
    {
        Ok(run) => run,
        Err(e) => return fail(e),
    };
    let mut out = match OutputDir::create(&run.output) {
        Ok(out) => out,
        Err(e) => return fail(e),
    };
    let outcome = run::execute(&run, &mut out);
    if let Err(e) = out.finish(run.command.name(), &outcome) {
        return fail(e);
    }
    match outcome {
        Ok(()) => {
            println!(
                "{} artifacts written to {}",
                out.artifacts().len(),
                out.root().display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
