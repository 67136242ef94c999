// Copyright 2026 The qwalk Authors
// SPDX-License-Identifier: Apache-2.0

//! `qwalk`: walk simulations, `K`/`C` quantifiers, Monte-Carlo error bars and
//! Lindblad checks driven by a TOML config.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical contract violation,
//! 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;
mod svg;

use commands::Context;

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Multi-time statistics of discrete-time quantum walks")]
struct Cli {
    /// Output directory. Defaults to `[output] directory`, then $QWALK_OUTPUT_DIR, then ./qwalk-output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Position/coin distribution after a number of steps.
    Simulate {
        config: PathBuf,
        /// Steps to run (default: N).
        #[arg(long)]
        steps: Option<usize>,
        /// Emit every parity-allowed mode, including zeros.
        #[arg(long)]
        dense: bool,
    },
    /// K, C_superop and C_prob, checked against each other.
    Quantify {
        config: PathBuf,
        /// Run the table angles for both initial coins instead of the configured walk.
        #[arg(long)]
        sweep: bool,
    },
    /// Theory and randomizing-measurement K for the table angles (N = 20, M = 10).
    Table1 { config: PathBuf },
    /// Unmeasured, recombined and difference tables at M = N/2.
    Visualize {
        config: PathBuf,
        #[arg(long)]
        dense: bool,
    },
    /// Error bars of K and C under parameter jitter.
    Montecarlo {
        config: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generalized K and C of a Lindblad generator.
    LindbladCheck { config: PathBuf },
}

fn run(cli: Cli) -> Result<(), error::CliError> {
    let out = cli.output.as_deref();
    match cli.command {
        Command::Simulate { config, steps, dense } => commands::simulate(&Context::load(&config, out, dense)?, steps),
        Command::Quantify { config, sweep } => commands::quantify(&Context::load(&config, out, false)?, sweep),
        Command::Table1 { config } => commands::table1(&Context::load(&config, out, false)?),
        Command::Visualize { config, dense } => commands::visualize(&Context::load(&config, out, dense)?),
        Command::Montecarlo { config, samples, seed } => {
            commands::montecarlo(&Context::load(&config, out, false)?, samples, seed)
        }
        Command::LindbladCheck { config } => commands::lindblad_check(&Context::load(&config, out, false)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
