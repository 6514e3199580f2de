// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use colcm::runner::{cmd_converge, cmd_kernel, cmd_simulate, cmd_witness, Outcome};
use colcm::{Error, SimulationConfig};

const EXIT_CONFIG: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "colcm", version, about = "Collision models from colored-noise baths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`; default ".").
    #[arg(long)]
    output: Option<PathBuf>,
    /// Suppress progress and warning messages.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write the discrete collision weights W(l).
    Kernel(Common),
    /// Run one trajectory.
    Simulate(Common),
    /// Sweep dt and compare against the exact amplitude.
    Converge(Common),
    /// Report CP-divisibility flags and the revival witness.
    Witness(Common),
}

fn execute(cli: Cli) -> Result<(Outcome, bool), Error> {
    let common = match &cli.command {
        Command::Kernel(c) | Command::Simulate(c) | Command::Converge(c) | Command::Witness(c) => c,
    };
    let config = SimulationConfig::from_file(&common.config)?;
    let out = common
        .output
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let outcome = match cli.command {
        Command::Kernel(_) => cmd_kernel(&config, &out)?,
        Command::Simulate(_) => cmd_simulate(&config, &out)?.1,
        Command::Converge(_) => cmd_converge(&config, None, &out)?.1,
        Command::Witness(_) => cmd_witness(&config, &out)?.1,
    };
    Ok((outcome, common.quiet))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((outcome, quiet)) => {
            if !quiet {
                for m in &outcome.messages {
                    eprintln!("{m}");
                }
                for f in &outcome.files {
                    eprintln!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_RUNTIME })
        }
    }
}
