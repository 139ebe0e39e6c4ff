// SPDX-License-Identifier: Apache-2.0

//! `mkdv-lab`: run configured experiments and report on their results.
//!
//! Exit codes: 1 i/o, 2 config parse, 3 config validation, 4 numerical failure,
//! 5 threshold failure under `--assert`, 6 digest mismatch.

mod config;
mod error;
mod experiments;
mod output;
mod plot;
mod report;
mod runner;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "mkdv-lab", version, about = "Numerical lab for the coupled mKdV system")]
struct Cli {
    /// Worker threads for the sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 5 when an expectation fails.
        #[arg(long)]
        assert: bool,
        /// Also write SVG plots of the series.
        #[arg(long)]
        plots: bool,
    },
    /// Verify digests and print a consolidated report.
    Report {
        dirs: Vec<PathBuf>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Run { config, out, assert, plots } => {
            let cfg = runner::load_config(&config)?;
            let res = runner::run_config(&cfg, out.as_deref(), plots)?;
            println!("wrote {}", res.dir.display());
            for c in &res.checks {
                println!("{} {}: {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.measured, c.requirement);
            }
            let failed: Vec<&str> = res.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if assert && !failed.is_empty() {
                return Err(CliError::Threshold(failed.join(", ")));
            }
            Ok(())
        }
        Command::Report { dirs, out } => {
            let refs: Vec<&Path> = dirs.iter().map(PathBuf::as_path).collect();
            let text = report::report(&refs)?;
            print!("{text}");
            if let Some(path) = out {
                std::fs::write(path, &text)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mkdv-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
