//! Command-line driver.
//!
//! ```text
//! spmm run <config>
//! spmm convergence <config> --levels n
//! spmm invariants <dir>
//! ```
//!
//! Artifacts go to `$SPMM_OUT/<run.label>` (default root `out`). Exit codes:
//! 0 ok, 2 solver failure, 3 gate failure, 4 configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spmm::config::RunConfig;
use spmm::parallel::Execution;
use spmm::run;
use spmm::Error;

#[derive(Parser)]
#[command(name = "spmm", version, about = "Moving mesh short pulse solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its artifacts.
    Run { config: PathBuf },
    /// Refinement study for a family with an exact solution.
    Convergence {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Run the levels one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Drift summary of a run directory; fails if a conservation gate fails.
    Invariants { dir: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Solver(_) | Error::Step { .. } => 2,
        Error::Io(_) => 1,
        _ => 4,
    }
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config } => {
            let cfg = load(&config)?;
            let root =
                std::env::var_os("SPMM_OUT").map_or_else(|| PathBuf::from("out"), PathBuf::from);
            let dir = run::artifact_dir(&root, &cfg);
            let s = run::run(&cfg, &dir)?;
            println!(
                "{} levels, {} Newton iterations, max residual {:.3e}, written to {}",
                s.records.len(),
                s.newton_iterations,
                s.max_residual,
                dir.display()
            );
            if let Some(e) = s.curve_error {
                println!("final physical-plane error {e:.6e}");
            }
            Ok(0)
        }
        Command::Convergence {
            config,
            levels,
            sequential,
        } => {
            let cfg = load(&config)?;
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            print!("{}", run::convergence(&cfg, levels, exec)?);
            Ok(0)
        }
        Command::Invariants { dir } => {
            let report = run::invariants_report(&dir)?;
            print!("{report}");
            Ok(if report.passed() { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
