//! `spinloop`: run spin-1/2 field scenarios from a TOML config.
//!
//! Exit codes: 0 success, 1 failed checks or I/O trouble, 2 config error,
//! 3 singularity, 4 not a loop.

mod commands;
mod config;
mod failure;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Done;
use config::{Overrides, Scenario};
use failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "spinloop",
    version,
    about = "Two-axis spin-1/2 fields: propagators, loops, geometric phases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the loop residual tolerance (radians) of every scenario.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Override the number of integration steps of every scenario.
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Directory receiving one subdirectory of results per scenario.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write analytic and numeric trajectories plus a summary.
    Simulate { config: PathBuf },
    /// Geometric phase of the initial state, taking t_end as the loop time.
    Phase { config: PathBuf },
    /// List loop instants up to --t-max.
    LoopScan {
        config: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Compare every analytic result with its numerical oracle.
    Verify { config: PathBuf },
}

impl Command {
    fn config(&self) -> &Path {
        match self {
            Command::Simulate { config }
            | Command::Phase { config }
            | Command::LoopScan { config, .. }
            | Command::Verify { config } => config,
        }
    }

    fn run(&self, s: &Scenario, out_dir: &Path) -> Result<Done, Failure> {
        match *self {
            Command::Simulate { .. } => commands::simulate(s, out_dir),
            Command::Phase { .. } => commands::phase(s, out_dir),
            Command::LoopScan { t_max, samples, .. } => commands::scan(s, t_max, samples, out_dir),
            Command::Verify { .. } => commands::verify(s, out_dir),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        tol: cli.tol,
        steps: cli.steps,
    };
    let scenarios = match config::load(cli.command.config(), overrides) {
        Ok(s) => s,
        Err(e) => {
            let failure = Failure::from(e);
            eprintln!("error: {failure}");
            return ExitCode::from(failure.exit_code());
        }
    };

    // Scenarios are independent and write to separate directories.
    let results: Vec<Result<Done, Failure>> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(|| cli.command.run(s, &cli.out_dir)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });

    let mut code = 0;
    for (s, result) in scenarios.iter().zip(results) {
        let failure = match result {
            Ok(done) => {
                done.lines.iter().for_each(|l| println!("{l}"));
                (done.failed_checks > 0).then_some(Failure::Checks(done.failed_checks))
            }
            Err(f) => Some(f),
        };
        if let Some(f) = failure {
            eprintln!("error: scenario `{}`: {f}", s.name);
            if code == 0 {
                code = f.exit_code();
            }
        }
    }
    ExitCode::from(code)
}
