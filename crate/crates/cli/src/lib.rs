//! Command-line front end: problem files in, reports and CSV out.

pub mod commands;
pub mod error;
pub mod problem;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Verdict;
use error::{CliResult, EXIT_CHECK_FAILED};
use problem::ProblemFile;

#[derive(Debug, Parser)]
#[command(name = "causalrd", version, about = "Directed information and nonanticipative rate-distortion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Directed and mutual information of the file's source and channel.
    Dirinfo { file: PathBuf },
    /// Randomized check of both variational equalities.
    CheckVariational {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep `s_grid` and write the R(D) curve as CSV.
    RdfCurve {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Start every slope from the configured initial law.
        #[arg(long)]
        no_warm_start: bool,
        /// Solve slopes concurrently (needs --no-warm-start).
        #[arg(long)]
        parallel: bool,
    },
    /// Compare the solver against the brute-force grid oracle.
    OracleCompare {
        file: PathBuf,
        /// Grid step; defaults to 0.01 for horizon 0 and 0.02 for horizon 1.
        #[arg(long)]
        step: Option<f64>,
    },
}

/// Read and validate; relative output paths in the file are taken relative
/// to the file's directory.
fn load(path: &std::path::Path) -> CliResult<problem::Problem> {
    let mut p = ProblemFile::read(path)?.validate()?;
    let base = path.parent().unwrap_or(std::path::Path::new(""));
    for slot in [&mut p.output.report, &mut p.output.curve_csv] {
        if let Some(rel) = slot.as_ref().filter(|q| q.is_relative()) {
            *slot = Some(base.join(rel));
        }
    }
    Ok(p)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<Verdict> {
    match &cli.command {
        Command::Dirinfo { file } => commands::dirinfo(&load(file)?, out),
        Command::CheckVariational { file, trials, seed } => {
            commands::check_variational(&load(file)?, *trials, *seed, out)
        }
        Command::RdfCurve { file, out: csv, no_warm_start, parallel } => {
            commands::rdf_curve(&load(file)?, csv.as_deref(), !no_warm_start, *parallel, out)
        }
        Command::OracleCompare { file, step } => commands::oracle_compare(&load(file)?, *step, out),
    }
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(Verdict::Pass) => 0,
        Ok(Verdict::Fail) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
