//! Command-line orchestrator for the cognitive-task battery: generate
//! stimuli, run agents against the interactive environments, and score,
//! validate, and report on the recorded transcripts.
//!
//! Exit codes: 0 on success, 1 when stored artifacts fail validation or
//! replay, 2 for configuration and usage errors.

mod artifacts;
mod commands;
mod plan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cogbattery",
    version,
    about = "Generate, run, score and report on procedural cognitive-task sessions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate pattern-matrix items and write them as JSON records.
    Generate {
        /// How many items to generate.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Base seed; item seeds scan upward from here, skipping rejects.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a run plan, writing transcripts and scores.
    Run {
        /// Run plan (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Override the plan's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the plan's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Sessions to run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Recompute scores.json from the stored transcripts alone.
    Score {
        /// Run directory (out/<run-id>).
        run_dir: PathBuf,
    },
    /// Aggregate scores into report.csv, or compare/correlate metrics.
    Report {
        /// Run directory (out/<run-id>).
        run_dir: PathBuf,
        /// Where to write the CSV; defaults to <run_dir>/report.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Second run directory; paired t-test of --metric between the runs.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Metric for --compare, e.g. s_swm or accuracy.
        #[arg(long)]
        metric: Option<String>,
        /// Two metric names to correlate across this run's sessions.
        #[arg(long, num_args = 2, value_names = ["METRIC_A", "METRIC_B"])]
        correlate: Option<Vec<String>>,
    },
    /// Replay every transcript and cross-check scores.json.
    Validate {
        /// Run directory (out/<run-id>).
        run_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { count, seed, out } => {
            commands::generate::run(count, seed, out.as_deref())
        }
        Command::Run { config, out, seed, jobs } => {
            commands::run::run(&config, out.as_deref(), seed, jobs)
        }
        Command::Score { run_dir } => commands::score::run(&run_dir),
        Command::Report { run_dir, out, compare, metric, correlate } => commands::report::run(
            &run_dir,
            out.as_deref(),
            compare.as_deref(),
            metric.as_deref(),
            correlate.as_deref(),
        ),
        Command::Validate { run_dir } => commands::validate::run(&run_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
