//! `d2d`: door-to-door travel time analyses from the command line.
//!
//! Exit codes: 0 on success, 2 for invalid input or configuration, 3 when a
//! computation fails. Errors are reported as one JSON object on stderr.

use std::io::Write;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod export;

use config::{RunArgs, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "d2d", version, about = "Door-to-door travel time analysis")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse every input and report row counts and coverage
    Validate,
    /// Per zone and period, how often each mode is the fastest
    Fastest,
    /// Average fastest door-to-door time and its interval bin
    FastestTime,
    /// Per zone and period, how often each mode has the lowest variability
    Reliability,
    /// Compare the baseline with airport processing times overridden
    Whatif,
    /// Share of each trip phase per city pair
    Legs,
    /// Fit access ride time against distance for every airport
    Integration,
    /// Fastest average time change between two dates
    WeatherDiff {
        #[arg(long)]
        date_a: NaiveDate,
        #[arg(long)]
        date_b: NaiveDate,
        /// Compare whole days instead of the five periods
        #[arg(long)]
        whole_day: bool,
    },
    /// Passenger delay caused by one segment's arrival deviation
    Delay {
        #[arg(long)]
        segment_id: String,
    },
}

fn run(cli: &Cli) -> Result<serde_json::Value, CliError> {
    let cfg = RunConfig::resolve(&cli.run)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads {n}: {e}")))?;
    }
    match &cli.command {
        Command::Validate => commands::validate(&cfg),
        Command::Fastest => commands::fastest(&cfg),
        Command::FastestTime => commands::fastest_time(&cfg),
        Command::Reliability => commands::reliability(&cfg),
        Command::Whatif => commands::whatif(&cfg),
        Command::Legs => commands::legs(&cfg),
        Command::Integration => commands::integration(&cfg),
        Command::WeatherDiff {
            date_a,
            date_b,
            whole_day,
        } => commands::weather(&cfg, *date_a, *date_b, *whole_day),
        Command::Delay { segment_id } => commands::delay(&cfg, segment_id),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("json values serialize");
            // a closed stdout (e.g. piped into head) is not a failure of the run
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
