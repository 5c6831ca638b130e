//! `ivote`: run elections, attack and privacy experiments, and regenerate
//! the cost and truncation tables.
//!
//! Exit codes: 0 success, 1 a checked claim does not hold, 2 a voter raised
//! an alarm, 64 usage or scenario error, 74 I/O error.

mod commands;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ivote::actors::Variant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CLAIM: u8 = 1;
pub const EXIT_ALARM: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

#[derive(Debug, Parser)]
#[command(name = "ivote", version, about = "I-voting verification simulator")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cast, verify and tally an election described by a scenario file.
    RunElection(CommonArgs),
    /// Measure how well verification-device malware guesses the vote, for both variants.
    PrivacyExperiment {
        #[command(flatten)]
        common: CommonArgs,
        /// Highlight the voter's row on the verification screen (negative control).
        #[arg(long, hide = true)]
        leaky: bool,
    },
    /// Regenerate the operation-count and q-truncation tables and check them.
    ReproduceTables {
        #[command(flatten)]
        common: CommonArgs,
        /// Expectations file replacing the built-in one.
        #[arg(long)]
        expectations: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (flat `key = value` format).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Directory for every output file; created if missing.
    #[arg(long, default_value = "ivote-out")]
    pub out: PathBuf,
    /// 64 hex digits; overrides the scenario seed. Falls back to IVOTE_SEED.
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub variant: Option<Variant>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let result = match cli.command {
        Command::RunElection(common) => commands::run_election(&common),
        Command::PrivacyExperiment { common, leaky } => commands::privacy_experiment(&common, leaky),
        Command::ReproduceTables {
            common,
            expectations,
        } => tables::reproduce_tables(&common, expectations.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
