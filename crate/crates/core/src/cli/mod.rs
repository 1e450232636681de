//! Command-line front end.
//!
//! Every subcommand reads its parameters from flags and, optionally, from a
//! `--config` file of `key = value` lines whose keys are the long flag names
//! (`_` and `-` are interchangeable). Flags given on the command line win
//! over the file. Exit codes: 0 success, 1 usage error, 2 data error,
//! 3 property violation.

mod args;
mod bench;
mod commands;
mod config;
mod selfcheck;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

pub use args::{Cli, Command};
pub use bench::{parse_bounds, percentile, tlb_bench, BoundSpec, TlbRow};
pub use config::{merge_config, parse_config_file};
pub use selfcheck::{run_selfcheck, SuiteReport};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown flag: {0}")]
    UnknownFlag(String),
    #[error("conflicting options: {0}")]
    ConflictingOptions(String),
    #[error("missing required option: {0}")]
    MissingRequired(String),
    #[error("{0}")]
    Usage(String),
    #[error("property violation: {0}")]
    PropertyViolation(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownFlag(_)
            | CliError::ConflictingOptions(_)
            | CliError::MissingRequired(_)
            | CliError::Usage(_) => EXIT_USAGE,
            CliError::PropertyViolation(_) => EXIT_PROPERTY,
            CliError::Output(_) => EXIT_DATA,
            CliError::Lib(e) => match e {
                Error::BoundViolation { .. } => EXIT_PROPERTY,
                Error::FileNotFound(_)
                | Error::Io(_)
                | Error::Parse { .. }
                | Error::EmptyDataset
                | Error::InvalidSequence(_)
                | Error::OutOfBounds { .. }
                | Error::WindowTooLong { .. }
                | Error::LengthMismatch { .. }
                | Error::EmptyInput
                | Error::TransformMismatch
                | Error::NoIndexableSequence { .. }
                | Error::IndexFormat(_)
                | Error::QueryTooLong { .. } => EXIT_DATA,
                _ => EXIT_USAGE,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn from_clap(e: clap::Error) -> CliError {
    let text = e.to_string();
    let first = text
        .lines()
        .next()
        .unwrap_or_default()
        .trim_start_matches("error: ")
        .to_string();
    match e.kind() {
        ErrorKind::UnknownArgument => CliError::UnknownFlag(first),
        ErrorKind::MissingRequiredArgument => CliError::MissingRequired(first),
        ErrorKind::ArgumentConflict => CliError::ConflictingOptions(first),
        _ => CliError::Usage(text.trim_end().to_string()),
    }
}

/// Parses argv (including the program name) and merges any `--config` file.
pub fn parse_args<I, T>(argv: I) -> CliResult<std::result::Result<Cli, String>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = merge_config(argv)?;
    match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => Ok(Ok(Cli::from_arg_matches(&m).map_err(from_clap)?)),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            Ok(Err(e.to_string()))
        }
        Err(e) => Err(from_clap(e)),
    }
}

/// Runs one invocation, writing primary output to `out`.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse_args(argv)? {
        Ok(cli) => cli,
        Err(help) => {
            out.write_all(help.as_bytes())?;
            return Ok(());
        }
    };
    cli.validate()?;
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let mut buf: Vec<u8> = Vec::new();
            let result = pool.install(|| dispatch(&cli, &mut buf));
            out.write_all(&buf)?;
            result
        }
        None => dispatch(&cli, out),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let seed = cli.seed;
    match &cli.command {
        Command::BuildIndex(a) => commands::build_index_cmd(a, out),
        Command::RangeQuery(a) => commands::range_query_cmd(a, out),
        Command::KnnQuery(a) => commands::knn_query_cmd(a, out),
        Command::TlbBench(a) => bench::tlb_bench_cmd(a, seed, out),
        Command::WindowBench(a) => bench::window_bench_cmd(a, seed, out),
        Command::MotifDiscover(a) => commands::motif_cmd(a, seed, out),
        Command::Selfcheck(a) => selfcheck::selfcheck_cmd(a, seed, out),
    }
}

/// Entry point for the binary: runs, reports errors on stderr and returns
/// the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = match run(argv, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    let _ = lock.flush();
    code
}
