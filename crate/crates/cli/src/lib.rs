//! Experiment runner: every command produces a [`RunRecord`], written as JSON
//! or as CSV with a `#` metadata line.

pub mod args;
pub mod commands;
pub mod parse;
pub mod record;

use std::time::Instant;

use thiserror::Error;

pub use args::{Cli, Command, Format};
pub use record::{Cell, RunRecord, Table, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dqc1_lpn::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 bad flags, 3 budget exhausted, 4 internal invariant violation, 1 I/O.
    pub fn exit_code(&self) -> u8 {
        use dqc1_lpn::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                E::BudgetExhausted { .. } => 3,
                E::InvalidParameter(_)
                | E::InvalidBits(_)
                | E::InvalidQubit { .. }
                | E::LengthMismatch { .. }
                | E::TooManyQubits { .. }
                | E::EmptyKeepSet => 2,
                _ => 4,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A finished command: the record plus the rows for tabular output.
#[derive(Clone, Debug)]
pub struct Output {
    pub record: RunRecord,
    pub table: Table,
    pub format: Format,
}

impl Output {
    pub fn render(&self) -> String {
        match self.format {
            Format::Json => self.record.to_json(),
            Format::Csv => self.record.to_csv(&self.table),
        }
    }
}

/// Run a parsed command and render its output.
pub fn run(command: &Command) -> CliResult<(String, Option<std::path::PathBuf>)> {
    let start = Instant::now();
    let (mut out, opts) = match command {
        Command::Learn(a) => (commands::learn(a)?, &a.output),
        Command::TraceTable(a) => (commands::trace_table(a)?, &a.output),
        Command::DiscordSweep(a) => (commands::discord_sweep(a)?, &a.output),
        Command::NoiseSweep(a) => (commands::noise_sweep(a)?, &a.output),
        Command::Coherence(a) => (commands::coherence(a)?, &a.output),
    };
    if opts.timing {
        out.record.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok((out.render(), opts.out.clone()))
}
