use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dqc1_lpn_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command).and_then(|(text, path)| write_output(&text, path)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn write_output(text: &str, path: Option<std::path::PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            }),
    }
}
