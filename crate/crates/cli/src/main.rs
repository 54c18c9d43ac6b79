mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use commands::Run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] sorkin_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

fn parse(argv: Vec<String>) -> Result<(Cli, Vec<String>), clap::Error> {
    let cli = Cli::try_parse_from(&argv)?;
    let Some(path) = cli.command.common().and_then(|c| c.config.clone()) else {
        return Ok((cli, argv));
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        clap::Error::raw(
            clap::error::ErrorKind::Io,
            format!("cannot read config {}: {e}\n", path.display()),
        )
    })?;
    let merged = args::merge_config(&argv, &text)
        .map_err(|e| clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e}\n")))?;
    Ok((Cli::try_parse_from(&merged)?, merged))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let (cli, argv) = match parse(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not failures.
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let run = Run { args: argv, started };
    let result = match &cli.command {
        Command::Profile(a) => commands::profile(&run, a),
        Command::Compare(a) => commands::compare(&run, a),
        Command::ScanD(a) => commands::scan_d(&run, a),
        Command::Bound(a) => commands::bound(a).map(|ok| {
            if !ok {
                std::process::exit(1);
            }
        }),
        Command::Presets(a) => commands::presets(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {e}", cli.command.name());
            if let CliError::Core(sorkin_core::Error::NonConvergence { achieved, tolerance, panels }) = &e {
                eprintln!("achieved relative change {achieved:.3e} against tolerance {tolerance:.1e} at {panels} panels");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
