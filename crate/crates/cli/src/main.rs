use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use fogcell_cli::args::{Cli, Command};
use fogcell_cli::{commands, CliError};

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn execute(cli: Cli) -> Result<Option<String>, CliError> {
    match cli.command {
        Command::DelaySweep(common) => {
            let cfg = common.load()?;
            let out = commands::delay_sweep(&cfg)?;
            emit(common.out.as_deref(), &out.text)?;
            Ok(out.model_error)
        }
        Command::Throughput(common) => {
            let cfg = common.load()?;
            emit(common.out.as_deref(), &commands::throughput(&cfg)?)?;
            Ok(None)
        }
        Command::Fogsim { common, summary } => {
            let cfg = common.load()?;
            let out = commands::fogsim(&cfg)?;
            emit(common.out.as_deref(), &out.event_log)?;
            match (summary, &common.out) {
                (Some(path), _) => emit(Some(&path), &out.summary)?,
                (None, Some(_)) => emit(None, &out.summary)?,
                (None, None) => eprint!("{}", out.summary),
            }
            Ok(None)
        }
        Command::Calibrate(common) => {
            let cfg = common.load()?;
            emit(common.out.as_deref(), &commands::calibrate_report(&cfg)?)?;
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(model_error)) => {
            eprintln!("fogcell: model error: {model_error}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("fogcell: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
