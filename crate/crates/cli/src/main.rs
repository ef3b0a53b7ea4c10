use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cumseries_cli::{run, Cli, CliError, EXIT_VALIDATION};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let written = match &outcome.output {
                Some(path) => std::fs::write(path, &outcome.text),
                None => std::io::stdout().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                let err = CliError {
                    kind: "Io".into(),
                    message: e.to_string(),
                    code: EXIT_VALIDATION,
                };
                eprintln!("{err}");
                return ExitCode::from(EXIT_VALIDATION as u8);
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code as u8)
        }
    }
}
