//! `hclique`: command-line front end for the hidden-clique library.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::output::{emit_error, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error(&CliError::Usage(e.to_string().trim().to_string()));
            return ExitCode::from(2);
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::run(&cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {t} threads: {e}"))),
        },
        None => commands::run(&cli),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            emit_error(&e);
            ExitCode::from(e.exit_code())
        }
    }
}
