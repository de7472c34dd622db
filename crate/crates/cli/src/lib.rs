//! Command-line front end for `attrconform`: the embedded plan table, curve
//! datasets over all plans, single-scenario risk reports, prior elicitation,
//! and oracle verification.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 domain error,
//! 4 verification failure.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::Path;

use args::{Cli, Command};
use commands::Outcome;
use config::Config;
pub use error::{exit, CliError};

/// Runs a parsed command line without writing anything.
pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Plans(a) => commands::plans(a, &cfg),
        Command::Curves(a) => commands::curves(a, &cfg),
        Command::Risk(a) => commands::risk(a, &cfg),
        Command::Elicit(a) => commands::elicit_cmd(a, &cfg),
        Command::Verify(a) => commands::verify(a, &cfg),
    }
}

fn out_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::Plans(a) => a.output.out.as_deref(),
        Command::Curves(a) => a.output.out.as_deref(),
        Command::Risk(a) => a.output.out.as_deref(),
        Command::Elicit(a) => a.output.out.as_deref(),
        Command::Verify(a) => a.output.out.as_deref(),
    }
}

fn write_output(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_owned(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Runs the command line and returns the process exit code. Output goes to
/// `stdout` unless `--out` was given; a failed verification still writes its
/// report. Diagnostics go to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = dispatch(cli).and_then(|outcome| {
        write_output(&outcome.text, out_path(cli), stdout)?;
        if outcome.verified {
            Ok(())
        } else {
            Err(CliError::Verification { report: outcome.text })
        }
    });
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
