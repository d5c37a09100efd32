//! Experiment runner behind the `metroscope` binary.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod output;

use std::process::ExitCode;

use clap::Parser;

/// Exit status when `--check` finds a violated tolerance.
pub const EXIT_CHECK_FAILED: u8 = 2;

/// Parses `args`, runs the experiment and reports to stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = match cli.command.execute() {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for c in &run.table.checks {
        let tag = match (c.passed, c.soft) {
            (true, _) => "pass",
            (false, true) => "note",
            (false, false) => "FAIL",
        };
        eprintln!("[{tag}] {}: {}", c.name, c.detail);
    }
    eprintln!("wrote {} and {}", run.csv_path.display(), run.sidecar_path.display());
    if cli.command.common().check && run.table.hard_failures().next().is_some() {
        eprintln!("check failed");
        return ExitCode::from(EXIT_CHECK_FAILED);
    }
    ExitCode::SUCCESS
}
