//! Command-line front end: argument parsing, output documents, figure data.

pub mod args;
pub mod commands;
pub mod figures;
pub mod output;

use std::fmt;
use std::fs;

use args::{Cli, Command};
use output::{Document, Meta};

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters; exit status 2.
    Usage(String),
    /// The computation itself failed; exit status 1.
    Failed(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<slowbond::Error> for CliError {
    fn from(e: slowbond::Error) -> Self {
        use slowbond::Error::*;
        match e {
            InvalidGeometry(_) | StateSpaceTooLarge { .. } | SiteOutOfRange(_) | Simulation(_) | Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Expand(_) => "expand",
        Command::Exact(_) => "exact",
        Command::Semi(_) => "semi",
        Command::Analyze(_) => "analyze",
        Command::Simulate(_) => "simulate",
        Command::Couple(_) => "couple",
        Command::Figures(_) => "figures",
        Command::Golden(_) => "golden",
    }
}

/// Runs one command and returns its document.
pub fn execute(cli: &Cli) -> Result<Document, CliError> {
    let meta = Meta::new(command_name(&cli.command), cli.common.precision_bits);
    match &cli.command {
        Command::Expand(a) => commands::run_expand(a, meta),
        Command::Exact(a) => commands::run_exact(a, meta),
        Command::Semi(a) => commands::run_semi(a, meta),
        Command::Analyze(a) => commands::run_analyze(a, meta),
        Command::Simulate(a) => commands::run_simulate(a, meta),
        Command::Couple(a) => commands::run_couple(a, meta),
        Command::Figures(a) => figures::run_figures(a, meta),
        Command::Golden(a) => commands::run_golden(a, meta),
    }
}

/// Runs, writes the document and returns the exit status: 0 iff every
/// check passed.
pub fn run(cli: &Cli) -> i32 {
    let doc = match execute(cli) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let text = doc.render(cli.common.format);
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    for c in &doc.checks {
        eprintln!("{}: {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if doc.passed() {
        0
    } else {
        1
    }
}
