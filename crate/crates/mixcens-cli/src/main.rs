//! `mixcens`: lifetime-data analysis under a censoring rule that guarantees
//! at least m failures and caps the extra observation window at s time units
//! beyond the m-th failure.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error,
//! 3 numerical non-convergence.

mod args;
mod commands;
mod io;
mod simconfig;

use clap::Parser;
use std::process::ExitCode;

/// Command-level errors, partitioned by exit code.
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Data(m) | AppError::Numeric(m) => m,
        }
    }

    /// Map a library error that arose from user-supplied flags.
    fn usage_from(err: mixcens::Error) -> Self {
        AppError::Usage(err.to_string())
    }
}

impl From<mixcens::Error> for AppError {
    fn from(err: mixcens::Error) -> Self {
        match err {
            mixcens::Error::InvalidParameter(m) => AppError::Usage(m),
            mixcens::Error::Domain(m) | mixcens::Error::Data(m) | mixcens::Error::Index(m) => {
                AppError::Data(m)
            }
            mixcens::Error::NonConvergence(m) => AppError::Numeric(m),
            err @ mixcens::Error::Quadrature { .. } => AppError::Numeric(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version exit cleanly; real parse errors are usage errors
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        args::Command::Censor(a) => commands::cmd_censor(a),
        args::Command::Fit(a) => commands::cmd_fit(a),
        args::Command::Bayes(a) => commands::cmd_bayes(a),
        args::Command::Expect(a) => commands::cmd_expect(a),
        args::Command::Gof(a) => commands::cmd_gof(a),
        args::Command::Simulate(a) => commands::cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
