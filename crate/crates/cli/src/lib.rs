//! Command-line harness: parse a [`RunConfig`], run repair trials on an
//! in-process cluster, print a table or JSON reports.
//!
//! Exit codes: 0 when every verdict passes, 1 when one fails, 2 when the
//! chosen scheme does not apply to the code, 64 on a usage error.

pub mod config;
pub mod run;

use thiserror::Error;

pub use config::{EraseSpec, MessageSpec, RunConfig, SchemeChoice};
pub use run::{prepare, run, run_trials, trial_rngs, write_outcomes, Prepared, TrialOutcome};

pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rendered clap output; the flag marks help/version requests.
    #[error("{0}")]
    Clap(String, bool),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Gate(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(_, true) => 0,
            CliError::Clap(_, false) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Gate(_) => EXIT_INAPPLICABLE,
            CliError::Internal(_) => EXIT_FAILED,
        }
    }
}
