//! File formats, reports and the `cpnorm` command-line tool built on
//! [`cpnorm_core`].
//!
//! Commands: `norm`, `verify`, `purity`, `suite`. Exit codes are 0 on
//! success, 2 for an invalid configuration, 3 for a non-CP map without
//! `--allow-non-cp`, 4 when a checked invariant fails.

pub mod channel_file;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod verify;

pub use cpnorm_core;

pub use commands::{run, Outcome};
pub use config::{Command, PurityParams, RunConfig, SuiteParams, VerifyParams};
pub use error::{CliError, CliResult};
pub use report::{Format, Report};

/// Runs the command, writes its report, then turns failed checks into
/// [`CliError::Failed`].
pub fn execute(config: &RunConfig) -> CliResult<()> {
    let outcome = run(config)?;
    outcome.report.write(config.format, config.output.as_deref())?;
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(outcome.failures))
    }
}
