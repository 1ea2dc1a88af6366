//! Experiment harness for FTPL on m-set semi-bandits: the trial loop, a
//! parallel driver, CSV output, the oracle verification suite and the CLI.

pub mod cli;
pub mod csv;
pub mod error;
pub mod experiment;
pub mod verify;

pub use cli::cli_main;
pub use csv::{format_g17, write_csv, write_csv_to, CSV_HEADER};
pub use error::HarnessError;
pub use experiment::{checkpoints, mean_se, run_experiment, run_trial, ExperimentResult, RunOptions, TrialOutcome};
pub use verify::{run_suite, CheckResult, SuiteSize};
