//! Command-line front end.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::Parser;
use ftpl_mset::{DistKind, EnvKind, EstimatorKind, ExperimentConfig};

use crate::csv::{write_csv, write_csv_to};
use crate::error::HarnessError;
use crate::experiment::{run_experiment, RunOptions};
use crate::verify::{run_suite, SuiteSize};

pub const THREADS_ENV: &str = "FTPL_MSET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ftpl-mset", about = "FTPL with geometric resampling on m-set semi-bandits")]
pub struct Args {
    /// Number of base arms.
    #[arg(long, default_value_t = 16)]
    pub d: usize,
    /// Arms selected per round.
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Horizon.
    #[arg(long = "T", default_value_t = 10_000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value = "frechet")]
    pub dist: DistKind,
    #[arg(long, default_value = "cgr")]
    pub estimator: EstimatorKind,
    #[arg(long, default_value = "stochastic")]
    pub env: EnvKind,
    #[arg(long, default_value_t = 0.125)]
    pub gap: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Learning-rate constant.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Cap on outer resampling iterations per round.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub checkpoint_every: usize,
    /// Length of the first switching phase.
    #[arg(long, default_value_t = 10)]
    pub phase_len: usize,
    /// Alternate which block is optimal between switching phases.
    #[arg(long)]
    pub swap_identities: bool,
    /// Start the switching schedule in a high-loss phase.
    #[arg(long)]
    pub start_high: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the oracle property suite instead of an experiment.
    #[arg(long)]
    pub verify: bool,
    /// Worker threads (falls back to FTPL_MSET_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Skip failed trials instead of aborting.
    #[arg(long)]
    pub keep_going: bool,
}

impl Args {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            d: self.d,
            m: self.m,
            horizon: self.horizon,
            alpha: self.alpha,
            dist_kind: self.dist,
            estimator_kind: self.estimator,
            lr_constant: self.c,
            env_kind: self.env,
            gap: self.gap,
            trials: self.trials,
            master_seed: self.seed,
            resample_cap: self.cap,
            checkpoint_every: self.checkpoint_every,
            phase_len: self.phase_len,
            swap_identities: self.swap_identities,
            start_high: self.start_high,
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("{THREADS_ENV} must be a positive integer (got {v:?})")),
        Err(_) => Ok(None),
    }
}

/// Parses `argv` (program name first), runs, and returns the exit status.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = match args.threads.map(Some).map_or_else(threads_from_env, Ok) {
        Ok(Some(0)) => {
            eprintln!("error: thread count must be positive");
            return 2;
        }
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };

    if args.verify {
        let results = run_suite(SuiteSize::default(), args.seed);
        for r in &results {
            println!("{r}");
        }
        return if results.iter().all(|r| r.passed) { 0 } else { 1 };
    }

    match run(&args, threads) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(args: &Args, threads: Option<usize>) -> Result<(), HarnessError> {
    let result = run_experiment(&args.config(), RunOptions { threads, keep_going: args.keep_going })?;
    match &args.out {
        Some(path) => write_csv(&result, path)?,
        None => write_csv_to(&result, io::stdout().lock())?,
    }
    let (mean, se) = result.final_regret();
    let mut err = io::stderr().lock();
    writeln!(
        err,
        "trials={} final_regret={mean:.4}±{se:.4} resamples/round={:.3} truncated_rounds={} wall={:.3}s",
        result.trials.len(),
        result.resamples_per_round(),
        result.truncated_rounds(),
        result.wall_ns as f64 * 1e-9,
    )?;
    for (k, msg) in &result.failures {
        writeln!(err, "trial {k} skipped: {msg}")?;
    }
    Ok(())
}
