//! Trial loop and parallel experiment driver.

use std::time::Instant;

use ftpl_mset::{derive_trial_rng, validate_config, Environment, ExperimentConfig, FtplPolicy, RoundRecord};
use rayon::prelude::*;

use crate::error::HarnessError;

/// Records of one trial plus its effort totals.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    /// One record per checkpoint, ascending in `t`.
    pub records: Vec<RoundRecord>,
    /// Selected-arm resamples summed over all rounds.
    pub total_resamples: u64,
    /// Outer resampling iterations summed over all rounds. For GR this is the
    /// per-round maximum of the arm counts.
    pub total_outer_iterations: u64,
    /// Rounds whose estimate hit the resample cap.
    pub truncated_rounds: u64,
    pub elapsed_ns: u64,
}

impl TrialOutcome {
    pub fn final_regret(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_pseudo_regret)
    }

    pub fn regret_at(&self, t: usize) -> Option<f64> {
        self.records.iter().find(|r| r.t == t).map(|r| r.cum_pseudo_regret)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker count; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// Drop failed trials instead of aborting the experiment.
    pub keep_going: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Successful trials in ascending trial order.
    pub trials: Vec<TrialOutcome>,
    /// Trials dropped under [`RunOptions::keep_going`].
    pub failures: Vec<(usize, String)>,
    pub wall_ns: u64,
}

/// Sample mean and standard error; the SE of a single value is 0.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

impl ExperimentResult {
    pub fn final_regret(&self) -> (f64, f64) {
        mean_se(&self.final_regrets())
    }

    pub fn final_regrets(&self) -> Vec<f64> {
        self.trials.iter().map(TrialOutcome::final_regret).collect()
    }

    /// Mean and SE of the cumulative regret at checkpoint `t`.
    pub fn regret_at(&self, t: usize) -> Option<(f64, f64)> {
        let xs: Option<Vec<f64>> = self.trials.iter().map(|tr| tr.regret_at(t)).collect();
        xs.filter(|v| !v.is_empty()).map(|v| mean_se(&v))
    }

    /// `(t, mean, se)` at every checkpoint.
    pub fn mean_curve(&self) -> Vec<(usize, f64, f64)> {
        checkpoints(self.config.horizon, self.config.checkpoint_every)
            .into_iter()
            .filter_map(|t| self.regret_at(t).map(|(m, s)| (t, m, s)))
            .collect()
    }

    pub fn total_resamples(&self) -> u64 {
        self.trials.iter().map(|t| t.total_resamples).sum()
    }

    pub fn total_outer_iterations(&self) -> u64 {
        self.trials.iter().map(|t| t.total_outer_iterations).sum()
    }

    pub fn truncated_rounds(&self) -> u64 {
        self.trials.iter().map(|t| t.truncated_rounds).sum()
    }

    /// Mean selected-arm resamples per round.
    pub fn resamples_per_round(&self) -> f64 {
        self.total_resamples() as f64 / (self.trials.len() * self.config.horizon) as f64
    }

    pub fn outer_iterations_per_round(&self) -> f64 {
        self.total_outer_iterations() as f64 / (self.trials.len() * self.config.horizon) as f64
    }
}

/// Multiples of `every` up to `horizon`, followed by `horizon` itself.
pub fn checkpoints(horizon: usize, every: usize) -> Vec<usize> {
    let mut ts: Vec<usize> = (1..=horizon / every).map(|k| k * every).collect();
    if ts.last() != Some(&horizon) {
        ts.push(horizon);
    }
    ts
}

/// Plays one trial of `cfg.horizon` rounds.
///
/// The per-round randomness is drawn from the trial stream in a fixed order:
/// the action perturbation, then `d` loss uniforms, then the resampling draws.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutcome, HarnessError> {
    let cfg = validate_config(cfg.clone())?;
    let env = Environment::from_config(&cfg);
    let comparator = env.optimal_fixed_action(cfg.horizon);
    let mut policy = FtplPolicy::from_config(&cfg)?;
    let mut rng = derive_trial_rng(cfg.master_seed, trial as u64);

    let d = cfg.d;
    let mut means = vec![0.0; d];
    let mut losses = vec![0.0; d];
    let mut observed = Vec::with_capacity(cfg.m);
    let mut out = TrialOutcome {
        trial,
        records: Vec::with_capacity(cfg.horizon / cfg.checkpoint_every + 1),
        total_resamples: 0,
        total_outer_iterations: 0,
        truncated_rounds: 0,
        elapsed_ns: 0,
    };
    let mut regret = 0.0;
    let (mut window_resamples, mut window_ns) = (0u64, 0u64);

    for t in 1..=cfg.horizon {
        let start = Instant::now();
        let (action, _) = policy.select_action(&mut rng);
        let mut spent = start.elapsed().as_nanos() as u64;

        env.sample_losses(t, &mut rng, &mut means, &mut losses);
        observed.clear();
        observed.extend(action.indices().iter().map(|&i| (i, losses[i])));
        let played: f64 = action.indices().iter().map(|&i| means[i]).sum();
        regret += played - comparator.per_round_loss[t - 1];

        let start = Instant::now();
        let summary = policy.update(&action, &observed, &mut rng)?;
        spent += start.elapsed().as_nanos() as u64;

        let o = &summary.outcome;
        window_resamples += o.total_arm_resamples;
        window_ns += spent;
        out.total_resamples += o.total_arm_resamples;
        out.total_outer_iterations += o.outer_iterations;
        out.truncated_rounds += u64::from(o.truncated);
        out.elapsed_ns += spent;

        if t % cfg.checkpoint_every == 0 || t == cfg.horizon {
            out.records.push(RoundRecord {
                trial,
                t,
                cum_pseudo_regret: regret,
                resamples: window_resamples,
                elapsed_ns: window_ns,
            });
            window_resamples = 0;
            window_ns = 0;
        }
    }
    Ok(out)
}

/// Runs every trial on a dedicated pool; the output is ordered by trial
/// index regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentResult, HarnessError> {
    let cfg = validate_config(cfg.clone())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Pool(e.to_string()))?;

    let start = Instant::now();
    let outcomes: Vec<Result<TrialOutcome, HarnessError>> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|k| run_trial(&cfg, k)).collect());
    let wall_ns = start.elapsed().as_nanos() as u64;

    let mut trials = Vec::with_capacity(cfg.trials);
    let mut failures = Vec::new();
    for (k, res) in outcomes.into_iter().enumerate() {
        match res {
            Ok(t) => trials.push(t),
            Err(e) if opts.keep_going => failures.push((k, e.to_string())),
            Err(e) => return Err(HarnessError::Trial { trial: k, source: Box::new(e) }),
        }
    }
    Ok(ExperimentResult { config: cfg, trials, failures, wall_ns })
}
