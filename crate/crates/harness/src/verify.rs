//! Oracle property suite behind `--verify`.

use std::fmt;

use ftpl_mset::estimator::Resampler;
use ftpl_mset::oracle::{
    check_decomposition, phi_exact, phi_mc, topm_bound, topm_expectation_bound, topm_expectation_exact, PhiQuery,
    QuadSettings,
};
use ftpl_mset::{derive_trial_rng, ranks, Action, CumulativeLossState, DistKind, Perturbation, RngStream};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<28} {}", self.name, self.detail)
    }
}

/// Sample sizes of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSize {
    pub random_configs: usize,
    pub phi_samples: usize,
    pub decomposition_samples: usize,
    pub topm_samples: usize,
    pub resample_episodes: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        Self {
            random_configs: 20,
            phi_samples: 200_000,
            decomposition_samples: 1_000_000,
            topm_samples: 1_000_000,
            resample_episodes: 50_000,
        }
    }
}

/// A random oracle query: `d` in 2..=12, shifts in [0, 3), shape in [1.3, 4).
#[derive(Debug, Clone)]
pub struct RandomConfig {
    pub lambda: Vec<f64>,
    pub m: usize,
    pub dist: Perturbation,
}

pub fn random_configs(n: usize, seed: u64) -> Vec<RandomConfig> {
    let mut rng = derive_trial_rng(seed, 0);
    (0..n)
        .map(|_| {
            let d = rng.gen_range(2..=12);
            let m = rng.gen_range(1..d);
            let alpha = rng.gen_range(1.3..4.0);
            let kind = if rng.gen_bool(0.5) { DistKind::Frechet } else { DistKind::Pareto };
            let lambda = (0..d).map(|_| rng.gen_range(0.0..3.0)).collect();
            RandomConfig { lambda, m, dist: Perturbation::new(kind, alpha).expect("alpha > 1") }
        })
        .collect()
}

fn weights(lambda: &[f64], m: usize, dist: Perturbation) -> Vec<f64> {
    (0..lambda.len())
        .map(|i| phi_exact(&PhiQuery::new(lambda.to_vec(), i, m, dist), QuadSettings::default()).expect("valid query"))
        .collect()
}

/// `sum_i phi_i = m` on every config.
pub fn check_normalization(configs: &[RandomConfig]) -> CheckResult {
    let worst = configs
        .iter()
        .map(|c| (weights(&c.lambda, c.m, c.dist).iter().sum::<f64>() - c.m as f64).abs())
        .fold(0.0, f64::max);
    CheckResult {
        name: "phi normalization".into(),
        passed: worst < 1e-6,
        detail: format!("max |sum phi - m| = {worst:.2e} over {} configs (tol 1e-6)", configs.len()),
    }
}

/// Quadrature against counting for one random arm per config, at 3 SE.
pub fn check_phi_mc(configs: &[RandomConfig], n: usize, rng: &mut RngStream) -> CheckResult {
    let mut worst = 0.0f64;
    for c in configs {
        let arm = rng.gen_range(0..c.lambda.len());
        let q = PhiQuery::new(c.lambda.clone(), arm, c.m, c.dist);
        let exact = phi_exact(&q, QuadSettings::default()).expect("valid query");
        let (p, _) = phi_mc(&q, n, rng).expect("valid query");
        // SE at the exact value, so that near-certain events still get a scale.
        let se = (exact * (1.0 - exact) / n as f64).sqrt().max(1.0 / n as f64);
        worst = worst.max((p - exact).abs() / se);
    }
    CheckResult {
        name: "phi exact vs monte carlo".into(),
        passed: worst < 3.0,
        detail: format!("max |z| = {worst:.2} (tol 3)"),
    }
}

/// Independent-sample residual of the one-rival decomposition, at 3 SE.
pub fn check_decomposition_suite(n: usize, rng: &mut RngStream) -> CheckResult {
    // (lambda, i, j, m_tilde, law, alpha)
    type Case = (&'static [f64], usize, usize, usize, DistKind, f64);
    let cases: [Case; 4] = [
        (&[0.0, 0.4, 0.8, 1.2, 1.6], 2, 4, 2, DistKind::Frechet, 2.0),
        (&[0.3, 0.0, 1.0, 0.5, 2.0, 0.1], 0, 1, 3, DistKind::Pareto, 1.5),
        (&[0.0, 0.0, 0.0, 0.0], 3, 0, 1, DistKind::Frechet, 3.0),
        (&[1.0, 0.2, 0.7, 0.0, 0.9], 4, 3, 2, DistKind::Pareto, 2.5),
    ];
    let mut worst = 0.0f64;
    let mut paired = 0.0f64;
    for (lambda, i, j, m, kind, alpha) in cases {
        let dist = Perturbation::new(kind, alpha).expect("alpha > 1");
        let subset: Vec<usize> = (0..lambda.len()).collect();
        let rep = check_decomposition(lambda, i, j, m, &subset, dist, n, rng).expect("valid query");
        worst = worst.max(rep.independent_residual.abs() / rep.independent_se.max(1.0 / n as f64));
        paired = paired.max(rep.paired_max_abs_residual);
    }
    CheckResult {
        name: "rank decomposition".into(),
        passed: worst < 3.0 && paired == 0.0,
        detail: format!("max |z| = {worst:.2} (tol 3), paired residual {paired}"),
    }
}

/// The closed-form bound dominates the sampled top-m sum on the grid
/// `{1.5, 2, 3} x {4, 16} x {1, 2, 4}` for both laws.
pub fn check_topm_bounds(n: usize, rng: &mut RngStream) -> CheckResult {
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for kind in [DistKind::Frechet, DistKind::Pareto] {
        for alpha in [1.5, 2.0, 3.0] {
            let dist = Perturbation::new(kind, alpha).expect("alpha > 1");
            for d in [4, 16] {
                for m in [1, 2, 4] {
                    let b = topm_expectation_bound(&dist, d, m, n, rng).expect("valid query");
                    tightest = tightest.min(b.bound - b.mc_estimate);
                    if b.mc_estimate > b.bound {
                        failures.push(format!("{kind} a={alpha} d={d} m={m}: {:.4} > {:.4}", b.mc_estimate, b.bound));
                    }
                }
            }
        }
    }
    CheckResult {
        name: "top-m expectation bound".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("36 cells hold, smallest margin {tightest:.4}")
        } else {
            failures.join("; ")
        },
    }
}

/// The bound against the quadrature value of the same expectation on the grid
/// of [`check_topm_bounds`].
pub fn check_topm_exact() -> CheckResult {
    let mut tightest = f64::INFINITY;
    for kind in [DistKind::Frechet, DistKind::Pareto] {
        for alpha in [1.5, 2.0, 3.0] {
            let dist = Perturbation::new(kind, alpha).expect("alpha > 1");
            for d in [4, 16] {
                for m in [1, 2, 4] {
                    let exact = topm_expectation_exact(&dist, d, m, QuadSettings::default()).expect("valid query");
                    tightest = tightest.min(topm_bound(&dist, d, m) - exact);
                }
            }
        }
    }
    CheckResult {
        name: "top-m bound vs quadrature".into(),
        passed: tightest > 0.0,
        detail: format!("smallest margin {tightest:.4} over 36 cells"),
    }
}

/// Inverse-weight means of both resamplers at 3 SE, on a fixed six-arm state.
pub fn check_resamplers(episodes: usize, rng: &mut RngStream) -> CheckResult {
    let l_hat = [0.0, 0.3, 0.6, 0.9, 1.2, 1.5];
    let dist = Perturbation::frechet(2.0).expect("alpha > 1");
    let w = weights(&l_hat, 2, dist);
    let state = CumulativeLossState::from_losses(l_hat.to_vec(), 1).expect("finite losses");
    let sigma = ranks(&l_hat);
    let mut rs = Resampler::new(6);
    let mut worst = 0.0f64;
    for pair in [[0usize, 1], [2, 3], [4, 5]] {
        let action = Action::new(pair.to_vec(), 2, 6).expect("valid action");
        let mut acc = [[(0.0f64, 0.0f64); 2]; 2];
        for _ in 0..episodes {
            let g = rs.gr(&action, &state, 1.0, &dist, rng, None).expect("uncapped");
            let c = rs.cgr(&action, &state, &sigma, 1.0, &dist, rng, None).expect("uncapped");
            for (k, &arm) in pair.iter().enumerate() {
                for (slot, o) in acc[k].iter_mut().zip([&g, &c]) {
                    let x = o.inv_weight(arm).expect("selected arm");
                    slot.0 += x;
                    slot.1 += x * x;
                }
            }
        }
        let n = episodes as f64;
        for (k, &arm) in pair.iter().enumerate() {
            for (sum, sq) in acc[k] {
                let mean = sum / n;
                let se = ((sq / n - mean * mean) / n).sqrt();
                worst = worst.max((mean - 1.0 / w[arm]).abs() / se);
            }
        }
    }
    CheckResult {
        name: "resampler unbiasedness".into(),
        passed: worst < 3.0,
        detail: format!("max |z| = {worst:.2} over 12 arm/estimator pairs (tol 3)"),
    }
}

/// Runs every check with a fixed seed.
pub fn run_suite(size: SuiteSize, seed: u64) -> Vec<CheckResult> {
    let configs = random_configs(size.random_configs, seed);
    let mut rng = derive_trial_rng(seed, 1);
    vec![
        check_normalization(&configs),
        check_phi_mc(&configs, size.phi_samples, &mut rng),
        check_decomposition_suite(size.decomposition_samples, &mut rng),
        check_topm_bounds(size.topm_samples, &mut rng),
        check_topm_exact(),
        check_resamplers(size.resample_episodes, &mut rng),
    ]
}
