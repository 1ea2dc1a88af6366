//! Distributional checks of the resamplers against the quadrature oracle.

use ftpl_mset::estimator::Resampler;
use ftpl_mset::oracle::{phi_exact, PhiQuery, QuadSettings};
use ftpl_mset::{derive_trial_rng, ranks, Action, CumulativeLossState, Perturbation};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const L_HAT: [f64; 6] = [0.0, 0.3, 0.6, 0.9, 1.2, 1.5];

fn exact_w(lambda: &[f64], m: usize, dist: Perturbation) -> Vec<f64> {
    (0..lambda.len())
        .map(|i| phi_exact(&PhiQuery::new(lambda.to_vec(), i, m, dist), QuadSettings::default()).unwrap())
        .collect()
}

struct Moments {
    mean: f64,
    sd: f64,
}

fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Moments { mean, sd: var.sqrt() }
}

/// Pearson statistic for geometric(p) over support 1..=10 plus a tail bin,
/// merging sparse bins into the tail; returns (statistic, degrees of freedom).
fn geometric_chi_square(counts: &[u64], p: f64) -> (f64, usize) {
    let n = counts.len() as f64;
    let mut observed = [0f64; 11];
    for &c in counts {
        observed[(c.min(11) - 1) as usize] += 1.0;
    }
    let mut expected = [0f64; 11];
    for k in 1..=10 {
        expected[k - 1] = n * (1.0 - p).powi(k as i32 - 1) * p;
    }
    expected[10] = n * (1.0 - p).powi(10);
    // Fold bins with expected count < 5 into the tail.
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut tail_o, mut tail_e) = (observed[10], expected[10]);
    for k in 0..10 {
        if expected[k] >= 5.0 {
            bins.push((observed[k], expected[k]));
        } else {
            tail_o += observed[k];
            tail_e += expected[k];
        }
    }
    if tail_e > 0.0 {
        bins.push((tail_o, tail_e));
    }
    let stat = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    (stat, bins.len() - 1)
}

#[test]
fn resample_counts_are_geometric() {
    let dist = Perturbation::frechet(2.0).unwrap();
    let w = exact_w(&L_HAT, 2, dist);
    let state = CumulativeLossState::from_losses(L_HAT.to_vec(), 1).unwrap();
    let sigma = ranks(&L_HAT);
    let mut rs = Resampler::new(6);
    let mut rng = derive_trial_rng(100, 0);
    let n = 50_000;
    let action = Action::new(vec![3, 5], 2, 6).unwrap();
    let mut gr = vec![Vec::new(); 2];
    let mut cgr = vec![Vec::new(); 2];
    for _ in 0..n {
        let a = rs.gr(&action, &state, 1.0, &dist, &mut rng, None).unwrap();
        let b = rs.cgr(&action, &state, &sigma, 1.0, &dist, &mut rng, None).unwrap();
        for k in 0..2 {
            gr[k].push(a.counts()[k]);
            cgr[k].push(b.counts()[k]);
        }
    }
    for (k, &arm) in [3usize, 5].iter().enumerate() {
        let p_cgr = (w[arm] * sigma.rank_of(arm) as f64 / 2.0).min(1.0);
        for (counts, p, label) in [(&gr[k], w[arm], "gr"), (&cgr[k], p_cgr, "cgr")] {
            let (stat, df) = geometric_chi_square(counts, p);
            let critical = ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999);
            assert!(stat < critical, "{label} arm {arm}: chi2={stat:.2} df={df} crit={critical:.2}");
        }
    }
}

#[test]
fn conditioned_test_succeeds_at_rank_scaled_rate() {
    // d = 4, m = 1: per-attempt success probability is w_i * sigma_i.
    let lambda = [0.0, 0.2, 0.5, 0.9];
    for dist in [Perturbation::frechet(2.0).unwrap(), Perturbation::pareto(2.0).unwrap()] {
        let w = exact_w(&lambda, 1, dist);
        let state = CumulativeLossState::from_losses(lambda.to_vec(), 1).unwrap();
        let sigma = ranks(&lambda);
        let mut rs = Resampler::new(4);
        let mut rng = derive_trial_rng(101, 0);
        for arm in [1usize, 2, 3] {
            let action = Action::new(vec![arm], 1, 4).unwrap();
            let n = 50_000;
            let counts: Vec<f64> = (0..n)
                .map(|_| rs.cgr(&action, &state, &sigma, 1.0, &dist, &mut rng, None).unwrap().counts()[0] as f64)
                .collect();
            let mo = moments(&counts);
            let p_hat = 1.0 / mo.mean;
            let se = mo.sd / (n as f64).sqrt() / (mo.mean * mo.mean);
            let want = w[arm] * sigma.rank_of(arm) as f64;
            assert!((p_hat - want).abs() < 3.0 * se, "arm {arm}: {p_hat} vs {want} (se {se})");
        }
    }
}

#[test]
fn both_estimators_unbiased_under_pareto() {
    let dist = Perturbation::pareto(2.0).unwrap();
    let lambda = [0.0, 0.5, 0.5, 1.0, 2.0];
    let w = exact_w(&lambda, 2, dist);
    let state = CumulativeLossState::from_losses(lambda.to_vec(), 1).unwrap();
    let sigma = ranks(&lambda);
    let mut rs = Resampler::new(5);
    let mut rng = derive_trial_rng(102, 0);
    let n = 40_000;
    for pair in [[0usize, 4], [1, 3], [2, 4]] {
        let action = Action::new(pair.to_vec(), 2, 5).unwrap();
        let mut gr = vec![Vec::new(); 2];
        let mut cgr = vec![Vec::new(); 2];
        for _ in 0..n {
            let a = rs.gr(&action, &state, 1.0, &dist, &mut rng, None).unwrap();
            let b = rs.cgr(&action, &state, &sigma, 1.0, &dist, &mut rng, None).unwrap();
            for (k, &arm) in pair.iter().enumerate() {
                gr[k].push(a.inv_weight(arm).unwrap());
                cgr[k].push(b.inv_weight(arm).unwrap());
            }
        }
        for (k, &arm) in pair.iter().enumerate() {
            for xs in [&gr[k], &cgr[k]] {
                let mo = moments(xs);
                let se = mo.sd / (n as f64).sqrt();
                assert!((mo.mean - 1.0 / w[arm]).abs() < 3.0 * se, "arm {arm}: {} vs {}", mo.mean, 1.0 / w[arm]);
            }
        }
    }
}

#[test]
fn frechet_inverse_weights_and_variance_ordering() {
    let dist = Perturbation::frechet(2.0).unwrap();
    let w = exact_w(&L_HAT, 2, dist);
    let state = CumulativeLossState::from_losses(L_HAT.to_vec(), 1).unwrap();
    let sigma = ranks(&L_HAT);
    let mut rs = Resampler::new(6);
    let mut rng = derive_trial_rng(103, 0);
    let n = 60_000;
    for pair in [[0usize, 1], [2, 3], [4, 5]] {
        let action = Action::new(pair.to_vec(), 2, 6).unwrap();
        let mut gr = vec![Vec::new(); 2];
        let mut cgr = vec![Vec::new(); 2];
        for _ in 0..n {
            let a = rs.gr(&action, &state, 1.0, &dist, &mut rng, None).unwrap();
            let b = rs.cgr(&action, &state, &sigma, 1.0, &dist, &mut rng, None).unwrap();
            for (k, &arm) in pair.iter().enumerate() {
                gr[k].push(a.inv_weight(arm).unwrap());
                cgr[k].push(b.inv_weight(arm).unwrap());
            }
        }
        for (k, &arm) in pair.iter().enumerate() {
            let (g, c) = (moments(&gr[k]), moments(&cgr[k]));
            let target = 1.0 / w[arm];
            for mo in [&g, &c] {
                assert!((mo.mean - target).abs() < 3.0 * mo.sd / (n as f64).sqrt(), "arm {arm}: {} vs {target}", mo.mean);
            }
            // Var[M] = (1 - w)/w^2 against Var[C M] = 1/w^2 - C/w.
            let scale = (sigma.rank_of(arm) as f64 / 2.0).max(1.0);
            let var_gr = (1.0 - w[arm]) / (w[arm] * w[arm]);
            let var_cgr = 1.0 / (w[arm] * w[arm]) - scale / w[arm];
            assert!((g.sd.powi(2) / var_gr - 1.0).abs() < 0.1, "arm {arm}: gr var {}", g.sd.powi(2));
            assert!((c.sd.powi(2) / var_cgr.max(1e-12) - 1.0).abs() < 0.1 || var_cgr < 1e-9, "arm {arm}: cgr var {}", c.sd.powi(2));
            assert!(c.sd <= g.sd * 1.02);
        }
    }
}
