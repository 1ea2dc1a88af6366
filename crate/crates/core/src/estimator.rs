//! Inverse-weight estimation by geometric resampling.
//!
//! For each selected arm `i`, GR redraws fresh perturbations until `i` is
//! selected again; the number of draws `M_i` is geometric with success
//! probability `w_i`, so `E[M_i] = 1 / w_i`.
//!
//! CGR draws, for every selected arm with rank `sigma_i > m`, from the
//! perturbation law conditioned on `r_i` being among the `m` largest entries
//! of the rank prefix `{j : sigma_j <= sigma_i}`. That event has probability
//! `m / sigma_i` and is necessary for selection, so `M_i` is geometric with
//! success probability `w_i * sigma_i / m` and `(sigma_i / m) * M_i` is
//! unbiased for `1 / w_i`. The conditional draw is realised by swapping `r_i`
//! with the `theta`-th largest prefix entry for `theta` uniform on `1..=m`.
//!
//! Per outer iteration the stream supplies `d` uniforms for the fresh
//! perturbation and then, for CGR only, one draw of `theta`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::perturbation::Perturbation;
use crate::selection::{in_top_m, theta_largest, RankVector, TopMSelector};
use crate::types::{Action, CumulativeLossState};

/// Inverse-weight estimates for the arms of one action plus effort counters.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampleOutcome {
    arms: Vec<usize>,
    counts: Vec<u64>,
    scales: Vec<f64>,
    /// Fresh perturbation vectors drawn, i.e. `max_i M_i` when untruncated.
    pub outer_iterations: u64,
    /// `sum_i M_i` over the selected arms.
    pub total_arm_resamples: u64,
    /// Swap-and-test evaluations performed for conditioned arms (CGR only).
    pub conditioned_tests: u64,
    /// The resample cap stopped the loop before every arm succeeded.
    pub truncated: bool,
}

impl ResampleOutcome {
    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    /// Raw resample counts `M_i`, aligned with [`arms`](Self::arms).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Scale factors `C_i` (all ones for GR).
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// `C_i * M_i` for a selected arm.
    pub fn inv_weight(&self, arm: usize) -> Option<f64> {
        self.arms
            .iter()
            .position(|&a| a == arm)
            .map(|k| self.scales[k] * self.counts[k] as f64)
    }

    /// `(arm, C_i * M_i)` pairs in ascending arm order.
    pub fn inv_weights(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.arms
            .iter()
            .zip(self.counts.iter().zip(&self.scales))
            .map(|(&a, (&c, &s))| (a, s * c as f64))
    }
}

/// Scratch buffers shared by both estimators, sized for one `d`.
#[derive(Debug, Clone)]
pub struct Resampler {
    scaled: Vec<f64>,
    perturb: Vec<f64>,
    scores: Vec<f64>,
    selector: TopMSelector,
    prefix: Vec<usize>,
    active: Vec<bool>,
    conditioned: Vec<bool>,
    hits: Vec<bool>,
}

impl Resampler {
    pub fn new(d: usize) -> Self {
        Self {
            scaled: vec![0.0; d],
            perturb: vec![0.0; d],
            scores: vec![0.0; d],
            selector: TopMSelector::with_capacity(d),
            prefix: Vec::with_capacity(d),
            active: Vec::new(),
            conditioned: Vec::new(),
            hits: Vec::new(),
        }
    }

    fn prepare(&mut self, action: &Action, l_hat: &[f64], eta: f64) -> Result<()> {
        let d = l_hat.len();
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidQuery(format!("learning rate must be positive, got {eta}")));
        }
        if action.is_empty() || action.len() > d || action.indices().iter().any(|&i| i >= d) {
            return Err(Error::InvalidAction(format!("action {:?} does not fit d={d}", action.indices())));
        }
        for buf in [&mut self.scaled, &mut self.perturb, &mut self.scores] {
            buf.resize(d, 0.0);
        }
        for (s, &l) in self.scaled.iter_mut().zip(l_hat) {
            *s = eta * l;
        }
        let m = action.len();
        self.active.clear();
        self.active.resize(m, true);
        self.hits.clear();
        self.hits.resize(m, false);
        Ok(())
    }

    /// Draws `r'` and refreshes `scores = eta * L_hat - r'` and the top-m partition.
    fn fresh_round<R: Rng + ?Sized>(&mut self, dist: &Perturbation, m: usize, rng: &mut R) {
        dist.sample_into(rng, &mut self.perturb);
        for ((s, &base), &r) in self.scores.iter_mut().zip(&self.scaled).zip(&self.perturb) {
            *s = base - r;
        }
        self.selector.select(&self.scores, m);
    }

    /// Geometric resampling for every arm of `action`.
    pub fn gr<R: Rng + ?Sized>(
        &mut self,
        action: &Action,
        state: &CumulativeLossState,
        eta: f64,
        dist: &Perturbation,
        rng: &mut R,
        cap: Option<u64>,
    ) -> Result<ResampleOutcome> {
        let l_hat = state.l_hat();
        self.prepare(action, l_hat, eta)?;
        let arms = action.indices();
        let m = arms.len();
        let mut counts = vec![0u64; m];
        let mut remaining = m;
        let mut outer = 0u64;
        let mut truncated = false;

        loop {
            for (c, &on) in counts.iter_mut().zip(&self.active) {
                *c += on as u64;
            }
            outer += 1;
            self.fresh_round(dist, m, rng);
            for (k, &arm) in arms.iter().enumerate() {
                if self.active[k] && self.selector.contains(&self.scores, arm) {
                    self.active[k] = false;
                    remaining -= 1;
                }
            }
            if remaining == 0 {
                break;
            }
            if cap.is_some_and(|c| outer >= c) {
                truncated = true;
                break;
            }
        }

        Ok(ResampleOutcome {
            arms: arms.to_vec(),
            total_arm_resamples: counts.iter().sum(),
            counts,
            scales: vec![1.0; m],
            outer_iterations: outer,
            conditioned_tests: 0,
            truncated,
        })
    }

    /// Conditional geometric resampling. `sigma` must be `ranks(state.l_hat())`.
    #[allow(clippy::too_many_arguments)]
    pub fn cgr<R: Rng + ?Sized>(
        &mut self,
        action: &Action,
        state: &CumulativeLossState,
        sigma: &RankVector,
        eta: f64,
        dist: &Perturbation,
        rng: &mut R,
        cap: Option<u64>,
    ) -> Result<ResampleOutcome> {
        let l_hat = state.l_hat();
        if sigma.len() != l_hat.len() {
            return Err(Error::InvalidQuery("rank vector length differs from d".into()));
        }
        debug_assert_eq!(sigma, &crate::selection::ranks(l_hat));
        self.prepare(action, l_hat, eta)?;
        let arms = action.indices();
        let m = arms.len();

        self.conditioned.clear();
        self.conditioned.extend(arms.iter().map(|&a| sigma.rank_of(a) > m));
        let scales: Vec<f64> = arms
            .iter()
            .map(|&a| (sigma.rank_of(a) as f64 / m as f64).max(1.0))
            .collect();

        let mut counts = vec![0u64; m];
        let mut remaining = m;
        let mut outer = 0u64;
        let mut tests = 0u64;
        let mut truncated = false;

        loop {
            for (c, &on) in counts.iter_mut().zip(&self.active) {
                *c += on as u64;
            }
            outer += 1;
            self.fresh_round(dist, m, rng);
            let theta = rng.gen_range(1..=m);

            for (k, &arm) in arms.iter().enumerate() {
                if !self.active[k] {
                    continue;
                }
                if !self.conditioned[k] {
                    self.hits[k] = self.selector.contains(&self.scores, arm);
                    continue;
                }
                // Swap r_i with the theta-th largest of its rank prefix, test, restore.
                self.prefix.clear();
                self.prefix.extend_from_slice(&sigma.order()[..sigma.rank_of(arm)]);
                let partner = theta_largest(&self.perturb, &mut self.prefix, theta);
                let (si, sp) = (self.scores[arm], self.scores[partner]);
                self.scores[arm] = self.scaled[arm] - self.perturb[partner];
                self.scores[partner] = self.scaled[partner] - self.perturb[arm];
                let hit = in_top_m(&self.scores, arm, m);
                self.scores[arm] = si;
                self.scores[partner] = sp;
                tests += 1;
                self.hits[k] = hit;
                if hit {
                    self.conditioned[k] = false;
                }
            }

            for k in 0..m {
                if self.active[k] && self.hits[k] {
                    self.active[k] = false;
                    remaining -= 1;
                }
            }
            if remaining == 0 {
                break;
            }
            if cap.is_some_and(|c| outer >= c) {
                truncated = true;
                break;
            }
        }

        Ok(ResampleOutcome {
            arms: arms.to_vec(),
            total_arm_resamples: counts.iter().sum(),
            counts,
            scales,
            outer_iterations: outer,
            conditioned_tests: tests,
            truncated,
        })
    }
}

/// One-shot [`Resampler::gr`].
pub fn gr_estimate<R: Rng + ?Sized>(
    action: &Action,
    state: &CumulativeLossState,
    eta: f64,
    dist: &Perturbation,
    rng: &mut R,
    cap: Option<u64>,
) -> Result<ResampleOutcome> {
    Resampler::new(state.d()).gr(action, state, eta, dist, rng, cap)
}

/// One-shot [`Resampler::cgr`].
pub fn cgr_estimate<R: Rng + ?Sized>(
    action: &Action,
    state: &CumulativeLossState,
    sigma: &RankVector,
    eta: f64,
    dist: &Perturbation,
    rng: &mut R,
    cap: Option<u64>,
) -> Result<ResampleOutcome> {
    Resampler::new(state.d()).cgr(action, state, sigma, eta, dist, rng, cap)
}

/// Importance-weighted loss estimate `loss_i * w_hat_inv_i` on the selected
/// arms, as sparse `(arm, value)` pairs in ascending arm order.
///
/// `observed` must contain each arm of `action` exactly once.
pub fn loss_estimate(
    action: &Action,
    observed: &[(usize, f64)],
    weights: &ResampleOutcome,
) -> Result<Vec<(usize, f64)>> {
    if observed.len() != action.len() {
        return Err(Error::Observation(format!(
            "expected {} observations, got {}",
            action.len(),
            observed.len()
        )));
    }
    let mut seen = vec![false; action.len()];
    let mut out = vec![(0usize, 0.0f64); action.len()];
    for &(arm, loss) in observed {
        let slot = action
            .indices()
            .binary_search(&arm)
            .map_err(|_| Error::Observation(format!("arm {arm} was not selected")))?;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(Error::Observation(format!("arm {arm} observed twice")));
        }
        if !(0.0..=1.0).contains(&loss) {
            return Err(Error::Observation(format!("loss {loss} on arm {arm} outside [0, 1]")));
        }
        let w = weights
            .inv_weight(arm)
            .ok_or_else(|| Error::Observation(format!("no inverse weight for arm {arm}")))?;
        out[slot] = (arm, loss * w);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_trial_rng;
    use crate::selection::ranks;

    fn frechet2() -> Perturbation {
        Perturbation::frechet(2.0).unwrap()
    }

    fn outcome(arms: Vec<usize>, counts: Vec<u64>) -> ResampleOutcome {
        let m = arms.len();
        ResampleOutcome {
            arms,
            total_arm_resamples: counts.iter().sum(),
            counts,
            scales: vec![1.0; m],
            outer_iterations: 0,
            conditioned_tests: 0,
            truncated: false,
        }
    }

    #[test]
    fn scale_is_rank_over_m() {
        // sigma = 1..=6, arms 4 and 5 have sigma 5 and 6.
        let state = CumulativeLossState::from_losses(vec![0.0, 0.3, 0.6, 0.9, 1.2, 1.5], 1).unwrap();
        let sigma = ranks(state.l_hat());
        let action = Action::new(vec![4, 5], 2, 6).unwrap();
        let mut rng = derive_trial_rng(1, 0);
        let out = cgr_estimate(&action, &state, &sigma, 1.0, &frechet2(), &mut rng, None).unwrap();
        assert_eq!(out.scales(), &[2.5, 3.0]);
        assert!(out.conditioned_tests >= 2);
    }

    #[test]
    fn leading_arms_are_unconditioned() {
        let state = CumulativeLossState::from_losses(vec![0.0, 0.3, 0.6, 0.9, 1.2, 1.5], 1).unwrap();
        let sigma = ranks(state.l_hat());
        let action = Action::new(vec![0, 1], 2, 6).unwrap();
        // With no conditioned arm CGR consumes the stream like GR plus one theta per
        // iteration, so compare against a GR run replaying that consumption.
        let mut rng = derive_trial_rng(2, 0);
        let out = cgr_estimate(&action, &state, &sigma, 1.0, &frechet2(), &mut rng, None).unwrap();
        assert_eq!(out.scales(), &[1.0, 1.0]);
        assert_eq!(out.conditioned_tests, 0);

        let mut rng = derive_trial_rng(2, 0);
        let dist = frechet2();
        let mut counts = [0u64; 2];
        let mut active = [true; 2];
        while active.iter().any(|&a| a) {
            for k in 0..2 {
                counts[k] += active[k] as u64;
            }
            let r = dist.sample_vector(6, &mut rng);
            let _theta: usize = rng.gen_range(1..=2);
            let scores: Vec<f64> = state.l_hat().iter().zip(&r).map(|(l, r)| l - r).collect();
            let chosen = crate::selection::top_m_argmin(&scores, 2);
            for (k, &arm) in [0usize, 1].iter().enumerate() {
                if chosen.contains(arm) {
                    active[k] = false;
                }
            }
        }
        assert_eq!(out.counts(), &counts);
    }

    #[test]
    fn every_count_is_positive() {
        let mut rng = derive_trial_rng(3, 0);
        let dist = Perturbation::pareto(1.5).unwrap();
        let state = CumulativeLossState::from_losses(vec![0.0, 2.0, 0.5, 3.0, 1.0], 1).unwrap();
        let sigma = ranks(state.l_hat());
        let mut rs = Resampler::new(5);
        for trial in 0..200 {
            let action = Action::new(vec![trial % 5, (trial + 2) % 5], 2, 5).unwrap();
            let gr = rs.gr(&action, &state, 0.7, &dist, &mut rng, None).unwrap();
            let cgr = rs.cgr(&action, &state, &sigma, 0.7, &dist, &mut rng, None).unwrap();
            for out in [gr, cgr] {
                assert!(out.counts().iter().all(|&c| c >= 1));
                assert_eq!(out.outer_iterations, *out.counts().iter().max().unwrap());
                assert!(!out.truncated);
                assert!(out.inv_weights().all(|(_, w)| w >= 1.0 && w.is_finite()));
            }
        }
    }

    #[test]
    fn symmetric_pair_needs_two_draws_on_average() {
        let state = CumulativeLossState::new(2);
        let action = Action::new(vec![0], 1, 2).unwrap();
        let mut rs = Resampler::new(2);
        for dist in [frechet2(), Perturbation::pareto(2.0).unwrap()] {
            let mut rng = derive_trial_rng(4, 0);
            let n = 100_000;
            let xs: Vec<f64> = (0..n)
                .map(|_| rs.gr(&action, &state, 1.0, &dist, &mut rng, None).unwrap().counts()[0] as f64)
                .collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
            assert!((mean - 2.0).abs() < 3.0 * sd / (n as f64).sqrt(), "mean {mean}");
        }
    }

    #[test]
    fn cap_truncates_and_flags() {
        // Arm 1 is hopeless, so only the cap stops the loop.
        let state = CumulativeLossState::from_losses(vec![0.0, 1e9, 0.0], 1).unwrap();
        let sigma = ranks(state.l_hat());
        let action = Action::new(vec![1], 1, 3).unwrap();
        let mut rng = derive_trial_rng(5, 0);
        let gr = gr_estimate(&action, &state, 1.0, &frechet2(), &mut rng, Some(50)).unwrap();
        assert!(gr.truncated);
        assert_eq!(gr.counts(), &[50]);
        let cgr = cgr_estimate(&action, &state, &sigma, 1.0, &frechet2(), &mut rng, Some(7)).unwrap();
        assert!(cgr.truncated);
        assert_eq!(cgr.counts(), &[7]);
        assert_eq!(cgr.inv_weight(1), Some(21.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let state = CumulativeLossState::new(3);
        let action = Action::new(vec![0], 1, 3).unwrap();
        let mut rng = derive_trial_rng(6, 0);
        assert!(gr_estimate(&action, &state, 0.0, &frechet2(), &mut rng, None).is_err());
        let wide = Action::new(vec![3], 1, 4).unwrap();
        assert!(gr_estimate(&wide, &state, 1.0, &frechet2(), &mut rng, None).is_err());
        let short_sigma = ranks(&[0.0, 0.0]);
        assert!(cgr_estimate(&action, &state, &short_sigma, 1.0, &frechet2(), &mut rng, None).is_err());
    }

    #[test]
    fn loss_estimate_products() {
        let a = Action::new(vec![2], 1, 4).unwrap();
        let est = loss_estimate(&a, &[(2, 0.5)], &outcome(vec![2], vec![4])).unwrap();
        assert_eq!(est, vec![(2, 2.0)]);

        let a = Action::new(vec![0, 3], 2, 4).unwrap();
        let w = outcome(vec![0, 3], vec![3, 7]);
        assert_eq!(loss_estimate(&a, &[(3, 1.0), (0, 1.0)], &w).unwrap(), vec![(0, 3.0), (3, 7.0)]);
        assert_eq!(loss_estimate(&a, &[(0, 0.0), (3, 0.0)], &w).unwrap(), vec![(0, 0.0), (3, 0.0)]);
    }

    #[test]
    fn loss_estimate_checks_keys() {
        let a = Action::new(vec![0, 3], 2, 4).unwrap();
        let w = outcome(vec![0, 3], vec![3, 7]);
        assert!(matches!(loss_estimate(&a, &[(0, 1.0)], &w), Err(Error::Observation(_))));
        assert!(loss_estimate(&a, &[(0, 1.0), (1, 1.0)], &w).is_err());
        assert!(loss_estimate(&a, &[(0, 1.0), (0, 1.0)], &w).is_err());
        assert!(loss_estimate(&a, &[(0, 1.0), (3, 1.0), (1, 0.0)], &w).is_err());
        assert!(loss_estimate(&a, &[(0, 1.5), (3, 1.0)], &w).is_err());
    }
}
