//! Ground truth for base-arm selection probabilities.
//!
//! `phi_i(lambda; m_tilde, B)` is the probability that `r_i - lambda_i` is
//! among the `m_tilde` largest of `{r_j - lambda_j : j in B}` for i.i.d.
//! perturbations `r`. With `lambda = eta * L_hat`, `m_tilde = m` and `B = [d]`
//! it is the FTPL selection probability `w_i`.
//!
//! [`phi_exact`] conditions on `r_i` and integrates a Poisson-binomial tail
//! over `u = F(r_i)` in `(0, 1)`; [`phi_mc`] counts directly. Neither shares
//! code with the top-m selection or the resamplers, so both can adjudicate
//! them.

mod poisson_binomial;
mod quadrature;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::Rng;
use statrs::function::gamma::gamma;

use crate::config::DistKind;
use crate::error::{Error, Result};
use crate::perturbation::Perturbation;

pub use poisson_binomial::prob_fewer_than;
pub use quadrature::{integrate, QuadSettings};

/// Largest `d` accepted by [`phi_exact`].
pub const MAX_ORACLE_DIM: usize = 64;

/// Arguments of `phi_i(lambda; dist, m_tilde, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiQuery {
    pub lambda: Vec<f64>,
    pub arm: usize,
    pub m_tilde: usize,
    pub dist: Perturbation,
    /// `None` means all of `0..d`.
    pub subset: Option<Vec<usize>>,
}

impl PhiQuery {
    pub fn new(lambda: Vec<f64>, arm: usize, m: usize, dist: Perturbation) -> Self {
        Self { lambda, arm, m_tilde: m, dist, subset: None }
    }

    pub fn with_subset(mut self, subset: Vec<usize>) -> Self {
        self.subset = Some(subset);
        self
    }

    pub fn with_m_tilde(mut self, m_tilde: usize) -> Self {
        self.m_tilde = m_tilde;
        self
    }

    /// Members of `B` other than `arm`. `m_tilde = 0` is accepted and denotes
    /// the empty event.
    fn rivals(&self) -> Result<Vec<usize>> {
        let d = self.lambda.len();
        if self.arm >= d {
            return Err(Error::InvalidQuery(format!("arm {} out of range for d={d}", self.arm)));
        }
        if self.lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidQuery("lambda must be finite".into()));
        }
        let members: Vec<usize> = match &self.subset {
            None => (0..d).collect(),
            Some(b) => {
                let mut b = b.clone();
                b.sort_unstable();
                b.dedup();
                if b.iter().any(|&j| j >= d) {
                    return Err(Error::InvalidQuery("subset index out of range".into()));
                }
                b
            }
        };
        if !members.contains(&self.arm) {
            return Err(Error::InvalidQuery(format!("arm {} is not in the subset", self.arm)));
        }
        if self.m_tilde > members.len() {
            return Err(Error::InvalidQuery(format!(
                "m_tilde={} exceeds |B|={}",
                self.m_tilde,
                members.len()
            )));
        }
        Ok(members.into_iter().filter(|&j| j != self.arm).collect())
    }
}

/// Exact `phi_i` by quadrature.
pub fn phi_exact(q: &PhiQuery, settings: QuadSettings) -> Result<f64> {
    if q.lambda.len() > MAX_ORACLE_DIM {
        return Err(Error::InvalidQuery(format!("oracle supports d <= {MAX_ORACLE_DIM}")));
    }
    let rivals = q.rivals()?;
    if q.m_tilde == 0 {
        return Ok(0.0);
    }
    if q.m_tilde > rivals.len() {
        return Ok(1.0);
    }
    let lam_i = q.lambda[q.arm];
    let shifts: Vec<f64> = rivals.iter().map(|&j| q.lambda[j] - lam_i).collect();
    let dist = q.dist;
    let scratch = std::cell::RefCell::new(Vec::with_capacity(q.m_tilde));
    let integrand = |u: f64| {
        // r_i = F^-1(u); rival j beats i iff r_j > r_i + lambda_j - lambda_i.
        let x = dist.inverse_cdf(u).unwrap_or(f64::INFINITY);
        let beat = shifts.iter().map(|&s| dist.sf(x + s));
        prob_fewer_than(beat, q.m_tilde, &mut scratch.borrow_mut())
    };
    let (value, _) = integrate(integrand, 0.0, 1.0, settings)?;
    Ok(value.clamp(0.0, 1.0))
}

/// Monte-Carlo estimate of `phi_i` with its binomial standard error.
pub fn phi_mc<R: Rng + ?Sized>(q: &PhiQuery, n: usize, rng: &mut R) -> Result<(f64, f64)> {
    phi_mc_cancellable(q, n, rng, None)
}

/// Cooperative cancellation flag for long Monte-Carlo loops.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

const CANCEL_POLL: usize = 4096;

pub fn phi_mc_cancellable<R: Rng + ?Sized>(
    q: &PhiQuery,
    n: usize,
    rng: &mut R,
    cancel: Option<&CancelToken>,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidQuery("need at least one sample".into()));
    }
    let rivals = q.rivals()?;
    let mut r = vec![0.0; q.lambda.len()];
    let mut hits = 0usize;
    for k in 0..n {
        if k % CANCEL_POLL == 0 && cancel.is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        q.dist.sample_into(rng, &mut r);
        if rank_in(&r, &q.lambda, q.arm, &rivals) <= q.m_tilde {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
}

/// Descending rank of `r_i - lambda_i` among `i` and `rivals`.
#[inline]
fn rank_in(r: &[f64], lambda: &[f64], i: usize, rivals: &[usize]) -> usize {
    let mine = r[i] - lambda[i];
    1 + rivals.iter().filter(|&&j| r[j] - lambda[j] > mine).count()
}

/// Outcome of [`check_decomposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    /// Largest per-sample `|1[A] - 1[B] - 1[C]|` on shared draws; always 0.
    pub paired_max_abs_residual: f64,
    pub paired_full: f64,
    pub paired_reduced: f64,
    pub paired_boundary: f64,
    /// Residual of three independently sampled estimates, and its SE.
    pub independent_residual: f64,
    pub independent_se: f64,
}

/// Checks `phi_i(m, B) = phi_i(m - 1, B \ {j}) + P[sigma_i(B) = m < sigma_j(B)]`
/// by Monte-Carlo, both on one shared sample and on three independent ones.
#[allow(clippy::too_many_arguments)]
pub fn check_decomposition<R: Rng + ?Sized>(
    lambda: &[f64],
    i: usize,
    j: usize,
    m_tilde: usize,
    subset: &[usize],
    dist: Perturbation,
    n: usize,
    rng: &mut R,
) -> Result<DecompositionReport> {
    if i == j {
        return Err(Error::InvalidQuery("i and j must differ".into()));
    }
    if !subset.contains(&j) {
        return Err(Error::InvalidQuery(format!("j={j} is not in the subset")));
    }
    if m_tilde == 0 || n == 0 {
        return Err(Error::InvalidQuery("need m_tilde >= 1 and n >= 1".into()));
    }
    let full_q = PhiQuery::new(lambda.to_vec(), i, m_tilde, dist).with_subset(subset.to_vec());
    let rivals = full_q.rivals()?;
    let reduced: Vec<usize> = rivals.iter().copied().filter(|&k| k != j).collect();

    let full_event = |r: &[f64]| rank_in(r, lambda, i, &rivals) <= m_tilde;
    let reduced_event = |r: &[f64]| rank_in(r, lambda, i, &reduced) < m_tilde;
    let boundary_event = |r: &[f64]| {
        rank_in(r, lambda, i, &rivals) == m_tilde && r[j] - lambda[j] < r[i] - lambda[i]
    };

    let mut r = vec![0.0; lambda.len()];
    let (mut a, mut b, mut c, mut worst) = (0usize, 0usize, 0usize, 0i32);
    for _ in 0..n {
        dist.sample_into(rng, &mut r);
        let (x, y, z) = (full_event(&r), reduced_event(&r), boundary_event(&r));
        a += x as usize;
        b += y as usize;
        c += z as usize;
        worst = worst.max((x as i32 - y as i32 - z as i32).abs());
    }
    let nf = n as f64;

    let mut freq = |event: &dyn Fn(&[f64]) -> bool| {
        let mut hits = 0usize;
        for _ in 0..n {
            dist.sample_into(rng, &mut r);
            hits += event(&r) as usize;
        }
        let p = hits as f64 / nf;
        (p, p * (1.0 - p) / nf)
    };
    let (pa, va) = freq(&full_event);
    let (pb, vb) = freq(&reduced_event);
    let (pc, vc) = freq(&boundary_event);

    Ok(DecompositionReport {
        paired_max_abs_residual: worst as f64,
        paired_full: a as f64 / nf,
        paired_reduced: b as f64 / nf,
        paired_boundary: c as f64 / nf,
        independent_residual: pa - pb - pc,
        independent_se: (va + vb + vc).sqrt(),
    })
}

/// Monte-Carlo estimate of `E[sum of the m largest of d draws]` next to its
/// closed-form upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopMBound {
    pub mc_estimate: f64,
    pub mc_se: f64,
    pub bound: f64,
}

/// `(alpha/(alpha-1) (m-1)^(1-1/alpha) + Gamma(1-1/alpha)) (d+1)^(1/alpha)`,
/// plus `m` for Fréchet.
pub fn topm_bound(dist: &Perturbation, d: usize, m: usize) -> f64 {
    let a = dist.alpha();
    let lead = a / (a - 1.0) * ((m - 1) as f64).powf(1.0 - 1.0 / a) + gamma(1.0 - 1.0 / a);
    let base = lead * ((d + 1) as f64).powf(1.0 / a);
    match dist.kind() {
        DistKind::Pareto => base,
        DistKind::Frechet => base + m as f64,
    }
}

pub fn topm_expectation_bound<R: Rng + ?Sized>(
    dist: &Perturbation,
    d: usize,
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<TopMBound> {
    if m == 0 || m > d || n == 0 {
        return Err(Error::InvalidQuery("need 1 <= m <= d and n >= 1".into()));
    }
    let mut r = vec![0.0; d];
    let (mut sum, mut sq) = (0.0f64, 0.0f64);
    for _ in 0..n {
        dist.sample_into(rng, &mut r);
        r.select_nth_unstable_by(m - 1, |x, y| y.total_cmp(x));
        let top: f64 = r[..m].iter().sum();
        sum += top;
        sq += top * top;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    Ok(TopMBound { mc_estimate: mean, mc_se: (var / nf).sqrt(), bound: topm_bound(dist, d, m) })
}

/// Exact `E[sum of the m largest of d draws]` by quadrature.
///
/// Summing the order-statistic densities gives
/// `E = d * int_0^1 Q(u) P[Bin(d - 1, 1 - u) < m] du`; the substitution
/// `1 - u = s^q` with `q = 2 alpha / (alpha - 1)` makes the integrand vanish
/// linearly at the heavy-tail end.
pub fn topm_expectation_exact(dist: &Perturbation, d: usize, m: usize, settings: QuadSettings) -> Result<f64> {
    if m == 0 || m > d {
        return Err(Error::InvalidQuery("need 1 <= m <= d".into()));
    }
    let a = dist.alpha();
    let q = 2.0 * a / (a - 1.0);
    let scratch = std::cell::RefCell::new(Vec::with_capacity(m));
    let integrand = |s: f64| {
        let tail = s.powf(q);
        // Q(1 - tail) = tail^(-1/alpha) * g with g <= 1.
        let g = match dist.kind() {
            DistKind::Pareto => 1.0,
            DistKind::Frechet if tail >= 1.0 => 0.0,
            DistKind::Frechet => (tail / -(-tail).ln_1p()).powf(1.0 / a),
        };
        let upper = prob_fewer_than(std::iter::repeat_n(tail, d - 1), m, &mut scratch.borrow_mut());
        d as f64 * q * s.powf(q - 1.0 - q / a) * g * upper
    };
    integrate(integrand, 0.0, 1.0, settings).map(|(v, _)| v)
}
