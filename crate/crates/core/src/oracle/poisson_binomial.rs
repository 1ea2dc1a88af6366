//! Lower tail of a Poisson-binomial count.

/// `P[#successes < k]` for independent trials with success probabilities
/// `probs`, by an `O(n k)` recursion over the running count truncated at `k`.
pub fn prob_fewer_than(probs: impl IntoIterator<Item = f64>, k: usize, scratch: &mut Vec<f64>) -> f64 {
    if k == 0 {
        return 0.0;
    }
    scratch.clear();
    scratch.resize(k, 0.0);
    scratch[0] = 1.0;
    for p in probs {
        let p = p.clamp(0.0, 1.0);
        let q = 1.0 - p;
        for c in (1..k).rev() {
            scratch[c] = (scratch[c] * q + scratch[c - 1] * p).clamp(0.0, 1.0);
        }
        scratch[0] *= q;
    }
    scratch.iter().sum::<f64>().clamp(0.0, 1.0)
}
