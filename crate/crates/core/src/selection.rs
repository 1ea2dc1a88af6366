//! Top-m selection and the rank statistic.
//!
//! Everything here orders arms by `(value, index)`: equal values are broken
//! by ascending base-arm index. `top_m_argmin` and `ranks` therefore agree,
//! which the conditional resampler relies on.

use std::cmp::Ordering;

use crate::types::Action;

#[inline]
fn ascending(values: &[f64], a: usize, b: usize) -> Ordering {
    values[a]
        .partial_cmp(&values[b])
        .unwrap_or(Ordering::Equal)
        .then(a.cmp(&b))
}

/// Indices of the `m` smallest entries of `scores`, i.e.
/// `argmin_{|a| = m} a . scores`. Expected `O(d)`.
pub fn top_m_argmin(scores: &[f64], m: usize) -> Action {
    let mut sel = TopMSelector::with_capacity(scores.len());
    sel.select(scores, m);
    Action::from_sorted_unchecked(sel.members(m))
}

/// Reusable buffers for repeated top-m selection on the resampling hot path.
#[derive(Debug, Clone, Default)]
pub struct TopMSelector {
    idx: Vec<usize>,
    threshold: usize,
}

impl TopMSelector {
    pub fn with_capacity(d: usize) -> Self {
        Self { idx: Vec::with_capacity(d), threshold: 0 }
    }

    /// Partitions so that the `m` smallest `(score, index)` pairs come first.
    pub fn select(&mut self, scores: &[f64], m: usize) {
        assert!(m >= 1 && m <= scores.len(), "need 1 <= m <= d");
        debug_assert!(scores.iter().all(|s| s.is_finite()));
        self.idx.clear();
        self.idx.extend(0..scores.len());
        let (_, &mut pivot, _) = self.idx.select_nth_unstable_by(m - 1, |&a, &b| ascending(scores, a, b));
        self.threshold = pivot;
    }

    /// Whether `arm` was among the `m` smallest in the last `select`.
    #[inline]
    pub fn contains(&self, scores: &[f64], arm: usize) -> bool {
        ascending(scores, arm, self.threshold) != Ordering::Greater
    }

    /// Sorted member list of the last `select`.
    pub fn members(&self, m: usize) -> Vec<usize> {
        let mut out = self.idx[..m].to_vec();
        out.sort_unstable();
        out
    }
}

/// Whether `arm` is among the `m` smallest of `scores`, by counting the arms
/// that precede it. `O(d)`, no reordering.
#[inline]
pub fn in_top_m(scores: &[f64], arm: usize, m: usize) -> bool {
    let mine = scores[arm];
    let mut ahead = 0usize;
    for (j, &s) in scores.iter().enumerate() {
        if s < mine || (s == mine && j < arm) {
            ahead += 1;
            if ahead >= m {
                return false;
            }
        }
    }
    true
}

/// Ascending ranks (1-based) of cumulative losses, ties by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector {
    sigma: Vec<usize>,
    order: Vec<usize>,
}

impl RankVector {
    /// `sigma[i]` in `1..=d`.
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn rank_of(&self, arm: usize) -> usize {
        self.sigma[arm]
    }

    /// Arms listed by increasing rank: `order()[k]` has rank `k + 1`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }
}

pub fn ranks(l_hat: &[f64]) -> RankVector {
    let mut order: Vec<usize> = (0..l_hat.len()).collect();
    order.sort_unstable_by(|&a, &b| ascending(l_hat, a, b));
    let mut sigma = vec![0; l_hat.len()];
    for (k, &arm) in order.iter().enumerate() {
        sigma[arm] = k + 1;
    }
    RankVector { sigma, order }
}

/// The `theta`-th largest (1-based) of `values[c]` over `candidates`, ties by
/// ascending index. `candidates` is reordered in place.
pub fn theta_largest(values: &[f64], candidates: &mut [usize], theta: usize) -> usize {
    assert!(theta >= 1 && theta <= candidates.len(), "theta out of range");
    let (_, &mut found, _) = candidates.select_nth_unstable_by(theta - 1, |&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute force: full stable sort by (value, index).
    fn sorted_oracle(scores: &[f64]) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        idx.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));
        idx
    }

    /// sigma[i] = #{j : v_j < v_i} + #{j <= i : v_j == v_i}.
    fn rank_by_counting(v: &[f64], i: usize) -> usize {
        let below = v.iter().filter(|&&x| x < v[i]).count();
        let tied = (0..=i).filter(|&j| v[j] == v[i]).count();
        below + tied
    }

    #[test]
    fn two_smallest() {
        assert_eq!(top_m_argmin(&[3.0, 1.0, 2.0, 0.0], 2).indices(), &[1, 3]);
    }

    #[test]
    fn ties_go_to_low_index() {
        assert_eq!(top_m_argmin(&[5.0, 5.0, 5.0], 2).indices(), &[0, 1]);
        assert_eq!(top_m_argmin(&[1.0, 0.0, 1.0, 0.0], 3).indices(), &[0, 1, 3]);
    }

    #[test]
    fn matches_sort_on_random_scores() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let scores: Vec<f64> = (0..50).map(|_| rng.gen::<f64>()).collect();
            let mut want = sorted_oracle(&scores)[..3].to_vec();
            want.sort_unstable();
            assert_eq!(top_m_argmin(&scores, 3).indices(), want.as_slice());
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(ranks(&[0.5, 0.2, 0.2, 0.9]).sigma(), &[3, 1, 2, 4]);
        assert_eq!(ranks(&[0.0; 5]).sigma(), &[1, 2, 3, 4, 5]);
        let r = ranks(&[0.5, 0.2, 0.2, 0.9]);
        assert_eq!(r.order(), &[1, 2, 0, 3]);
    }

    #[test]
    fn ranks_match_counting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            // Coarse grid so ties actually occur.
            let v: Vec<f64> = (0..100).map(|_| (rng.gen::<f64>() * 30.0).floor()).collect();
            let r = ranks(&v);
            for i in 0..v.len() {
                assert_eq!(r.rank_of(i), rank_by_counting(&v, i));
            }
            assert_eq!(r.sigma().iter().filter(|&&s| s == 1).count(), 1);
        }
    }

    #[test]
    fn theta_largest_picks_by_value_then_index() {
        let v = [0.1, 0.9, 0.5, 0.9, 0.3];
        assert_eq!(theta_largest(&v, &mut [0, 1, 2, 3, 4], 1), 1);
        assert_eq!(theta_largest(&v, &mut [0, 1, 2, 3, 4], 2), 3);
        assert_eq!(theta_largest(&v, &mut [0, 1, 2, 3, 4], 3), 2);
        assert_eq!(theta_largest(&v, &mut [0, 2, 4], 3), 0);
    }

    proptest! {
        #[test]
        fn top_m_agrees_with_ranks(
            scores in proptest::collection::vec(-8i32..8, 2..40),
            m_seed in any::<usize>(),
        ) {
            let scores: Vec<f64> = scores.into_iter().map(|s| s as f64 * 0.5).collect();
            let d = scores.len();
            let m = 1 + m_seed % d;
            let r = ranks(&scores);
            let want: Vec<usize> = (0..d).filter(|&i| r.rank_of(i) <= m).collect();
            let got = top_m_argmin(&scores, m);
            prop_assert_eq!(got.indices(), want.as_slice());
            for i in 0..d {
                prop_assert_eq!(in_top_m(&scores, i, m), r.rank_of(i) <= m);
            }
        }

        #[test]
        fn ranks_are_a_permutation(v in proptest::collection::vec(0.0f64..4.0, 1..60)) {
            let mut s = ranks(&v).sigma().to_vec();
            s.sort_unstable();
            prop_assert_eq!(s, (1..=v.len()).collect::<Vec<_>>());
        }

        #[test]
        fn selection_only_permutes(v in proptest::collection::vec(-5.0f64..5.0, 1..60), m_seed in any::<usize>()) {
            let m = 1 + m_seed % v.len();
            let mut sel = TopMSelector::with_capacity(v.len());
            sel.select(&v, m);
            let mut idx = sel.idx.clone();
            idx.sort_unstable();
            prop_assert_eq!(idx, (0..v.len()).collect::<Vec<_>>());
        }
    }
}
