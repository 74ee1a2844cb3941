//! Total-error ranking with explicit tie policies.
//!
//! Two policies cover the two uses of rank:
//!
//! * `RandomShuffleTies` drives decisions (elitist survival): every member
//!   gets a distinct rank 1..=n; ties are broken by a seeded shuffle so a
//!   cutoff through a tie group admits a random subset.
//! * `MinRankTies` drives reporting (selected-parent rank statistics): a tie
//!   group shares the smallest rank, 1 + the number of strictly better
//!   totals, so ranks are reproducible without randomness.

use crate::individual::ErrorVector;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    RandomShuffleTies,
    MinRankTies,
}

/// Ranks for one population snapshot. `ranks[i]` is the 1-based rank of
/// member `i`; `order` lists member indices by ascending rank (ties in
/// original order under `MinRankTies`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankTable {
    pub policy: TiePolicy,
    pub ranks: Vec<usize>,
    pub order: Vec<usize>,
}

impl RankTable {
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Smallest rank counted as bottom half: ranks strictly greater than
    /// ceil(n / 2) are bottom-half.
    pub fn bottom_half_threshold(&self) -> usize {
        self.len().div_ceil(2)
    }
}

/// Ranks `totals` ascending (rank 1 = lowest total error).
///
/// `rng` is consumed only under `RandomShuffleTies`; pass `None` for
/// `MinRankTies`. Totals must be non-NaN.
pub fn rank_by_total_error(
    totals: &[f64],
    policy: TiePolicy,
    mut rng: Option<&mut dyn rand::RngCore>,
) -> RankTable {
    let n = totals.len();
    let mut order: Vec<usize> = (0..n).collect();
    match policy {
        TiePolicy::RandomShuffleTies => {
            let rng = rng
                .as_deref_mut()
                .expect("random-shuffle ranking requires an rng");
            // Shuffle first, then stable-sort by total: equal totals end up
            // in shuffled order, everything else strictly by error.
            order.shuffle(rng);
            order.sort_by(|&a, &b| totals[a].total_cmp(&totals[b]));
            let mut ranks = vec![0; n];
            for (pos, &idx) in order.iter().enumerate() {
                ranks[idx] = pos + 1;
            }
            RankTable {
                policy,
                ranks,
                order,
            }
        }
        TiePolicy::MinRankTies => {
            order.sort_by(|&a, &b| totals[a].total_cmp(&totals[b]));
            let mut ranks = vec![0; n];
            let mut pos = 0;
            while pos < n {
                let mut end = pos + 1;
                while end < n && totals[order[end]] == totals[order[pos]] {
                    end += 1;
                }
                for &idx in &order[pos..end] {
                    ranks[idx] = pos + 1;
                }
                pos = end;
            }
            // Ties back in original index order for a deterministic listing.
            order.sort_by_key(|&i| (ranks[i], i));
            RankTable {
                policy,
                ranks,
                order,
            }
        }
    }
}

/// Convenience wrapper for callers holding a concrete rng.
pub fn rank_with_rng<R: Rng>(totals: &[f64], policy: TiePolicy, rng: &mut R) -> RankTable {
    rank_by_total_error(totals, policy, Some(rng))
}

/// Pareto domination on error vectors: `a` dominates `b` when it is no worse
/// on every case and strictly better on at least one. Vectors must be the
/// same length.
pub fn dominates(a: &ErrorVector, b: &ErrorVector) -> bool {
    assert_eq!(a.len(), b.len(), "error vectors of unequal length");
    let mut strictly_better = false;
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn min_rank_ties_share_smallest_rank() {
        // totals 3,1,1,2 -> ranks 4,1,1,3
        let t = rank_by_total_error(&[3.0, 1.0, 1.0, 2.0], TiePolicy::MinRankTies, None);
        assert_eq!(t.ranks, vec![4, 1, 1, 3]);
        assert_eq!(t.order, vec![1, 2, 3, 0]);
    }

    #[test]
    fn shuffle_ties_yield_distinct_consecutive_ranks() {
        let totals = vec![2.0, 1.0, 1.0, 1.0, 0.5];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = rank_with_rng(&totals, TiePolicy::RandomShuffleTies, &mut rng);
        let mut sorted = t.ranks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3, 4, 5]);
        assert_eq!(t.ranks[4], 1);
        assert_eq!(t.ranks[0], 5);
        // The tie group occupies ranks 2..=4 in shuffle order.
        let tie_ranks: Vec<usize> = vec![t.ranks[1], t.ranks[2], t.ranks[3]];
        let mut tr = tie_ranks.clone();
        tr.sort_unstable();
        assert_eq!(tr, vec![2, 3, 4]);
    }

    #[test]
    fn shuffle_tie_break_depends_on_seed() {
        let totals = vec![1.0; 6];
        let a = rank_with_rng(
            &totals,
            TiePolicy::RandomShuffleTies,
            &mut ChaCha8Rng::seed_from_u64(1),
        );
        let b = rank_with_rng(
            &totals,
            TiePolicy::RandomShuffleTies,
            &mut ChaCha8Rng::seed_from_u64(2),
        );
        let a2 = rank_with_rng(
            &totals,
            TiePolicy::RandomShuffleTies,
            &mut ChaCha8Rng::seed_from_u64(1),
        );
        assert_eq!(a.ranks, a2.ranks);
        assert_ne!(a.ranks, b.ranks, "distinct seeds should break ties differently");
    }

    #[test]
    fn bottom_half_threshold_rounds_up() {
        let t = rank_by_total_error(&[1.0, 2.0, 3.0, 4.0, 5.0], TiePolicy::MinRankTies, None);
        assert_eq!(t.bottom_half_threshold(), 3);
        let t = rank_by_total_error(&[1.0, 2.0, 3.0, 4.0], TiePolicy::MinRankTies, None);
        assert_eq!(t.bottom_half_threshold(), 2);
    }

    #[test]
    fn domination_requires_strict_improvement_somewhere() {
        let a = ErrorVector(vec![1.0, 2.0, 3.0]);
        let b = ErrorVector(vec![1.0, 2.0, 4.0]);
        let c = ErrorVector(vec![1.0, 2.0, 3.0]);
        assert!(dominates(&a, &b));
        assert!(!dominates(&b, &a));
        assert!(!dominates(&a, &c), "equal vectors do not dominate");
        assert!(!dominates(&a, &a));
    }

    #[test]
    fn specialists_are_undominated() {
        let generalist = ErrorVector(vec![7.0, 12.0, 8.5]);
        let specialist = ErrorVector(vec![103.0, 1_000_000.0, 0.01]);
        assert!(!dominates(&generalist, &specialist));
        assert!(!dominates(&specialist, &generalist));
    }
}
