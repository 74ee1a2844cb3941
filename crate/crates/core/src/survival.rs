//! Elitist survival: truncate the population to its best fraction by total
//! error before parent selection runs.

use crate::individual::Population;
use crate::rank::{rank_with_rng, TiePolicy};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurvivalConfig {
    /// Percentage of the population kept, in (0, 100].
    pub rate: f64,
}

impl SurvivalConfig {
    pub fn new(rate: f64) -> Self {
        SurvivalConfig { rate }
    }

    pub fn validate(&self) -> Result<(), SurvivalError> {
        if self.rate.is_finite() && self.rate > 0.0 && self.rate <= 100.0 {
            Ok(())
        } else {
            Err(SurvivalError::BadRate(self.rate))
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SurvivalError {
    #[error("survival rate must be in (0, 100], got {0}")]
    BadRate(f64),
}

/// Number kept for `rate` percent of `population_size`: round half up,
/// clamped to [1, population_size].
pub fn surviving_count(rate: f64, population_size: usize) -> usize {
    let exact = rate / 100.0 * population_size as f64;
    let rounded = (exact + 0.5).floor() as usize;
    rounded.clamp(1, population_size)
}

/// Indices of the survivors, in original population order.
///
/// Survivors are the `surviving_count` best by total error; ties straddling
/// the cutoff are admitted by a seeded random draw (random-shuffle ranking,
/// then ranks 1..=k). A rate of exactly 100 returns everyone and consumes no
/// randomness.
pub fn elitist_survive(pop: &Population, cfg: &SurvivalConfig, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = pop.len();
    assert!(n > 0, "cannot select survivors from an empty population");
    if cfg.rate == 100.0 {
        return (0..n).collect();
    }
    let k = surviving_count(cfg.rate, n);
    let totals = pop.totals();
    let table = rank_with_rng(&totals, TiePolicy::RandomShuffleTies, rng);
    let mut keep = vec![false; n];
    for &idx in &table.order[..k] {
        keep[idx] = true;
    }
    (0..n).filter(|&i| keep[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::individual::{ErrorVector, Individual, Population};
    use crate::problems::Genome;
    use rand::SeedableRng;

    fn pop_from(totals: &[f64]) -> Population {
        Population(
            totals
                .iter()
                .map(|&t| Individual {
                    genome: Genome::placeholder(),
                    errors: ErrorVector(vec![t]),
                    behavior: vec![],
                })
                .collect(),
        )
    }

    #[test]
    fn count_rounds_half_up_and_clamps() {
        assert_eq!(surviving_count(10.0, 1000), 100);
        assert_eq!(surviving_count(25.0, 10), 3); // 2.5 -> 3
        assert_eq!(surviving_count(35.0, 10), 4); // 3.5 -> 4
        assert_eq!(surviving_count(34.0, 10), 3); // 3.4 -> 3
        assert_eq!(surviving_count(0.1, 10), 1); // floor would be 0
        assert_eq!(surviving_count(100.0, 7), 7);
        assert_eq!(surviving_count(99.9, 3), 3);
    }

    #[test]
    fn rate_100_is_identity_and_leaves_rng_untouched() {
        let pop = pop_from(&[5.0, 1.0, 3.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let before = rng.clone();
        let survivors = elitist_survive(&pop, &SurvivalConfig::new(100.0), &mut rng);
        assert_eq!(survivors, vec![0, 1, 2]);
        assert_eq!(rng, before);
    }

    #[test]
    fn survivors_keep_original_order_and_beat_everyone_removed() {
        let pop = pop_from(&[9.0, 2.0, 7.0, 1.0, 5.0, 3.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let survivors = elitist_survive(&pop, &SurvivalConfig::new(50.0), &mut rng);
        assert_eq!(survivors, vec![1, 3, 5]);
        let mut sorted = survivors.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, survivors, "original order preserved");
    }

    #[test]
    fn cutoff_ties_admit_a_random_subset() {
        // Totals: one clear best, four tied at the cutoff, keep 3.
        let pop = pop_from(&[0.0, 4.0, 4.0, 4.0, 4.0]);
        let cfg = SurvivalConfig::new(60.0); // 3 of 5
        let mut tied_seen = std::collections::HashSet::new();
        for seed in 0..64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let survivors = elitist_survive(&pop, &cfg, &mut rng);
            assert_eq!(survivors.len(), 3);
            assert!(survivors.contains(&0), "strictly best always survives");
            for &s in &survivors {
                if s != 0 {
                    tied_seen.insert(s);
                }
            }
        }
        assert_eq!(
            tied_seen.len(),
            4,
            "every tied member survives under some seed"
        );
    }

    #[test]
    fn validation_bounds_rate() {
        assert!(SurvivalConfig::new(0.0).validate().is_err());
        assert!(SurvivalConfig::new(-5.0).validate().is_err());
        assert!(SurvivalConfig::new(100.1).validate().is_err());
        assert!(SurvivalConfig::new(f64::NAN).validate().is_err());
        assert!(SurvivalConfig::new(10.0).validate().is_ok());
        assert!(SurvivalConfig::new(100.0).validate().is_ok());
    }
}
