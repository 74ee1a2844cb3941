//! Selection-pressure instrumentation: the tournament rank distribution,
//! behavioral diversity, and per-generation aggregates of selection events.

pub mod special;
pub mod stats;

use crate::individual::Population;
use crate::rank::{rank_by_total_error, TiePolicy};
use crate::selection::SelectionEvent;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Probability of each rank winning a tournament, for a population holding
/// `pop_size` distinct totals and tournaments of `tournament_size` draws
/// with replacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDistribution {
    pub pop_size: usize,
    pub tournament_size: u32,
    /// `pmf[i]` is the win probability of rank i + 1 (rank 1 = best).
    pub pmf: Vec<f64>,
}

impl RankDistribution {
    /// Win probability of 1-based `rank`.
    pub fn p(&self, rank: usize) -> f64 {
        self.pmf[rank - 1]
    }
}

/// Win probability by rank: p(i) = ((P-i+1)^t - (P-i)^t) / P^t.
///
/// Evaluated in ratio form, a_i = ((P-i+1)/P)^t by iterated multiplication,
/// so adjacent terms stay monotone and the pmf telescopes to a_1 = 1 at
/// working precision.
pub fn tournament_rank_pmf(pop_size: usize, tournament_size: u32) -> RankDistribution {
    assert!(pop_size >= 1);
    assert!(tournament_size >= 1);
    let survivor_mass: Vec<f64> = (0..=pop_size)
        .map(|i| pow_ratio(pop_size - i.min(pop_size), pop_size, tournament_size))
        .collect();
    // survivor_mass[i] = P(every draw ranks worse than i) = ((P-i)/P)^t;
    // rank i wins when the best draw is exactly i.
    let pmf: Vec<f64> = (0..pop_size)
        .map(|i| survivor_mass[i] - survivor_mass[i + 1])
        .collect();
    RankDistribution {
        pop_size,
        tournament_size,
        pmf,
    }
}

/// Probability that a tournament would pick an individual ranked past `kept`
/// (i.e. one that elitist survival at k = `kept` would have removed).
///
/// The pmf tail telescopes to ((P-k)/P)^t; both forms are computed and must
/// agree within 1e-12, and the closed form is returned.
pub fn removed_selection_probability(pop_size: usize, tournament_size: u32, kept: usize) -> f64 {
    assert!(kept <= pop_size);
    let dist = tournament_rank_pmf(pop_size, tournament_size);
    let tail: f64 = dist.pmf[kept..].iter().sum();
    let closed = pow_ratio(pop_size - kept, pop_size, tournament_size);
    assert!(
        (tail - closed).abs() <= 1e-12,
        "pmf tail {tail} drifted from closed form {closed}"
    );
    closed
}

fn pow_ratio(num: usize, den: usize, t: u32) -> f64 {
    let r = num as f64 / den as f64;
    let mut acc = 1.0;
    for _ in 0..t {
        acc *= r;
    }
    acc
}

/// Truncates toward zero at `decimals` places; used to compare computed
/// probabilities against table constants printed at fixed precision.
pub fn truncate_to_decimals(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (x * scale).trunc() / scale
}

/// Fraction of the population with a distinct behavior vector (outputs
/// compared bitwise; the failure marker is an ordinary behavior).
pub fn behavioral_diversity(pop: &Population) -> f64 {
    assert!(!pop.is_empty());
    let distinct: HashSet<_> = pop.iter().map(|ind| &ind.behavior).collect();
    distinct.len() as f64 / pop.len() as f64
}

/// Per-generation aggregate of a population snapshot and the selection
/// events that produced the next generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationMetrics {
    pub generation: usize,
    pub population_size: usize,
    pub best_total_error: f64,
    pub behavioral_diversity: f64,
    pub selection_events: usize,
    /// Mean reported rank of selected parents (min-rank ties, computed on
    /// the full pre-survival population). None when no events ran.
    pub mean_selected_rank: Option<f64>,
    /// Fraction of events whose parent ranked in the bottom half (reported
    /// rank strictly greater than ceil(P / 2)).
    pub bottom_half_selection_rate: Option<f64>,
    /// Per event, cases_considered / total cases, in event order. Events
    /// that examined no case (a pool already of size one) are omitted, so
    /// every recorded value is in (0, 1]. Tournament records 1 for every
    /// event: its aggregate metric reads all cases.
    pub case_usage_fractions: Vec<f64>,
    /// Mean of case_usage_fractions; None when it is empty.
    pub mean_case_usage: Option<f64>,
    /// Largest number of times any single individual was selected.
    pub max_parent_selection_count: usize,
}

/// Builds the metrics record for one generation. `events` may be empty (the
/// final generation of a run selects no parents).
pub fn aggregate_generation(
    generation: usize,
    pop: &Population,
    events: &[SelectionEvent],
) -> GenerationMetrics {
    let pop_size = pop.len();
    let diversity = behavioral_diversity(pop);
    let best = pop.best_total();

    if events.is_empty() {
        return GenerationMetrics {
            generation,
            population_size: pop_size,
            best_total_error: best,
            behavioral_diversity: diversity,
            selection_events: 0,
            mean_selected_rank: None,
            bottom_half_selection_rate: None,
            case_usage_fractions: vec![],
            mean_case_usage: None,
            max_parent_selection_count: 0,
        };
    }

    // Reported ranks use the full population, before survival filtering.
    let table = rank_by_total_error(&pop.totals(), TiePolicy::MinRankTies, None);
    let threshold = table.bottom_half_threshold();
    let num_cases = pop[0].errors.len();

    let mut rank_sum = 0usize;
    let mut bottom = 0usize;
    let mut fractions = Vec::with_capacity(events.len());
    let mut picks = vec![0usize; pop_size];
    for ev in events {
        let rank = table.ranks[ev.selected];
        rank_sum += rank;
        if rank > threshold {
            bottom += 1;
        }
        if ev.cases_considered >= 1 {
            fractions.push(ev.cases_considered as f64 / num_cases as f64);
        }
        picks[ev.selected] += 1;
    }
    let n_events = events.len() as f64;
    let mean_usage =
        (!fractions.is_empty()).then(|| fractions.iter().sum::<f64>() / fractions.len() as f64);
    GenerationMetrics {
        generation,
        population_size: pop_size,
        best_total_error: best,
        behavioral_diversity: diversity,
        selection_events: events.len(),
        mean_selected_rank: Some(rank_sum as f64 / n_events),
        bottom_half_selection_rate: Some(bottom as f64 / n_events),
        case_usage_fractions: fractions,
        mean_case_usage: mean_usage,
        max_parent_selection_count: picks.into_iter().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::individual::{ErrorVector, Individual};
    use crate::problems::Genome;
    use crate::selection::Termination;
    use crate::value::{Output, Value};

    #[test]
    fn pmf_worked_values_population_1000_size_7() {
        let dist = tournament_rank_pmf(1000, 7);
        // p(1) = 1 - (999/1000)^7
        assert!((dist.p(1) - 0.006979034965020947).abs() < 1e-12);
        // The worst rank's win probability is (1/1000)^7 = 1e-21.
        assert!((dist.p(1000) - 1e-21).abs() < 1e-33);
        // The ratio-form series telescopes to a_1 = 1.
        let sum: f64 = dist.pmf.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_is_non_increasing() {
        for &(p, t) in &[(10, 2), (100, 7), (1000, 7), (37, 5)] {
            let dist = tournament_rank_pmf(p, t);
            assert!(dist.pmf.windows(2).all(|w| w[1] <= w[0]));
            assert!(dist.pmf.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn removed_probability_matches_table_constants() {
        // Keeping the top 10% of 1000 under size-7 tournaments still selects
        // a removed individual with probability 0.9^7.
        let p = removed_selection_probability(1000, 7, 100);
        assert!((p - 0.4782969).abs() < 1e-12);
        assert_eq!(removed_selection_probability(1000, 7, 1000), 0.0);
        let p50 = removed_selection_probability(1000, 7, 500);
        assert!((p50 - 0.0078125).abs() < 1e-12);
    }

    #[test]
    fn truncation_matches_fixed_precision_printing() {
        assert_eq!(truncate_to_decimals(0.4782969, 5), 0.47829);
        assert_eq!(truncate_to_decimals(0.0002187, 5), 0.00021);
        assert_eq!(truncate_to_decimals(0.9999999, 5), 0.99999);
        assert_eq!(truncate_to_decimals(1e-7, 7), 1e-7);
    }

    fn ind(errors: Vec<f64>, behavior: Vec<Output>) -> Individual {
        Individual {
            genome: Genome::placeholder(),
            errors: ErrorVector(errors),
            behavior,
        }
    }

    #[test]
    fn diversity_counts_distinct_behavior_vectors() {
        let pop = Population(vec![
            ind(vec![0.0], vec![Output::Value(Value::Int(1))]),
            ind(vec![0.0], vec![Output::Value(Value::Int(1))]),
            ind(vec![0.0], vec![Output::Value(Value::Int(2))]),
            ind(vec![0.0], vec![Output::Failure]),
        ]);
        assert_eq!(behavioral_diversity(&pop), 0.75);
    }

    #[test]
    fn aggregate_handles_no_events() {
        let pop = Population(vec![
            ind(vec![1.0, 2.0], vec![Output::Value(Value::Int(0))]),
            ind(vec![0.5, 0.5], vec![Output::Value(Value::Int(1))]),
        ]);
        let m = aggregate_generation(3, &pop, &[]);
        assert_eq!(m.generation, 3);
        assert_eq!(m.selection_events, 0);
        assert_eq!(m.mean_selected_rank, None);
        assert_eq!(m.bottom_half_selection_rate, None);
        assert!(m.case_usage_fractions.is_empty());
        assert_eq!(m.max_parent_selection_count, 0);
        assert_eq!(m.best_total_error, 1.0);
    }

    #[test]
    fn aggregate_reports_ranks_on_full_population() {
        // Totals: 1.0, 2.0, 2.0, 9.0, 9.0 -> min-ranks 1, 2, 2, 4, 4;
        // bottom-half threshold ceil(5/2) = 3.
        let pop = Population(vec![
            ind(vec![1.0], vec![Output::Value(Value::Int(0))]),
            ind(vec![2.0], vec![Output::Value(Value::Int(1))]),
            ind(vec![2.0], vec![Output::Value(Value::Int(2))]),
            ind(vec![9.0], vec![Output::Value(Value::Int(3))]),
            ind(vec![9.0], vec![Output::Value(Value::Int(4))]),
        ]);
        let ev = |selected: usize| SelectionEvent {
            selected,
            cases_considered: 1,
            cases_used: vec![0],
            pool_size_trace: vec![5, 1],
            terminated_by: Termination::SingleSurvivor,
        };
        let metrics = aggregate_generation(0, &pop, &[ev(0), ev(3), ev(3), ev(2)]);
        assert_eq!(metrics.selection_events, 4);
        // Ranks selected: 1, 4, 4, 2 -> mean 11/4.
        assert_eq!(metrics.mean_selected_rank, Some(2.75));
        // Two of four events picked rank 4 > 3.
        assert_eq!(metrics.bottom_half_selection_rate, Some(0.5));
        assert_eq!(metrics.case_usage_fractions, vec![1.0; 4]);
        assert_eq!(metrics.mean_case_usage, Some(1.0));
        assert_eq!(metrics.max_parent_selection_count, 2);
    }

    #[test]
    fn usage_fractions_skip_events_that_touched_no_case() {
        let pop = Population(vec![
            ind(vec![1.0, 0.0], vec![Output::Value(Value::Int(0))]),
            ind(vec![0.0, 1.0], vec![Output::Value(Value::Int(1))]),
        ]);
        let ev = |considered: usize| SelectionEvent {
            selected: 0,
            cases_considered: considered,
            cases_used: (0..considered).collect(),
            pool_size_trace: vec![2],
            terminated_by: Termination::CasesExhausted,
        };
        // A pool that starts at size one never examines a case; its event
        // contributes no usage sample.
        let metrics = aggregate_generation(0, &pop, &[ev(1), ev(0), ev(2)]);
        assert_eq!(metrics.selection_events, 3);
        assert_eq!(metrics.case_usage_fractions, vec![0.5, 1.0]);
        assert_eq!(metrics.mean_case_usage, Some(0.75));
    }
}
