//! Aggregates persisted runs into one summary: per-cell success counts,
//! per-method success-vs-rate regressions, pairwise chi-squared tests, and
//! mean metric series.

use lexilab::analytics::stats::{
    chi_squared_success, regress_success_vs_rate, ChiSquaredResult, RegressionResult,
};
use serde::{Deserialize, Serialize};

use crate::plan::ExperimentPlan;
use crate::runner::RunRecord;

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub schema_version: u32,
    pub cells: Vec<CellSummary>,
    pub regressions: Vec<MethodRegression>,
    pub chi_squared_pairs: Vec<MethodPairChi>,
    pub series: Vec<CellSeries>,
    pub case_usage: Vec<CaseUsageSummary>,
}

/// Outcome counts for one (problem, selection, rate) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub problem: String,
    pub selection: String,
    pub rate: f64,
    /// Records found on disk; equals the plan's replicates unless runs failed.
    pub replicates: usize,
    /// Runs whose solution also passed the unseen test set.
    pub successes: usize,
    pub train_passes: usize,
    pub mean_final_diversity: f64,
    pub mean_solution_generation: Option<f64>,
    pub audits_clean: bool,
}

/// Least-squares fit of success count against survival rate for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRegression {
    pub problem: String,
    pub selection: String,
    pub points: Vec<(f64, f64)>,
    pub result: Option<RegressionResult>,
    /// Why the fit is absent (fewer than 3 rates, degenerate x).
    pub error: Option<String>,
}

/// Success-count comparison between two methods at one rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPairChi {
    pub problem: String,
    pub rate: f64,
    pub selection_a: String,
    pub successes_a: usize,
    pub selection_b: String,
    pub successes_b: usize,
    pub replicates: usize,
    pub test: ChiSquaredResult,
}

/// Mean metric series for one cell, index = generation. Runs end early when
/// solved, so later generations average over fewer runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSeries {
    pub problem: String,
    pub selection: String,
    pub rate: f64,
    pub runs_at_generation: Vec<usize>,
    pub mean_diversity: Vec<f64>,
    /// None where no run recorded selection events at that generation.
    pub mean_selected_rank: Vec<Option<f64>>,
}

/// Per-event case-usage distribution pooled over a method's runs (all rates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseUsageSummary {
    pub problem: String,
    pub selection: String,
    /// Events that considered at least one case, across all runs.
    pub events: usize,
    pub mean_usage: Option<f64>,
    /// Ten bins over (0, 1]; fractions of `events`, summing to 1 when any.
    pub histogram: Vec<f64>,
}

fn sorted_records<'a>(records: &'a [RunRecord]) -> Vec<&'a RunRecord> {
    let mut rows: Vec<&RunRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        (&a.problem.name, &a.selection_label, a.rate, a.replicate)
            .partial_cmp(&(&b.problem.name, &b.selection_label, b.rate, b.replicate))
            .unwrap()
    });
    rows
}

/// Groups consecutive sorted records by a key.
fn group_by<'a, K: PartialEq, F: Fn(&RunRecord) -> K>(
    rows: &[&'a RunRecord],
    key: F,
) -> Vec<(K, Vec<&'a RunRecord>)> {
    let mut out: Vec<(K, Vec<&RunRecord>)> = Vec::new();
    for &r in rows {
        let k = key(r);
        match out.last_mut() {
            Some((last, group)) if *last == k => group.push(r),
            _ => out.push((k, vec![r])),
        }
    }
    out
}

pub fn summarize(plan: &ExperimentPlan, records: &[RunRecord]) -> ExperimentSummary {
    let rows = sorted_records(records);

    let mut cells = Vec::new();
    for ((problem, label, rate), group) in group_by(&rows, |r| {
        (r.problem.name.clone(), r.selection_label.clone(), r.rate)
    }) {
        let successes = group.iter().filter(|r| r.result.generalizes).count();
        let train_passes = group.iter().filter(|r| r.result.train_pass).count();
        let div_sum: f64 = group
            .iter()
            .map(|r| {
                r.result
                    .generations
                    .last()
                    .expect("at least generation 0")
                    .behavioral_diversity
            })
            .sum();
        let solved: Vec<f64> = group
            .iter()
            .filter_map(|r| r.result.solution_generation.map(|g| g as f64))
            .collect();
        cells.push(CellSummary {
            problem,
            selection: label,
            rate,
            replicates: group.len(),
            successes,
            train_passes,
            mean_final_diversity: div_sum / group.len() as f64,
            mean_solution_generation: (!solved.is_empty())
                .then(|| solved.iter().sum::<f64>() / solved.len() as f64),
            audits_clean: group.iter().all(|r| r.result.audit.clean()),
        });
    }

    let mut regressions = Vec::new();
    for ((problem, label), group) in group_by(&rows, |r| {
        (r.problem.name.clone(), r.selection_label.clone())
    }) {
        let points: Vec<(f64, f64)> = group_by(&group, |r| r.rate)
            .into_iter()
            .map(|(rate, runs)| {
                let s = runs.iter().filter(|r| r.result.generalizes).count();
                (rate, s as f64)
            })
            .collect();
        let (result, error) = match regress_success_vs_rate(&points) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        regressions.push(MethodRegression {
            problem,
            selection: label,
            points,
            result,
            error,
        });
    }

    // Pairwise per (problem, rate): every unordered pair of methods.
    let mut chi_squared_pairs = Vec::new();
    for (problem, group) in group_by(&rows, |r| r.problem.name.clone()) {
        for &rate in &plan.survival_rates {
            let at_rate: Vec<&&RunRecord> = group.iter().filter(|r| r.rate == rate).collect();
            let per_method: Vec<(String, usize, usize)> =
                group_by(&at_rate.iter().map(|r| **r).collect::<Vec<_>>(), |r| {
                    r.selection_label.clone()
                })
                .into_iter()
                .map(|(label, runs)| {
                    let s = runs.iter().filter(|r| r.result.generalizes).count();
                    (label, s, runs.len())
                })
                .collect();
            for i in 0..per_method.len() {
                for j in i + 1..per_method.len() {
                    let (ref a, sa, na) = per_method[i];
                    let (ref b, sb, nb) = per_method[j];
                    if na == 0 || nb == 0 {
                        continue;
                    }
                    chi_squared_pairs.push(MethodPairChi {
                        problem: problem.clone(),
                        rate,
                        selection_a: a.clone(),
                        successes_a: sa,
                        selection_b: b.clone(),
                        successes_b: sb,
                        replicates: na.max(nb),
                        test: chi_squared_success(sa as u64, na as u64, sb as u64, nb as u64),
                    });
                }
            }
        }
    }

    let mut series = Vec::new();
    for ((problem, label, rate), group) in group_by(&rows, |r| {
        (r.problem.name.clone(), r.selection_label.clone(), r.rate)
    }) {
        let horizon = group
            .iter()
            .map(|r| r.result.generations.len())
            .max()
            .unwrap_or(0);
        let mut runs_at = vec![0usize; horizon];
        let mut div_sum = vec![0.0f64; horizon];
        let mut rank_sum = vec![0.0f64; horizon];
        let mut rank_n = vec![0usize; horizon];
        for r in &group {
            for (g, m) in r.result.generations.iter().enumerate() {
                runs_at[g] += 1;
                div_sum[g] += m.behavioral_diversity;
                if let Some(rank) = m.mean_selected_rank {
                    rank_sum[g] += rank;
                    rank_n[g] += 1;
                }
            }
        }
        series.push(CellSeries {
            problem,
            selection: label,
            rate,
            mean_diversity: div_sum
                .iter()
                .zip(&runs_at)
                .map(|(s, &n)| s / n as f64)
                .collect(),
            mean_selected_rank: rank_sum
                .iter()
                .zip(&rank_n)
                .map(|(s, &n)| (n > 0).then(|| s / n as f64))
                .collect(),
            runs_at_generation: runs_at,
        });
    }

    let mut case_usage = Vec::new();
    for ((problem, label), group) in group_by(&rows, |r| {
        (r.problem.name.clone(), r.selection_label.clone())
    }) {
        let mut events = 0usize;
        let mut usage_sum = 0.0f64;
        let mut bins = vec![0usize; 10];
        for r in &group {
            for m in &r.result.generations {
                for &frac in &m.case_usage_fractions {
                    // frac is in (0, 1]; bin k covers (k/10, (k+1)/10]
                    bins[((frac * 10.0).ceil() as usize).saturating_sub(1).min(9)] += 1;
                    usage_sum += frac;
                    events += 1;
                }
            }
        }
        let histogram = if events == 0 {
            vec![]
        } else {
            bins.iter().map(|&b| b as f64 / events as f64).collect()
        };
        case_usage.push(CaseUsageSummary {
            problem,
            selection: label,
            events,
            mean_usage: (events > 0).then(|| usage_sum / events as f64),
            histogram,
        });
    }

    ExperimentSummary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        cells,
        regressions,
        chi_squared_pairs,
        series,
        case_usage,
    }
}
