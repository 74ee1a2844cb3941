//! The generational evolution loop.
//!
//! Each generation: evaluate, record metrics, apply elitist survival, run
//! one selection event per parent slot, breed children, repeat. Every random
//! decision draws from a stream derived from (seed, generation, slot), so
//! results are bit-identical regardless of evaluation parallelism.

use crate::analytics::{aggregate_generation, GenerationMetrics};
use crate::individual::{Individual, Population};
use crate::problems::{check_solution, evaluate, Genome, Problem, ProblemSpec};
use crate::rank::dominates;
use crate::rng::{stream, tag};
use crate::selection::{
    preselect_dedup, selector_for, SelectionConfig, SelectionError, SelectionEvent,
    SelectionMethod,
};
use crate::survival::{elitist_survive, surviving_count, SurvivalConfig, SurvivalError};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};
use thiserror::Error;

/// Probability of each variation operator, drawn once per child.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationRates {
    pub crossover_then_mutation: f64,
    pub mutation_only: f64,
    pub crossover_only: f64,
    pub structural_mutation: f64,
}

impl Default for VariationRates {
    fn default() -> Self {
        VariationRates {
            crossover_then_mutation: 0.5,
            mutation_only: 0.2,
            crossover_only: 0.2,
            structural_mutation: 0.1,
        }
    }
}

impl VariationRates {
    fn as_array(&self) -> [f64; 4] {
        [
            self.crossover_then_mutation,
            self.mutation_only,
            self.crossover_only,
            self.structural_mutation,
        ]
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let rates = self.as_array();
        if rates.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
            return Err(EngineError::BadVariationRates(
                "rates must lie in [0, 1]".into(),
            ));
        }
        let sum: f64 = rates.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EngineError::BadVariationRates(format!(
                "rates must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub population_size: usize,
    /// Breeding cycles after the initial evaluation; the metric series holds
    /// at most `max_generations + 1` entries.
    pub max_generations: usize,
    pub selection: SelectionConfig,
    pub survival: SurvivalConfig,
    #[serde(default)]
    pub variation: VariationRates,
    pub seed: u64,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.population_size < 2 {
            return Err(EngineError::EmptyPopulation);
        }
        self.selection.validate(self.population_size)?;
        self.survival.validate()?;
        self.variation.validate()
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("population size must be at least 2")]
    EmptyPopulation,
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Survival(#[from] SurvivalError),
    #[error("bad variation rates: {0}")]
    BadVariationRates(String),
}

/// Reporting conventions baked into a run's metrics, recorded alongside the
/// results so downstream readers need not guess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    /// Tie policy behind reported parent ranks.
    pub reported_rank_ties: String,
    /// Tie policy behind survival decisions.
    pub decision_rank_ties: String,
    /// A lexicase event's terminating case counts as considered.
    pub case_usage_counts_terminating_case: bool,
    /// Whether duplicate error vectors were collapsed before selection.
    pub preselect_dedup: bool,
    /// Median convention inside MAD epsilons.
    pub mad_median: String,
    /// Reported rank above which an event counts as bottom-half.
    pub bottom_half_threshold: String,
}

impl Conventions {
    fn for_config(cfg: &EngineConfig) -> Conventions {
        Conventions {
            reported_rank_ties: "min-rank".into(),
            decision_rank_ties: "random-shuffle".into(),
            case_usage_counts_terminating_case: true,
            preselect_dedup: cfg.selection.dedup_enabled(),
            mad_median: "mean-of-middle-two".into(),
            bottom_half_threshold: "rank > ceil(population/2)".into(),
        }
    }
}

/// Invariant checks performed while the run executes. All violation counts
/// must be zero; they are persisted so post-hoc analysis can confirm that
/// without re-running.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditCounters {
    pub selection_events: u64,
    /// Events whose parent fell outside the survival-filtered pool.
    pub pool_membership_violations: u64,
    /// Strict-lexicase events where another pool member dominated the parent.
    pub domination_violations: u64,
    /// Strict-lexicase events with at least one case considered.
    pub eliteness_checks: u64,
    /// Checked events whose parent was not elite on its first shuffled case.
    pub eliteness_violations: u64,
    pub survival_checks: u64,
    /// Generations where a survivor's total exceeded a removed member's, or
    /// the survivor count was off.
    pub survival_violations: u64,
}

impl AuditCounters {
    pub fn clean(&self) -> bool {
        self.pool_membership_violations == 0
            && self.domination_violations == 0
            && self.eliteness_violations == 0
            && self.survival_violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub problem: ProblemSpec,
    pub config: EngineConfig,
    pub conventions: Conventions,
    /// One entry per evaluated generation. The final entry (solved or budget
    /// exhausted) has no selection statistics.
    pub generations: Vec<GenerationMetrics>,
    /// Generation at which a zero-training-error individual first appeared.
    pub solution_generation: Option<usize>,
    pub train_pass: bool,
    pub generalizes: bool,
    pub final_best_total_error: f64,
    pub audit: AuditCounters,
    /// Wall-clock time; in-memory only, excluded from serialization so runs
    /// with equal seeds serialize identically.
    #[serde(skip)]
    pub duration: Duration,
}

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Samples and evaluates the initial population.
pub fn init_population(problem: &dyn Problem, cfg: &EngineConfig) -> Population {
    let genomes: Vec<Genome> = (0..cfg.population_size)
        .map(|i| {
            let mut rng = stream(cfg.seed, &[tag::INIT, i as u64]);
            problem.random_genome(&mut rng)
        })
        .collect();
    evaluate_all(problem, genomes)
}

fn evaluate_all(problem: &dyn Problem, genomes: Vec<Genome>) -> Population {
    // Embarrassingly parallel; collect preserves order, and evaluation draws
    // no randomness, so thread count cannot affect results.
    let individuals = genomes
        .into_par_iter()
        .map(|genome| {
            let (errors, behavior) = evaluate(problem, &genome);
            Individual {
                genome,
                errors,
                behavior,
            }
        })
        .collect();
    Population(individuals)
}

enum Operator {
    CrossoverThenMutation,
    MutationOnly,
    CrossoverOnly,
    StructuralMutation,
}

fn pick_operator(rates: &VariationRates, rng: &mut impl Rng) -> Operator {
    let draw: f64 = rng.gen();
    let r = rates.as_array();
    if draw < r[0] {
        Operator::CrossoverThenMutation
    } else if draw < r[0] + r[1] {
        Operator::MutationOnly
    } else if draw < r[0] + r[1] + r[2] {
        Operator::CrossoverOnly
    } else {
        Operator::StructuralMutation
    }
}

/// Runs one full evolution under `cfg`, returning the metric series and
/// outcome flags.
pub fn evolve(problem: &dyn Problem, cfg: &EngineConfig) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    let started = Instant::now();
    let selector = selector_for(cfg.selection.method);
    let pop_size = cfg.population_size;

    let mut pop = init_population(problem, cfg);
    let mut generations: Vec<GenerationMetrics> = Vec::new();
    let mut audit = AuditCounters::default();
    let mut solution_generation = None;

    for gen in 0..=cfg.max_generations {
        let best = pop.best_total();
        if best == 0.0 {
            solution_generation = Some(gen);
        }
        if solution_generation.is_some() || gen == cfg.max_generations {
            generations.push(aggregate_generation(gen, &pop, &[]));
            break;
        }

        let gen_tag = gen as u64;
        let survivors = {
            let mut rng = stream(cfg.seed, &[tag::SURVIVAL, gen_tag]);
            elitist_survive(&pop, &cfg.survival, &mut rng)
        };
        audit_survival(&pop, &survivors, &cfg.survival, &mut audit);

        let pool = if cfg.selection.dedup_enabled() {
            let mut rng = stream(cfg.seed, &[tag::DEDUP, gen_tag]);
            preselect_dedup(&pop, &survivors, &mut rng)
        } else {
            survivors
        };

        let mut events: Vec<SelectionEvent> = Vec::with_capacity(2 * pop_size);
        let mut children: Vec<Genome> = Vec::with_capacity(pop_size);
        let select_slot = |slot: u64, audit: &mut AuditCounters,
                               events: &mut Vec<SelectionEvent>|
         -> usize {
            let mut rng = stream(cfg.seed, &[tag::EVENT, gen_tag, slot]);
            let event = selector.select(&pop, &pool, &cfg.selection, &mut rng);
            audit_event(&pop, &pool, &event, cfg.selection.method, audit);
            let selected = event.selected;
            events.push(event);
            selected
        };
        for child in 0..pop_size {
            let mut vrng = stream(cfg.seed, &[tag::CHILD, gen_tag, child as u64]);
            let operator = pick_operator(&cfg.variation, &mut vrng);
            let slot = 2 * child as u64;
            let genome = match operator {
                Operator::CrossoverThenMutation => {
                    let p1 = select_slot(slot, &mut audit, &mut events);
                    let p2 = select_slot(slot + 1, &mut audit, &mut events);
                    let crossed = problem.crossover(&pop[p1].genome, &pop[p2].genome, &mut vrng);
                    problem.point_mutate(&crossed, &mut vrng)
                }
                Operator::MutationOnly => {
                    let p1 = select_slot(slot, &mut audit, &mut events);
                    problem.point_mutate(&pop[p1].genome, &mut vrng)
                }
                Operator::CrossoverOnly => {
                    let p1 = select_slot(slot, &mut audit, &mut events);
                    let p2 = select_slot(slot + 1, &mut audit, &mut events);
                    problem.crossover(&pop[p1].genome, &pop[p2].genome, &mut vrng)
                }
                Operator::StructuralMutation => {
                    let p1 = select_slot(slot, &mut audit, &mut events);
                    problem.structural_mutate(&pop[p1].genome, &mut vrng)
                }
            };
            children.push(genome);
        }

        generations.push(aggregate_generation(gen, &pop, &events));
        pop = evaluate_all(problem, children);
    }

    let (train_pass, generalizes) = match solution_generation {
        None => (false, false),
        Some(_) => {
            let winner = pop
                .iter()
                .position(|ind| ind.total_error() == 0.0)
                .expect("a zero-error individual exists at the solved generation");
            let check = check_solution(problem, &pop[winner].genome);
            (check.train_pass, check.generalizes)
        }
    };

    Ok(RunResult {
        schema_version: RESULT_SCHEMA_VERSION,
        problem: problem.spec().clone(),
        config: cfg.clone(),
        conventions: Conventions::for_config(cfg),
        generations,
        solution_generation,
        train_pass,
        generalizes,
        final_best_total_error: pop.best_total(),
        audit,
        duration: started.elapsed(),
    })
}

fn audit_survival(
    pop: &Population,
    survivors: &[usize],
    cfg: &SurvivalConfig,
    audit: &mut AuditCounters,
) {
    audit.survival_checks += 1;
    let expected = if cfg.rate == 100.0 {
        pop.len()
    } else {
        surviving_count(cfg.rate, pop.len())
    };
    let mut ok = survivors.len() == expected;
    if ok {
        let kept: Vec<bool> = {
            let mut mask = vec![false; pop.len()];
            for &s in survivors {
                mask[s] = true;
            }
            mask
        };
        let max_kept = survivors
            .iter()
            .map(|&s| pop[s].total_error())
            .fold(f64::NEG_INFINITY, f64::max);
        let min_removed = (0..pop.len())
            .filter(|&i| !kept[i])
            .map(|i| pop[i].total_error())
            .fold(f64::INFINITY, f64::min);
        ok = max_kept <= min_removed;
    }
    if !ok {
        audit.survival_violations += 1;
    }
}

fn audit_event(
    pop: &Population,
    pool: &[usize],
    event: &SelectionEvent,
    method: SelectionMethod,
    audit: &mut AuditCounters,
) {
    audit.selection_events += 1;
    if !pool.contains(&event.selected) {
        audit.pool_membership_violations += 1;
    }
    // The properties below hold for strict lexicase only. Epsilon thresholds
    // and tournament sampling can legitimately return dominated individuals,
    // so auditing them here would flag correct behavior.
    if method != SelectionMethod::Lexicase {
        return;
    }
    let selected = &pop[event.selected].errors;
    if pool
        .iter()
        .any(|&other| other != event.selected && dominates(&pop[other].errors, selected))
    {
        audit.domination_violations += 1;
    }
    if event.cases_considered >= 1 {
        audit.eliteness_checks += 1;
        let first = event.cases_used[0];
        let min = pool
            .iter()
            .map(|&i| pop[i].errors[first])
            .fold(f64::INFINITY, f64::min);
        if selected[first] != min {
            audit.eliteness_violations += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_problem;

    fn desk_config(method: SelectionMethod, seed: u64) -> EngineConfig {
        EngineConfig {
            population_size: 30,
            max_generations: 4,
            selection: SelectionConfig::new(method),
            survival: SurvivalConfig { rate: 100.0 },
            variation: VariationRates::default(),
            seed,
        }
    }

    fn paper_example() -> ProblemSpec {
        ProblemSpec::new("sr-paper-example", 11)
    }

    #[test]
    fn validate_rejects_bad_configs() {
        let mut cfg = desk_config(SelectionMethod::Lexicase, 0);
        cfg.population_size = 0;
        assert!(matches!(cfg.validate(), Err(EngineError::EmptyPopulation)));

        let mut cfg = desk_config(SelectionMethod::Lexicase, 0);
        cfg.variation.mutation_only = 0.3;
        assert!(matches!(
            cfg.validate(),
            Err(EngineError::BadVariationRates(_))
        ));

        let mut cfg = desk_config(SelectionMethod::Tournament, 0);
        cfg.selection.tournament_size = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = desk_config(SelectionMethod::Lexicase, 0);
        cfg.survival.rate = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn operator_draw_respects_cumulative_rates() {
        let rates = VariationRates::default();
        let mut rng = stream(9, &[99]);
        let mut counts = [0usize; 4];
        for _ in 0..20_000 {
            match pick_operator(&rates, &mut rng) {
                Operator::CrossoverThenMutation => counts[0] += 1,
                Operator::MutationOnly => counts[1] += 1,
                Operator::CrossoverOnly => counts[2] += 1,
                Operator::StructuralMutation => counts[3] += 1,
            }
        }
        let fractions: Vec<f64> = counts.iter().map(|&c| c as f64 / 20_000.0).collect();
        for (got, want) in fractions.iter().zip([0.5, 0.2, 0.2, 0.1]) {
            assert!((got - want).abs() < 0.02, "got {fractions:?}");
        }
    }

    #[test]
    fn series_length_is_bounded_by_budget_plus_one() {
        let problem = make_problem(&paper_example()).unwrap();
        let cfg = desk_config(SelectionMethod::Lexicase, 5);
        let result = evolve(problem.as_ref(), &cfg).unwrap();
        assert!(!result.generations.is_empty());
        assert!(result.generations.len() <= cfg.max_generations + 1);
        for (i, m) in result.generations.iter().enumerate() {
            assert_eq!(m.generation, i);
            assert_eq!(m.population_size, cfg.population_size);
        }
        let last = result.generations.last().unwrap();
        assert_eq!(last.selection_events, 0);
        assert!(last.mean_selected_rank.is_none());
    }

    #[test]
    fn zero_budget_run_records_exactly_the_initial_generation() {
        let problem = make_problem(&paper_example()).unwrap();
        let mut cfg = desk_config(SelectionMethod::Tournament, 7);
        cfg.max_generations = 0;
        let result = evolve(problem.as_ref(), &cfg).unwrap();
        assert_eq!(result.generations.len(), 1);
        assert_eq!(result.generations[0].selection_events, 0);
        assert!(result.solution_generation.is_none() || result.train_pass);
    }

    #[test]
    fn same_seed_reproduces_the_serialized_run() {
        let problem = make_problem(&paper_example()).unwrap();
        let cfg = desk_config(SelectionMethod::EpsilonLexicase, 31);
        let a = evolve(problem.as_ref(), &cfg).unwrap();
        let b = evolve(problem.as_ref(), &cfg).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        assert!(!ja.contains("duration"));
    }

    #[test]
    fn different_seeds_diverge() {
        let problem = make_problem(&paper_example()).unwrap();
        let a = evolve(
            problem.as_ref(),
            &desk_config(SelectionMethod::Lexicase, 100),
        )
        .unwrap();
        let b = evolve(
            problem.as_ref(),
            &desk_config(SelectionMethod::Lexicase, 101),
        )
        .unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn audits_stay_clean_across_methods_and_survival_rates() {
        let problem = make_problem(&paper_example()).unwrap();
        for method in [
            SelectionMethod::Lexicase,
            SelectionMethod::EpsilonLexicase,
            SelectionMethod::Tournament,
        ] {
            for rate in [40.0, 100.0] {
                let mut cfg = desk_config(method, 13);
                cfg.survival.rate = rate;
                let result = evolve(problem.as_ref(), &cfg).unwrap();
                assert!(
                    result.audit.clean(),
                    "{method:?} rate {rate}: {:?}",
                    result.audit
                );
                assert!(result.audit.selection_events > 0);
                assert!(result.audit.survival_checks > 0);
                if method == SelectionMethod::Lexicase {
                    // Pool-of-one events consider zero cases and skip the check.
                    assert!(result.audit.eliteness_checks > 0);
                    assert!(result.audit.eliteness_checks <= result.audit.selection_events);
                }
            }
        }
    }

    #[test]
    fn solved_run_reports_solution_generation_and_checks() {
        // Deliberately easy setup so some seed solves within budget.
        let problem = make_problem(&paper_example()).unwrap();
        let mut solved = None;
        for seed in 0..40 {
            let mut cfg = desk_config(SelectionMethod::Lexicase, seed);
            cfg.population_size = 100;
            cfg.max_generations = 25;
            let result = evolve(problem.as_ref(), &cfg).unwrap();
            if let Some(gen) = result.solution_generation {
                assert!(result.train_pass);
                assert_eq!(result.generations.last().unwrap().generation, gen);
                assert_eq!(result.final_best_total_error, 0.0);
                solved = Some(result);
                break;
            }
        }
        assert!(solved.is_some(), "no seed solved the three-case example");
    }
}
