//! Experiment plans: which problems, selection methods and survival rates to
//! run, with how many replicates, under which base seed.

use std::path::{Path, PathBuf};

use lexilab::problems::ProblemSpec;
use lexilab::rng::derive_seed;
use lexilab::selection::{EpsilonMode, SelectionConfig, SelectionMethod};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One experiment = the full cross product problems x selections x rates,
/// each cell run `replicates` times under seeds derived from `base_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub problems: Vec<ProblemSpec>,
    pub selections: Vec<SelectionConfig>,
    #[serde(default = "default_rates")]
    pub survival_rates: Vec<f64>,
    pub replicates: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_generations")]
    pub max_generations: usize,
}

fn default_rates() -> Vec<f64> {
    (1..=10).map(|k| k as f64 * 10.0).collect()
}

fn default_population() -> usize {
    200
}

fn default_generations() -> usize {
    100
}

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("plan lists no problems")]
    NoProblems,
    #[error("plan lists no selection configs")]
    NoSelections,
    #[error("plan lists no survival rates")]
    NoRates,
    #[error("survival rate {0} outside (0, 100]")]
    BadRate(f64),
    #[error("replicates must be at least 1")]
    NoReplicates,
    #[error("population size must be at least 2")]
    TinyPopulation,
    #[error("two selection configs share the label {0:?}")]
    DuplicateLabel(String),
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.problems.is_empty() {
            return Err(PlanError::NoProblems);
        }
        if self.selections.is_empty() {
            return Err(PlanError::NoSelections);
        }
        if self.survival_rates.is_empty() {
            return Err(PlanError::NoRates);
        }
        for &r in &self.survival_rates {
            if !r.is_finite() || r <= 0.0 || r > 100.0 {
                return Err(PlanError::BadRate(r));
            }
        }
        if self.replicates == 0 {
            return Err(PlanError::NoReplicates);
        }
        if self.population_size < 2 {
            return Err(PlanError::TinyPopulation);
        }
        let mut labels: Vec<String> = self.selections.iter().map(selection_label).collect();
        labels.sort();
        for pair in labels.windows(2) {
            if pair[0] == pair[1] {
                return Err(PlanError::DuplicateLabel(pair[0].clone()));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> anyhow::Result<ExperimentPlan> {
        let text = std::fs::read_to_string(path)?;
        let plan: ExperimentPlan = serde_json::from_str(&text)?;
        plan.validate()?;
        Ok(plan)
    }
}

/// Filesystem-safe name distinguishing selection configs within a plan.
pub fn selection_label(cfg: &SelectionConfig) -> String {
    let mut label = match cfg.method {
        SelectionMethod::Lexicase => "lexicase".to_string(),
        SelectionMethod::EpsilonLexicase => match cfg.epsilon_mode {
            EpsilonMode::MadPerCase => "epsilon-lexicase-mad".to_string(),
            EpsilonMode::Fixed => format!("epsilon-lexicase-eps{}", cfg.epsilon),
        },
        SelectionMethod::Tournament => format!("tournament-t{}", cfg.tournament_size),
    };
    match cfg.preselect_dedup {
        Some(true) => label.push_str("+dedup"),
        Some(false) => label.push_str("+nodedup"),
        None => {}
    }
    label
}

/// Preset scales: `desk` fits on a laptop in minutes, `paper` matches the
/// publication-scale population, budget and replicate counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

impl Profile {
    pub fn population(self) -> usize {
        match self {
            Profile::Desk => 200,
            Profile::Paper => 1000,
        }
    }

    pub fn generations(self) -> usize {
        match self {
            Profile::Desk => 100,
            Profile::Paper => 300,
        }
    }

    pub fn replicates(self) -> usize {
        match self {
            Profile::Desk => 30,
            Profile::Paper => 100,
        }
    }

    /// The default experiment: both vector-task benchmarks under lexicase
    /// and size-7 tournament across the full survival-rate sweep.
    pub fn default_plan(self, base_seed: u64, out_dir: PathBuf) -> ExperimentPlan {
        let problem = |name: &str, idx: u64| ProblemSpec {
            seed: derive_seed(base_seed, &[PROBLEM_SEED_TAG, idx]),
            ..ProblemSpec::new(name, 0)
        };
        ExperimentPlan {
            problems: vec![problem("last-index-of-zero", 0), problem("parity-4", 1)],
            selections: vec![
                SelectionConfig::new(SelectionMethod::Lexicase),
                SelectionConfig::new(SelectionMethod::Tournament),
            ],
            survival_rates: default_rates(),
            replicates: self.replicates(),
            base_seed,
            out_dir,
            population_size: self.population(),
            max_generations: self.generations(),
        }
    }
}

/// Stream-domain tag for per-problem case seeds (ASCII "CASE").
pub const PROBLEM_SEED_TAG: u64 = 0x43415345;
