//! Parent selection strategies.
//!
//! Each method lives behind the [`Selector`] trait and is registered by name;
//! configs and CLIs pick one at runtime. All selectors operate on a candidate
//! pool given as population indices and report a [`SelectionEvent`] carrying
//! the instrumentation the analytics layer aggregates.

mod lexicase;
pub mod oracle;
mod tournament;

pub use lexicase::{epsilon_lexicase_select, lexicase_select, mad_epsilons};
pub use tournament::tournament_select;

use crate::individual::Population;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMethod {
    Lexicase,
    EpsilonLexicase,
    Tournament,
}

impl SelectionMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionMethod::Lexicase => "lexicase",
            SelectionMethod::EpsilonLexicase => "epsilon-lexicase",
            SelectionMethod::Tournament => "tournament",
        }
    }
}

/// How epsilon-lexicase widens its per-case elite band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonMode {
    /// One configured epsilon for every case.
    Fixed,
    /// Median absolute deviation of the entering pool's errors on the case,
    /// computed once per selection event and reused across its filter steps.
    MadPerCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    pub method: SelectionMethod,
    #[serde(default = "default_tournament_size")]
    pub tournament_size: usize,
    #[serde(default = "default_epsilon_mode")]
    pub epsilon_mode: EpsilonMode,
    /// Used only when `epsilon_mode` is `Fixed`.
    #[serde(default)]
    pub epsilon: f64,
    /// Collapse duplicate error vectors before each generation's events.
    /// `None` picks the per-method default: on for the lexicase family,
    /// off for tournament.
    #[serde(default)]
    pub preselect_dedup: Option<bool>,
}

fn default_tournament_size() -> usize {
    7
}

fn default_epsilon_mode() -> EpsilonMode {
    EpsilonMode::MadPerCase
}

impl SelectionConfig {
    pub fn new(method: SelectionMethod) -> Self {
        SelectionConfig {
            method,
            tournament_size: default_tournament_size(),
            epsilon_mode: default_epsilon_mode(),
            epsilon: 0.0,
            preselect_dedup: None,
        }
    }

    pub fn validate(&self, population_size: usize) -> Result<(), SelectionError> {
        if self.method == SelectionMethod::Tournament {
            if self.tournament_size == 0 {
                return Err(SelectionError::BadTournamentSize {
                    size: self.tournament_size,
                    population: population_size,
                });
            }
            if self.tournament_size > population_size {
                return Err(SelectionError::BadTournamentSize {
                    size: self.tournament_size,
                    population: population_size,
                });
            }
        }
        if self.method == SelectionMethod::EpsilonLexicase
            && self.epsilon_mode == EpsilonMode::Fixed
            && !(self.epsilon >= 0.0 && self.epsilon.is_finite())
        {
            return Err(SelectionError::BadEpsilon(self.epsilon));
        }
        Ok(())
    }

    pub fn dedup_enabled(&self) -> bool {
        self.preselect_dedup.unwrap_or(match self.method {
            SelectionMethod::Lexicase | SelectionMethod::EpsilonLexicase => true,
            SelectionMethod::Tournament => false,
        })
    }

    /// Stable human-readable label; distinct configurations of the same
    /// method get distinct labels (used for result paths and seed paths).
    pub fn label(&self) -> String {
        let mut label = match self.method {
            SelectionMethod::Lexicase => "lexicase".to_string(),
            SelectionMethod::EpsilonLexicase => match self.epsilon_mode {
                EpsilonMode::MadPerCase => "epsilon-lexicase-mad".to_string(),
                EpsilonMode::Fixed => format!("epsilon-lexicase-{}", self.epsilon),
            },
            SelectionMethod::Tournament => format!("tournament-t{}", self.tournament_size),
        };
        if let Some(flag) = self.preselect_dedup {
            let default = match self.method {
                SelectionMethod::Tournament => false,
                _ => true,
            };
            if flag != default {
                label.push_str(if flag { "-dedup" } else { "-nodedup" });
            }
        }
        label
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SelectionError {
    #[error("tournament size {size} invalid for population of {population}")]
    BadTournamentSize { size: usize, population: usize },
    #[error("epsilon must be finite and non-negative, got {0}")]
    BadEpsilon(f64),
    #[error("unknown selection method {0:?}")]
    UnknownMethod(String),
}

/// Why a selection event stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Filtering narrowed the pool to exactly one candidate.
    SingleSurvivor,
    /// Every case was applied and more than one candidate remained; the
    /// winner was drawn uniformly among them.
    CasesExhausted,
    /// A tournament tie at the minimal total, broken uniformly.
    RandomAmongSurvivors,
}

/// Record of one parent pick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEvent {
    /// Population index of the chosen parent.
    pub selected: usize,
    /// Number of filter passes the event ran; a lexicase event that reaches
    /// the last case counts it, and tournaments count every case.
    pub cases_considered: usize,
    /// Case indices in the order they were applied (tournaments list all
    /// cases in natural order).
    pub cases_used: Vec<usize>,
    /// Entering pool size followed by the pool size after each filter step;
    /// never increasing, and ending at 1 exactly for single-survivor events.
    pub pool_size_trace: Vec<usize>,
    pub terminated_by: Termination,
}

/// A parent-selection strategy usable behind a registry.
pub trait Selector: Send + Sync {
    fn name(&self) -> &'static str;

    /// Picks one parent from `pool` (population indices into `pop`).
    /// The pool must be non-empty and every member evaluated on the same
    /// number of cases.
    fn select(
        &self,
        pop: &Population,
        pool: &[usize],
        cfg: &SelectionConfig,
        rng: &mut ChaCha8Rng,
    ) -> SelectionEvent;
}

struct LexicaseSelector;
struct EpsilonLexicaseSelector;
struct TournamentSelector;

impl Selector for LexicaseSelector {
    fn name(&self) -> &'static str {
        "lexicase"
    }
    fn select(
        &self,
        pop: &Population,
        pool: &[usize],
        _cfg: &SelectionConfig,
        rng: &mut ChaCha8Rng,
    ) -> SelectionEvent {
        lexicase_select(pop, pool, rng)
    }
}

impl Selector for EpsilonLexicaseSelector {
    fn name(&self) -> &'static str {
        "epsilon-lexicase"
    }
    fn select(
        &self,
        pop: &Population,
        pool: &[usize],
        cfg: &SelectionConfig,
        rng: &mut ChaCha8Rng,
    ) -> SelectionEvent {
        epsilon_lexicase_select(pop, pool, cfg.epsilon_mode, cfg.epsilon, rng)
    }
}

impl Selector for TournamentSelector {
    fn name(&self) -> &'static str {
        "tournament"
    }
    fn select(
        &self,
        pop: &Population,
        pool: &[usize],
        cfg: &SelectionConfig,
        rng: &mut ChaCha8Rng,
    ) -> SelectionEvent {
        tournament_select(pop, pool, cfg.tournament_size, rng)
    }
}

static SELECTORS: &[&dyn Selector] = &[&LexicaseSelector, &EpsilonLexicaseSelector, &TournamentSelector];

/// The registered selector for `method`.
pub fn selector_for(method: SelectionMethod) -> &'static dyn Selector {
    selector_by_name(method.name()).expect("every method is registered")
}

/// Looks a selector up by its registry name.
pub fn selector_by_name(name: &str) -> Option<&'static dyn Selector> {
    SELECTORS.iter().copied().find(|s| s.name() == name)
}

pub fn available_selectors() -> Vec<&'static str> {
    SELECTORS.iter().map(|s| s.name()).collect()
}

/// Collapses duplicate error vectors: one uniformly drawn representative per
/// distinct vector (bitwise equality), groups emitted in first-occurrence
/// order. Draws randomness only for groups with more than one member.
pub fn preselect_dedup(pop: &Population, pool: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    use rand::Rng;
    let mut group_of: HashMap<Vec<u64>, usize> = HashMap::with_capacity(pool.len());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &idx in pool {
        let key = pop[idx].errors.bit_key();
        match group_of.get(&key) {
            Some(&g) => groups[g].push(idx),
            None => {
                group_of.insert(key, groups.len());
                groups.push(vec![idx]);
            }
        }
    }
    groups
        .into_iter()
        .map(|members| {
            if members.len() == 1 {
                members[0]
            } else {
                members[rng.gen_range(0..members.len())]
            }
        })
        .collect()
}
