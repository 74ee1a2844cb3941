//! Executes an experiment plan: one directory per cell, one JSON record per
//! run, resumable by re-reading what is already on disk.

use std::fs;
use std::path::{Path, PathBuf};

use lexilab::engine::{evolve, EngineConfig, RunResult, VariationRates};
use lexilab::problems::{make_problem, ProblemSpec};
use lexilab::rng::derive_seed;
use lexilab::selection::SelectionConfig;
use lexilab::survival::SurvivalConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::plan::{selection_label, ExperimentPlan};
use crate::summary::{summarize, ExperimentSummary};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

/// One point of the plan's cross product.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub problem: ProblemSpec,
    pub selection: SelectionConfig,
    pub label: String,
    pub rate: f64,
}

/// What gets persisted for a single run: the cell coordinates plus the
/// engine's full result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub schema_version: u32,
    pub problem: ProblemSpec,
    pub selection: SelectionConfig,
    pub selection_label: String,
    pub rate: f64,
    pub replicate: usize,
    pub run_seed: u64,
    pub result: RunResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellFailure {
    pub cell: String,
    pub replicate: usize,
    pub error: String,
}

pub struct RunOutcome {
    pub summary: ExperimentSummary,
    pub failures: Vec<CellFailure>,
    pub executed: usize,
    pub skipped: usize,
}

pub fn cells_of(plan: &ExperimentPlan) -> Vec<Cell> {
    let mut cells = Vec::new();
    for problem in &plan.problems {
        for selection in &plan.selections {
            for &rate in &plan.survival_rates {
                cells.push(Cell {
                    problem: problem.clone(),
                    selection: selection.clone(),
                    label: selection_label(selection),
                    rate,
                });
            }
        }
    }
    cells
}

fn fmt_rate(rate: f64) -> String {
    if rate.fract() == 0.0 {
        format!("{}", rate as i64)
    } else {
        format!("{rate}")
    }
}

pub fn cell_dir(out_dir: &Path, cell: &Cell) -> PathBuf {
    out_dir.join(format!(
        "{}__{}__rate-{}",
        cell.problem.name,
        cell.label,
        fmt_rate(cell.rate)
    ))
}

pub fn run_path(out_dir: &Path, cell: &Cell, replicate: usize) -> PathBuf {
    cell_dir(out_dir, cell).join(format!("run-{replicate:03}.json"))
}

/// FNV-1a; a stable hash so seed derivation never depends on std's
/// randomized hasher.
fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Stream-domain tag for run seeds (ASCII "RUN").
const RUN_SEED_TAG: u64 = 0x52_554e;

/// Pure function of the base seed and the cell coordinates; no state, no
/// cross-cell coupling.
pub fn run_seed(base_seed: u64, cell: &Cell, replicate: usize) -> u64 {
    derive_seed(
        base_seed,
        &[
            RUN_SEED_TAG,
            fnv1a(&cell.problem.name),
            cell.problem.seed,
            fnv1a(&cell.label),
            cell.rate.to_bits(),
            replicate as u64,
        ],
    )
}

fn engine_config(plan: &ExperimentPlan, cell: &Cell, seed: u64) -> EngineConfig {
    EngineConfig {
        population_size: plan.population_size,
        max_generations: plan.max_generations,
        selection: cell.selection.clone(),
        survival: SurvivalConfig { rate: cell.rate },
        variation: VariationRates::default(),
        seed,
    }
}

/// A persisted record is reusable only if it describes exactly the run the
/// plan would perform in its place.
fn matches_task(record: &RunRecord, plan: &ExperimentPlan, cell: &Cell, replicate: usize) -> bool {
    record.schema_version == RECORD_SCHEMA_VERSION
        && record.problem == cell.problem
        && record.selection == cell.selection
        && record.rate == cell.rate
        && record.replicate == replicate
        && record.run_seed == run_seed(plan.base_seed, cell, replicate)
        && record.result.config == engine_config(plan, cell, record.run_seed)
}

fn load_record(path: &Path) -> Option<RunRecord> {
    let text = fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn execute(plan: &ExperimentPlan, cell: &Cell, replicate: usize) -> anyhow::Result<RunRecord> {
    let seed = run_seed(plan.base_seed, cell, replicate);
    let problem = make_problem(&cell.problem)?;
    let result = evolve(problem.as_ref(), &engine_config(plan, cell, seed))?;
    Ok(RunRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        problem: cell.problem.clone(),
        selection: cell.selection.clone(),
        selection_label: cell.label.clone(),
        rate: cell.rate,
        replicate,
        run_seed: seed,
        result,
    })
}

fn persist(path: &Path, record: &RunRecord) -> anyhow::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string(record)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs every cell x replicate not already on disk, persists each result,
/// and computes the summary over everything. Failures are collected per
/// run and never abort sibling cells.
pub fn run_experiment(plan: &ExperimentPlan) -> anyhow::Result<RunOutcome> {
    plan.validate()?;
    fs::create_dir_all(&plan.out_dir)?;

    let cells = cells_of(plan);
    for cell in &cells {
        fs::create_dir_all(cell_dir(&plan.out_dir, cell))?;
    }

    enum Task {
        Done(Box<RunRecord>),
        Pending { cell_index: usize, replicate: usize },
    }
    let mut tasks = Vec::with_capacity(cells.len() * plan.replicates);
    for (cell_index, cell) in cells.iter().enumerate() {
        for replicate in 0..plan.replicates {
            let path = run_path(&plan.out_dir, cell, replicate);
            match load_record(&path) {
                Some(rec) if matches_task(&rec, plan, cell, replicate) => {
                    tasks.push(Task::Done(Box::new(rec)));
                }
                _ => tasks.push(Task::Pending {
                    cell_index,
                    replicate,
                }),
            }
        }
    }
    let skipped = tasks.iter().filter(|t| matches!(t, Task::Done(_))).count();
    let executed = tasks.len() - skipped;

    let outcomes: Vec<Result<RunRecord, CellFailure>> = tasks
        .into_par_iter()
        .map(|task| match task {
            Task::Done(rec) => Ok(*rec),
            Task::Pending {
                cell_index,
                replicate,
            } => {
                let cell = &cells[cell_index];
                execute(plan, cell, replicate)
                    .and_then(|rec| {
                        persist(&run_path(&plan.out_dir, cell, replicate), &rec)?;
                        Ok(rec)
                    })
                    .map_err(|e| CellFailure {
                        cell: cell_dir(&plan.out_dir, cell)
                            .file_name()
                            .unwrap()
                            .to_string_lossy()
                            .into_owned(),
                        replicate,
                        error: format!("{e:#}"),
                    })
            }
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(rec) => records.push(rec),
            Err(f) => failures.push(f),
        }
    }

    let summary = summarize(plan, &records);
    fs::write(
        plan.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    fs::write(plan.out_dir.join("runs.csv"), runs_csv(&records))?;

    Ok(RunOutcome {
        summary,
        failures,
        executed,
        skipped,
    })
}

/// Re-reads every persisted record for the plan and recomputes the summary;
/// runs nothing.
pub fn analyze_experiment(plan: &ExperimentPlan) -> anyhow::Result<ExperimentSummary> {
    plan.validate()?;
    let mut records = Vec::new();
    for cell in cells_of(plan) {
        for replicate in 0..plan.replicates {
            let path = run_path(&plan.out_dir, &cell, replicate);
            if let Some(rec) = load_record(&path) {
                if matches_task(&rec, plan, &cell, replicate) {
                    records.push(rec);
                }
            }
        }
    }
    Ok(summarize(plan, &records))
}

/// One roll-up row per run.
pub fn runs_csv(records: &[RunRecord]) -> String {
    let mut rows: Vec<&RunRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        (&a.problem.name, &a.selection_label, a.rate, a.replicate)
            .partial_cmp(&(&b.problem.name, &b.selection_label, b.rate, b.replicate))
            .unwrap()
    });
    let mut out = String::from(
        "problem,selection,rate,replicate,run_seed,solution_generation,train_pass,generalizes,final_best_total_error,final_diversity,generations\n",
    );
    for r in rows {
        let final_gen = r.result.generations.last().expect("at least generation 0");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.problem.name,
            r.selection_label,
            fmt_rate(r.rate),
            r.replicate,
            r.run_seed,
            r.result
                .solution_generation
                .map(|g| g.to_string())
                .unwrap_or_default(),
            r.result.train_pass,
            r.result.generalizes,
            r.result.final_best_total_error,
            final_gen.behavioral_diversity,
            r.result.generations.len(),
        ));
    }
    out
}
