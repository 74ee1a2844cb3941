use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lexilab::analytics::removed_selection_probability;
use lexilab::selection::oracle::{
    exact_epsilon_mad_distribution, exact_lexicase_distribution,
};

use lexilab_cli::plan::{ExperimentPlan, Profile};
use lexilab_cli::plots::emit_plot_data;
use lexilab_cli::runner::{analyze_experiment, run_experiment};

#[derive(Parser)]
#[command(
    name = "lexilab",
    about = "Run and analyze parent-selection experiments over benchmark problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute an experiment plan (resumes completed runs from disk)
    Run(RunArgs),
    /// Recompute the summary from persisted run files without running
    Analyze(PlanArgs),
    /// Print the analytical probability that a size-t tournament selects an
    /// individual an elitist survival filter would have removed
    Table2(Table2Args),
    /// Exact lexicase selection probabilities for an error-matrix file
    Oracle(OracleArgs),
    /// Emit figure CSVs and SVGs from a completed experiment's summary
    Plot(OutArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Plan file (JSON). Without it, a default plan for --profile is used.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Base seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment scale used when no plan file is given.
    #[arg(long, value_enum, default_value_t = ProfileArg::Desk)]
    profile: ProfileArg,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    plan: PlanArgs,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct Table2Args {
    /// Population size.
    #[arg(long, default_value_t = 1000)]
    pop: usize,
    /// Tournament size.
    #[arg(long, default_value_t = 7)]
    tournament: u32,
}

#[derive(Args)]
struct OracleArgs {
    /// JSON file holding an error matrix: one row of per-case errors per
    /// individual.
    #[arg(long)]
    matrix: PathBuf,
    /// Fixed epsilon applied to every case.
    #[arg(long, conflicts_with = "mad")]
    epsilon: Option<f64>,
    /// Per-case epsilon from the median absolute deviation.
    #[arg(long)]
    mad: bool,
}

#[derive(Args)]
struct OutArgs {
    /// Experiment output directory containing summary.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Desk,
    Paper,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Profile {
        match p {
            ProfileArg::Desk => Profile::Desk,
            ProfileArg::Paper => Profile::Paper,
        }
    }
}

fn resolve_plan(args: &PlanArgs) -> anyhow::Result<ExperimentPlan> {
    let mut plan = match &args.plan {
        Some(path) => ExperimentPlan::load(path)
            .with_context(|| format!("loading plan {}", path.display()))?,
        None => {
            let out = args
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("lexilab-out"));
            Profile::from(args.profile).default_plan(args.seed.unwrap_or(1), out)
        }
    };
    if let Some(seed) = args.seed {
        plan.base_seed = seed;
    }
    if let Some(out) = &args.out {
        plan.out_dir = out.clone();
    }
    plan.validate()?;
    Ok(plan)
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run(args) => {
            let plan = resolve_plan(&args.plan)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(args.jobs)
                .build()?;
            let outcome = pool.install(|| run_experiment(&plan))?;
            eprintln!(
                "executed {} runs, reused {} from disk; summary: {}",
                outcome.executed,
                outcome.skipped,
                plan.out_dir.join("summary.json").display()
            );
            for cell in &outcome.summary.cells {
                println!(
                    "{} {} rate {}: {}/{} solved",
                    cell.problem, cell.selection, cell.rate, cell.successes, cell.replicates
                );
            }
            if !outcome.failures.is_empty() {
                for f in &outcome.failures {
                    eprintln!("FAILED {} replicate {}: {}", f.cell, f.replicate, f.error);
                }
                std::process::exit(1);
            }
        }
        Cmd::Analyze(args) => {
            let plan = resolve_plan(&args)?;
            let summary = analyze_experiment(&plan)?;
            let path = plan.out_dir.join("summary.json");
            std::fs::write(&path, serde_json::to_string_pretty(&summary)?)?;
            eprintln!("recomputed {}", path.display());
            for cell in &summary.cells {
                println!(
                    "{} {} rate {}: {}/{} solved",
                    cell.problem, cell.selection, cell.rate, cell.successes, cell.replicates
                );
            }
        }
        Cmd::Table2(args) => {
            anyhow::ensure!(args.pop >= 1, "population must be positive");
            anyhow::ensure!(args.tournament >= 1, "tournament size must be positive");
            println!("rate,removed_selection_probability");
            for k in 1..=10 {
                let rate = k as f64 * 10.0;
                let kept = (rate * args.pop as f64 / 100.0).round() as usize;
                let p = removed_selection_probability(args.pop, args.tournament, kept);
                println!("{rate},{p:.10e}");
            }
        }
        Cmd::Oracle(args) => {
            let text = std::fs::read_to_string(&args.matrix)
                .with_context(|| format!("reading {}", args.matrix.display()))?;
            let errors: Vec<Vec<f64>> = serde_json::from_str(&text)?;
            anyhow::ensure!(!errors.is_empty(), "matrix has no rows");
            let cases = errors[0].len();
            anyhow::ensure!(cases >= 1, "matrix has no columns");
            anyhow::ensure!(
                errors.iter().all(|row| row.len() == cases),
                "ragged matrix"
            );
            let dist = if args.mad {
                exact_epsilon_mad_distribution(&errors)
            } else {
                let eps = vec![args.epsilon.unwrap_or(0.0); cases];
                exact_lexicase_distribution(&errors, &eps)
            };
            println!("individual,probability");
            for (i, p) in dist.iter().enumerate() {
                println!("{i},{p:.10}");
            }
        }
        Cmd::Plot(args) => {
            let text = std::fs::read_to_string(args.out.join("summary.json"))
                .with_context(|| format!("no summary.json under {}", args.out.display()))?;
            let summary = serde_json::from_str(&text)?;
            let files = emit_plot_data(&summary, &args.out)?;
            for f in files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}
