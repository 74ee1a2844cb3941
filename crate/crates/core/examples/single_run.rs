//! Runs one evolution and prints a per-generation digest plus the outcome.
//!
//!     cargo run --release --example single_run -- [problem] [method] [seed] [pop] [gens] [rate]

use lexilab::engine::{evolve, EngineConfig, VariationRates};
use lexilab::problems::{make_problem, ProblemSpec};
use lexilab::selection::{SelectionConfig, SelectionMethod};
use lexilab::survival::SurvivalConfig;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let problem_name = args.get(1).map(String::as_str).unwrap_or("last-index-of-zero");
    let method = match args.get(2).map(String::as_str).unwrap_or("lexicase") {
        "lexicase" => SelectionMethod::Lexicase,
        "epsilon-lexicase" => SelectionMethod::EpsilonLexicase,
        "tournament" => SelectionMethod::Tournament,
        other => panic!("unknown method {other}"),
    };
    let seed: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1);
    let pop: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(200);
    let gens: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(100);
    let rate: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(100.0);
    let variation = match args.get(7).map(String::as_str) {
        Some(quad) => {
            let r: Vec<f64> = quad.split(',').map(|s| s.parse().unwrap()).collect();
            VariationRates {
                crossover_then_mutation: r[0],
                mutation_only: r[1],
                crossover_only: r[2],
                structural_mutation: r[3],
            }
        }
        None => VariationRates::default(),
    };

    let spec = ProblemSpec::new(problem_name, seed);
    let problem = make_problem(&spec).expect("known problem");
    let cfg = EngineConfig {
        population_size: pop,
        max_generations: gens,
        selection: SelectionConfig::new(method),
        survival: SurvivalConfig { rate },
        variation,
        seed,
    };

    let start = std::time::Instant::now();
    let result = evolve(problem.as_ref(), &cfg).expect("valid config");
    for m in &result.generations {
        println!(
            "gen {:3}  best {:10.1}  diversity {:.3}  bottom-half {}",
            m.generation,
            m.best_total_error,
            m.behavioral_diversity,
            m.bottom_half_selection_rate
                .map(|r| format!("{r:.4}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    println!(
        "solved: {:?}  train_pass: {}  generalizes: {}  elapsed: {:?}",
        result.solution_generation,
        result.train_pass,
        result.generalizes,
        start.elapsed()
    );
}
