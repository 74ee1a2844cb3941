//! Temporary diagnostic: evolve and dump the best survivor's code and errors.

use lexilab::engine::{init_population, EngineConfig, VariationRates};
use lexilab::individual::Individual;
use lexilab::problems::{evaluate, make_problem, ProblemSpec};
use lexilab::rng::{stream, tag};
use lexilab::selection::{preselect_dedup, selector_for, SelectionConfig, SelectionMethod};
use lexilab::survival::{elitist_survive, SurvivalConfig};
use lexilab::value::Output;
use rand::Rng;

fn main() {
    let seed: u64 = std::env::args().nth(1).unwrap().parse().unwrap();
    let gens: usize = std::env::args().nth(2).unwrap().parse().unwrap();
    let spec = ProblemSpec::new("last-index-of-zero", seed);
    let problem = make_problem(&spec).unwrap();
    let cfg = EngineConfig {
        population_size: 200,
        max_generations: gens,
        selection: SelectionConfig::new(SelectionMethod::Lexicase),
        survival: SurvivalConfig { rate: 100.0 },
        variation: VariationRates::default(),
        seed,
    };
    let mut pop = init_population(problem.as_ref(), &cfg);
    let selector = selector_for(cfg.selection.method);
    for gen in 0..cfg.max_generations {
        let g = gen as u64;
        let survivors = {
            let mut rng = stream(cfg.seed, &[tag::SURVIVAL, g]);
            elitist_survive(&pop, &cfg.survival, &mut rng)
        };
        let pool = {
            let mut rng = stream(cfg.seed, &[tag::DEDUP, g]);
            preselect_dedup(&pop, &survivors, &mut rng)
        };
        let mut children = Vec::with_capacity(cfg.population_size);
        for child in 0..cfg.population_size {
            let mut vrng = stream(cfg.seed, &[tag::CHILD, g, child as u64]);
            let draw: f64 = vrng.gen();
            let slot = 2 * child as u64;
            let pick = |s: u64| {
                let mut rng = stream(cfg.seed, &[tag::EVENT, g, s]);
                selector.select(&pop, &pool, &cfg.selection, &mut rng).selected
            };
            let genome = if draw < 0.5 {
                let (a, b) = (pick(slot), pick(slot + 1));
                let x = problem.crossover(&pop[a].genome, &pop[b].genome, &mut vrng);
                problem.point_mutate(&x, &mut vrng)
            } else if draw < 0.7 {
                problem.point_mutate(&pop[pick(slot)].genome, &mut vrng)
            } else if draw < 0.9 {
                let (a, b) = (pick(slot), pick(slot + 1));
                problem.crossover(&pop[a].genome, &pop[b].genome, &mut vrng)
            } else {
                problem.structural_mutate(&pop[pick(slot)].genome, &mut vrng)
            };
            children.push(genome);
        }
        pop = lexilab::individual::Population(
            children
                .into_iter()
                .map(|genome| {
                    let (errors, behavior) = evaluate(problem.as_ref(), &genome);
                    Individual { genome, errors, behavior }
                })
                .collect(),
        );
        if pop.best_total() == 0.0 {
            println!("solved at gen {}", gen + 1);
            break;
        }
    }
    let mut with_eq = 0;
    let mut with_skip = 0;
    let mut with_eq_skip = 0;
    let mut with_loop = 0;
    let mut lens = Vec::new();
    for ind in pop.iter() {
        let code = &ind.genome.as_micro_vm().unwrap().code;
        lens.push(code.len());
        use lexilab::problems::Op;
        let has = |f: &dyn Fn(&Op) -> bool| code.iter().any(|op| f(op));
        if has(&|op| matches!(op, Op::Eq)) {
            with_eq += 1;
        }
        if has(&|op| matches!(op, Op::SkipIfFalse(_))) {
            with_skip += 1;
        }
        if code
            .windows(2)
            .any(|w| matches!((&w[0], &w[1]), (Op::Eq, Op::SkipIfFalse(_))))
        {
            with_eq_skip += 1;
        }
        if has(&|op| matches!(op, Op::LoopBegin(_))) {
            with_loop += 1;
        }
    }
    lens.sort_unstable();
    println!(
        "final pop: eq {with_eq}  skip {with_skip}  eq+skip {with_eq_skip}  loop {with_loop}  median len {}",
        lens[lens.len() / 2]
    );

    let best = pop
        .iter()
        .min_by(|a, b| a.total_error().total_cmp(&b.total_error()))
        .unwrap();
    println!("best total {}", best.total_error());
    println!("code: {:?}", best.genome);
    println!("errors: {:?}", best.errors.0);
    let cases = problem.training_cases();
    for (i, case) in cases.iter().enumerate() {
        if best.errors[i] != 0.0 {
            let got = problem.run(&best.genome, &case.inputs);
            let out = match &got {
                Output::Failure => "failure".to_string(),
                Output::Value(v) => format!("{v:?}"),
            };
            println!("  case {i}: input {:?} expected {:?} got {out}", case.inputs, case.expected);
        }
    }
}
