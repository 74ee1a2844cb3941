//! Samples each selector many times and compares the observed selection
//! frequencies with exact distributions from the enumeration oracles.

use lexilab::individual::{ErrorVector, Individual, Population};
use lexilab::problems::Genome;
use lexilab::rng::{stream, tag};
use lexilab::selection::oracle::{
    exact_epsilon_mad_distribution, exact_lexicase_distribution, exact_tournament_distribution,
};
use lexilab::selection::{
    selector_by_name, EpsilonMode, SelectionConfig, SelectionMethod, Termination,
};

fn pop_from(rows: &[Vec<f64>]) -> Population {
    Population(
        rows.iter()
            .map(|errors| Individual {
                genome: Genome::placeholder(),
                errors: ErrorVector(errors.clone()),
                behavior: Vec::new(),
            })
            .collect(),
    )
}

/// Draws `n` selections, each from its own derived event stream exactly as
/// the engine does, and returns per-individual frequencies.
fn sample(pop: &Population, cfg: &SelectionConfig, n: usize, seed: u64) -> Vec<f64> {
    let selector = selector_by_name(cfg.method.name()).expect("registered");
    let pool: Vec<usize> = (0..pop.len()).collect();
    let mut counts = vec![0usize; pop.len()];
    for i in 0..n {
        let mut rng = stream(seed, &[tag::EVENT, 0, i as u64]);
        let event = selector.select(pop, &pool, cfg, &mut rng);
        counts[event.selected] += 1;
    }
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

/// Binomial four-sigma band around each exact probability. A fixed seed makes
/// the draw deterministic, so this is a one-time check, not a flaky gamble.
fn assert_matches(observed: &[f64], exact: &[f64], n: usize, label: &str) {
    assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    for (i, (&obs, &want)) in observed.iter().zip(exact).enumerate() {
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        let band = 4.0 * sigma + 1e-9;
        assert!(
            (obs - want).abs() <= band,
            "{label}: individual {i} observed {obs}, exact {want}, band {band}"
        );
    }
}

const N: usize = 100_000;

#[test]
fn lexicase_frequencies_match_enumeration() {
    let rows = vec![
        vec![0.0, 10.0, 5.0, 1.0],
        vec![10.0, 0.0, 5.0, 1.0],
        vec![5.0, 5.0, 0.0, 9.0],
        vec![2.0, 2.0, 2.0, 0.0],
        vec![0.0, 0.0, 7.0, 7.0],
    ];
    let pop = pop_from(&rows);
    let mut cfg = SelectionConfig::new(SelectionMethod::Lexicase);
    cfg.preselect_dedup = Some(false);
    let observed = sample(&pop, &cfg, N, 71);
    let exact = exact_lexicase_distribution(&rows, &[0.0; 4]);
    assert_matches(&observed, &exact, N, "plain lexicase");
}

#[test]
fn lexicase_two_specialists_split_evenly() {
    // One individual elite on each case; the all-around runner-up never wins.
    let rows = vec![vec![0.0, 10.0], vec![10.0, 0.0], vec![5.0, 5.0]];
    let pop = pop_from(&rows);
    let mut cfg = SelectionConfig::new(SelectionMethod::Lexicase);
    cfg.preselect_dedup = Some(false);
    let observed = sample(&pop, &cfg, N, 5);
    assert_matches(&observed, &[0.5, 0.5, 0.0], N, "specialist split");
}

#[test]
fn fixed_epsilon_widens_the_elite_set() {
    let rows = vec![
        vec![0.0, 4.0],
        vec![0.5, 3.8],
        vec![3.0, 0.0],
        vec![2.9, 0.4],
    ];
    let pop = pop_from(&rows);
    let mut cfg = SelectionConfig::new(SelectionMethod::EpsilonLexicase);
    cfg.epsilon_mode = EpsilonMode::Fixed;
    cfg.epsilon = 0.5;
    cfg.preselect_dedup = Some(false);
    let observed = sample(&pop, &cfg, N, 17);
    let exact = exact_lexicase_distribution(&rows, &[0.5, 0.5]);
    assert_matches(&observed, &exact, N, "fixed epsilon");
    // Every near-elite must actually win sometimes under the relaxation.
    assert!(observed.iter().all(|&f| f > 0.0));
}

#[test]
fn mad_epsilon_frequencies_match_enumeration() {
    let rows = vec![
        vec![0.0, 9.0, 3.0],
        vec![1.0, 7.0, 3.5],
        vec![10.0, 0.0, 4.0],
        vec![11.0, 1.0, 0.0],
        vec![4.0, 4.0, 0.5],
    ];
    let pop = pop_from(&rows);
    let mut cfg = SelectionConfig::new(SelectionMethod::EpsilonLexicase);
    cfg.epsilon_mode = EpsilonMode::MadPerCase;
    cfg.preselect_dedup = Some(false);
    let observed = sample(&pop, &cfg, N, 23);
    let exact = exact_epsilon_mad_distribution(&rows);
    assert_matches(&observed, &exact, N, "mad epsilon");
}

#[test]
fn tournament_frequencies_match_closed_form() {
    let totals = [3.0, 1.0, 9.0, 4.0, 4.0, 12.0, 0.5, 7.0, 2.0, 6.0];
    let rows: Vec<Vec<f64>> = totals.iter().map(|&t| vec![t]).collect();
    let pop = pop_from(&rows);
    let mut cfg = SelectionConfig::new(SelectionMethod::Tournament);
    cfg.tournament_size = 3;
    let observed = sample(&pop, &cfg, N, 41);
    let exact = exact_tournament_distribution(&totals, 3);
    assert_matches(&observed, &exact, N, "tournament t=3");
}

#[test]
fn tournament_tie_mass_splits_among_tied_individuals() {
    let totals = [2.0, 2.0, 5.0];
    let rows: Vec<Vec<f64>> = totals.iter().map(|&t| vec![t]).collect();
    let pop = pop_from(&rows);
    let mut cfg = SelectionConfig::new(SelectionMethod::Tournament);
    cfg.tournament_size = 2;
    let observed = sample(&pop, &cfg, N, 43);
    let exact = exact_tournament_distribution(&totals, 2);
    assert_matches(&observed, &exact, N, "tournament tie split");
    assert!((exact[0] - 4.0 / 9.0).abs() < 1e-15);
    assert!((exact[2] - 1.0 / 9.0).abs() < 1e-15);
}

#[test]
fn tournament_ignores_per_case_structure() {
    // Permuting case columns must leave tournament frequencies unchanged.
    let rows_a = vec![
        vec![1.0, 5.0, 0.0],
        vec![2.0, 0.0, 1.0],
        vec![0.0, 0.5, 6.0],
        vec![3.0, 3.0, 3.0],
    ];
    let rows_b: Vec<Vec<f64>> = rows_a
        .iter()
        .map(|r| vec![r[2], r[0], r[1]])
        .collect();
    let mut cfg = SelectionConfig::new(SelectionMethod::Tournament);
    cfg.tournament_size = 4;
    let a = sample(&pop_from(&rows_a), &cfg, N, 47);
    let b = sample(&pop_from(&rows_b), &cfg, N, 47);
    assert_eq!(a, b);
}

#[test]
fn selection_event_traces_are_well_formed() {
    let rows = vec![
        vec![0.0, 10.0, 5.0],
        vec![10.0, 0.0, 5.0],
        vec![5.0, 5.0, 0.0],
        vec![0.0, 10.0, 5.0],
    ];
    let pop = pop_from(&rows);
    let pool: Vec<usize> = (0..pop.len()).collect();
    let cfg = SelectionConfig::new(SelectionMethod::Lexicase);
    let selector = selector_by_name("lexicase").unwrap();
    for i in 0..2_000u64 {
        let mut rng = stream(3, &[tag::EVENT, 0, i]);
        let event = selector.select(&pop, &pool, &cfg, &mut rng);
        let trace = &event.pool_size_trace;
        assert!(trace.windows(2).all(|w| w[1] <= w[0]), "{trace:?}");
        assert_eq!(event.cases_used.len(), event.cases_considered);
        match event.terminated_by {
            Termination::SingleSurvivor => assert_eq!(*trace.last().unwrap(), 1),
            Termination::CasesExhausted | Termination::RandomAmongSurvivors => {
                assert!(*trace.last().unwrap() > 1)
            }
        }
    }
}
