//! Lexicase and epsilon-lexicase selection.
//!
//! One shared filtering loop serves both: plain lexicase is the epsilon = 0
//! special case, so the two methods consume randomness identically and
//! epsilon-specific behavior is confined to the threshold computation.

use super::{SelectionEvent, Termination};
use crate::individual::Population;
use crate::selection::EpsilonMode;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

enum EpsilonSpec {
    Zero,
    Fixed(f64),
    /// Per-case MAD of the entering pool, computed on first use of each case
    /// and reused for the rest of the event.
    MadLazy,
}

/// Plain lexicase: shuffle the cases, repeatedly keep only candidates elite
/// on the current case, stop at a single survivor or after the last case
/// (then pick uniformly among the survivors).
pub fn lexicase_select(pop: &Population, pool: &[usize], rng: &mut ChaCha8Rng) -> SelectionEvent {
    lexicase_core(pop, pool, EpsilonSpec::Zero, rng)
}

/// Epsilon-lexicase: same loop, but a filter step keeps candidates with
/// error at most (current pool minimum on the case) + epsilon.
pub fn epsilon_lexicase_select(
    pop: &Population,
    pool: &[usize],
    mode: EpsilonMode,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> SelectionEvent {
    let spec = match mode {
        EpsilonMode::Fixed => EpsilonSpec::Fixed(epsilon),
        EpsilonMode::MadPerCase => EpsilonSpec::MadLazy,
    };
    lexicase_core(pop, pool, spec, rng)
}

fn lexicase_core(
    pop: &Population,
    pool: &[usize],
    eps: EpsilonSpec,
    rng: &mut ChaCha8Rng,
) -> SelectionEvent {
    assert!(!pool.is_empty(), "selection needs a non-empty pool");
    let num_cases = pop[pool[0]].errors.len();
    debug_assert!(pool
        .iter()
        .all(|&i| pop[i].errors.len() == num_cases));

    // A pool of one is already decided; no cases are consulted and no
    // randomness is drawn.
    if pool.len() == 1 {
        return SelectionEvent {
            selected: pool[0],
            cases_considered: 0,
            cases_used: vec![],
            pool_size_trace: vec![1],
            terminated_by: Termination::SingleSurvivor,
        };
    }

    let mut order: Vec<usize> = (0..num_cases).collect();
    order.shuffle(rng);

    let mut mad_cache: Vec<Option<f64>> = match eps {
        EpsilonSpec::MadLazy => vec![None; num_cases],
        _ => Vec::new(),
    };

    let mut candidates: Vec<usize> = pool.to_vec();
    let mut trace = vec![candidates.len()];
    let mut used = Vec::with_capacity(num_cases);

    for &case in &order {
        let epsilon = match &eps {
            EpsilonSpec::Zero => 0.0,
            EpsilonSpec::Fixed(e) => *e,
            EpsilonSpec::MadLazy => *mad_cache[case]
                .get_or_insert_with(|| mad(pool.iter().map(|&i| pop[i].errors[case]))),
        };
        let min = candidates
            .iter()
            .map(|&i| pop[i].errors[case])
            .fold(f64::INFINITY, f64::min);
        let threshold = min + epsilon;
        candidates.retain(|&i| pop[i].errors[case] <= threshold);
        used.push(case);
        trace.push(candidates.len());
        if candidates.len() == 1 {
            return SelectionEvent {
                selected: candidates[0],
                cases_considered: used.len(),
                cases_used: used,
                pool_size_trace: trace,
                terminated_by: Termination::SingleSurvivor,
            };
        }
    }

    // Cases exhausted with several equally eligible candidates left.
    let selected = candidates[rng.gen_range(0..candidates.len())];
    SelectionEvent {
        selected,
        cases_considered: used.len(),
        cases_used: used,
        pool_size_trace: trace,
        terminated_by: Termination::CasesExhausted,
    }
}

/// Per-case epsilons for MAD mode: the median absolute deviation of the
/// entering pool's errors on each case (median of an even count is the mean
/// of the middle two).
pub fn mad_epsilons(pop: &Population, pool: &[usize]) -> Vec<f64> {
    let num_cases = if pool.is_empty() {
        0
    } else {
        pop[pool[0]].errors.len()
    };
    (0..num_cases)
        .map(|case| mad(pool.iter().map(|&i| pop[i].errors[case])))
        .collect()
}

fn mad(values: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = values.collect();
    let med = median(xs.clone());
    median(xs.into_iter().map(|x| (x - med).abs()).collect())
}

fn median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}
