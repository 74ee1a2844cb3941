//! Tournament selection on total error.

use super::{SelectionEvent, Termination};
use crate::individual::Population;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Draws `size` contestants uniformly with replacement and returns the one
/// with the lowest total error; exact ties on the minimum are broken
/// uniformly among the distinct tied individuals.
///
/// The trace records [entering pool, contestants drawn, tied at minimum].
/// Total error uses every case, so the event counts all cases as considered.
pub fn tournament_select(
    pop: &Population,
    pool: &[usize],
    size: usize,
    rng: &mut ChaCha8Rng,
) -> SelectionEvent {
    assert!(!pool.is_empty(), "selection needs a non-empty pool");
    assert!(size >= 1, "tournament size must be at least 1");
    // Config validation bounds size by the population; a pool shrunk below
    // that (deduplication) clamps the tournament instead of failing.
    let size = size.min(pool.len());

    let contestants: Vec<usize> = (0..size)
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect();
    let min_total = contestants
        .iter()
        .map(|&i| pop[i].total_error())
        .fold(f64::INFINITY, f64::min);

    let mut tied: Vec<usize> = Vec::with_capacity(size);
    for &i in &contestants {
        if pop[i].total_error() == min_total && !tied.contains(&i) {
            tied.push(i);
        }
    }

    let (selected, terminated_by) = if tied.len() == 1 {
        (tied[0], Termination::SingleSurvivor)
    } else {
        (
            tied[rng.gen_range(0..tied.len())],
            Termination::RandomAmongSurvivors,
        )
    };

    let num_cases = pop[pool[0]].errors.len();
    SelectionEvent {
        selected,
        cases_considered: num_cases,
        cases_used: (0..num_cases).collect(),
        pool_size_trace: vec![pool.len(), size, tied.len()],
        terminated_by,
    }
}
