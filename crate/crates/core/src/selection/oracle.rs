//! Exact selection distributions for small pools.
//!
//! These enumerate outcomes instead of sampling, so tests (and the `oracle`
//! CLI command) can compare the stochastic implementations against ground
//! truth. The filtering logic here is deliberately written from scratch and
//! shares no code with the samplers it checks.

/// Exact win probability per individual under lexicase selection, by
/// enumerating every case ordering. `epsilons[c]` widens the elite band on
/// case `c`; pass an empty slice (or zeros) for plain lexicase.
///
/// Enumeration is factorial in the number of cases; capped at 9.
pub fn exact_lexicase_distribution(errors: &[Vec<f64>], epsilons: &[f64]) -> Vec<f64> {
    let n = errors.len();
    assert!(n > 0, "empty pool");
    let m = errors[0].len();
    assert!(errors.iter().all(|e| e.len() == m), "ragged error matrix");
    assert!(m <= 9, "case permutation count explodes past 9 cases");
    assert!(
        epsilons.is_empty() || epsilons.len() == m,
        "need one epsilon per case"
    );

    let mut probs = vec![0.0; n];
    let mut perm: Vec<usize> = (0..m).collect();
    let mut total_orders = 0u64;
    enumerate_permutations(&mut perm, 0, &mut |order| {
        total_orders += 1;
        let mut alive: Vec<usize> = (0..n).collect();
        for &case in order {
            if alive.len() <= 1 {
                break;
            }
            let eps = epsilons.get(case).copied().unwrap_or(0.0);
            let mut min = f64::INFINITY;
            for &i in &alive {
                min = min.min(errors[i][case]);
            }
            alive.retain(|&i| errors[i][case] <= min + eps);
        }
        let share = 1.0 / alive.len() as f64;
        for &i in &alive {
            probs[i] += share;
        }
    });
    for p in &mut probs {
        *p /= total_orders as f64;
    }
    probs
}

/// Exact distribution for epsilon-lexicase in MAD mode: per-case epsilons
/// are the median absolute deviations of the pool's errors.
pub fn exact_epsilon_mad_distribution(errors: &[Vec<f64>]) -> Vec<f64> {
    let eps = pool_mads(errors);
    exact_lexicase_distribution(errors, &eps)
}

/// Per-case MADs computed directly from an error matrix.
pub fn pool_mads(errors: &[Vec<f64>]) -> Vec<f64> {
    let m = errors.first().map_or(0, |e| e.len());
    (0..m)
        .map(|case| {
            let xs: Vec<f64> = errors.iter().map(|e| e[case]).collect();
            let med = median_of(xs.clone());
            median_of(xs.into_iter().map(|x| (x - med).abs()).collect())
        })
        .collect()
}

fn median_of(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn enumerate_permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        enumerate_permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Exact win probability per individual under size-`t` tournament selection
/// with replacement. Individuals tied on total error are exchangeable, so
/// the probability that the minimum falls in a tie group splits evenly
/// across the group.
pub fn exact_tournament_distribution(totals: &[f64], t: u32) -> Vec<f64> {
    let n = totals.len();
    assert!(n > 0, "empty pool");
    assert!(t >= 1);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| totals[a].total_cmp(&totals[b]));

    let mut probs = vec![0.0; n];
    let mut pos = 0;
    while pos < n {
        let mut end = pos + 1;
        while end < n && totals[order[end]] == totals[order[pos]] {
            end += 1;
        }
        // P(all draws rank at least this group) minus P(all strictly worse).
        let p_group = pow_ratio(n - pos, n, t) - pow_ratio(n - end, n, t);
        let share = p_group / (end - pos) as f64;
        for &i in &order[pos..end] {
            probs[i] = share;
        }
        pos = end;
    }
    probs
}

/// (num/den)^t by iterated multiplication.
fn pow_ratio(num: usize, den: usize, t: u32) -> f64 {
    let r = num as f64 / den as f64;
    let mut acc = 1.0;
    for _ in 0..t {
        acc *= r;
    }
    acc
}
