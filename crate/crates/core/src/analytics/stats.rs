//! Significance tests for experiment outcomes: simple linear regression with
//! an F test on the slope, and a 2x2 chi-squared test on success counts.

use super::special::{chi_squared_survival, f_survival};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    /// F = (SSR / 1) / (SSE / (n - 2)), the slope's significance statistic.
    pub f_statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("regression needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("regression x values are all identical")]
    DegenerateX,
    #[error("non-finite input")]
    NonFinite,
}

/// Ordinary least squares of y on x with an F test for a nonzero slope.
/// Callers pass (survival_rate, success_count) pairs.
pub fn regress_success_vs_rate(points: &[(f64, f64)]) -> Result<RegressionResult, StatsError> {
    let n = points.len();
    if n < 3 {
        return Err(StatsError::TooFewPoints(n));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr = sxy * sxy / sxx;
    let sse = (syy - ssr).max(0.0);
    let df_error = (n - 2) as f64;
    // A perfectly flat response has nothing to test: F = 0, p = 1.
    let f_statistic = if ssr == 0.0 {
        0.0
    } else if sse == 0.0 {
        f64::INFINITY
    } else {
        ssr / (sse / df_error)
    };
    let p_value = f_survival(1.0, df_error, f_statistic);
    Ok(RegressionResult {
        slope,
        intercept,
        f_statistic,
        p_value,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquaredResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// 2x2 chi-squared test (no continuity correction) comparing success counts
/// between two groups. A table with any zero margin carries no information:
/// statistic 0, p = 1.
pub fn chi_squared_success(
    successes_a: u64,
    trials_a: u64,
    successes_b: u64,
    trials_b: u64,
) -> ChiSquaredResult {
    assert!(successes_a <= trials_a, "more successes than trials");
    assert!(successes_b <= trials_b, "more successes than trials");
    let a = successes_a as f64;
    let b = (trials_a - successes_a) as f64;
    let c = successes_b as f64;
    let d = (trials_b - successes_b) as f64;
    let n = a + b + c + d;
    let row1 = a + b;
    let row2 = c + d;
    let col1 = a + c;
    let col2 = b + d;
    if row1 == 0.0 || row2 == 0.0 || col1 == 0.0 || col2 == 0.0 {
        return ChiSquaredResult {
            statistic: 0.0,
            p_value: 1.0,
        };
    }
    let statistic = n * (a * d - b * c).powi(2) / (row1 * row2 * col1 * col2);
    ChiSquaredResult {
        statistic,
        p_value: chi_squared_survival(statistic, 1.0),
    }
}
