//! Checks the analytic machinery against oracles that share no code with it:
//! composite Simpson quadrature over transformed densities, and exact
//! big-rational arithmetic for the regression and contingency statistics.

use lexilab::analytics::special::{chi_squared_survival, f_survival, inc_beta, ln_gamma};
use lexilab::analytics::stats::{chi_squared_success, regress_success_vs_rate};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::f64::consts::{FRAC_PI_2, PI};

/// Composite Simpson's rule with `n` panels (forced even).
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Simpson iterated to convergence: doubles the panel count until halving
/// the step moves the answer by at most `tol`, then returns the Richardson
/// extrapolation of the last pair.
fn converged_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut n = 4_096;
    let mut prev = simpson(f, a, b, n);
    while n <= 1 << 20 {
        n *= 2;
        let next = simpson(f, a, b, n);
        if (next - prev).abs() <= tol.max(next.abs() * 1e-12) {
            return next + (next - prev) / 15.0;
        }
        prev = next;
    }
    panic!("quadrature unconverged on [{a}, {b}]: {prev}");
}

/// Regularized incomplete beta by quadrature. The substitution t = sin^2(phi)
/// turns t^(a-1)(1-t)^(b-1) dt into 2 sin^(2a-1) cos^(2b-1) d(phi), which is
/// bounded and smooth for a, b >= 1/2, so no endpoint singularities survive.
fn beta_quad(a: f64, b: f64, x: f64) -> f64 {
    assert!(a >= 0.5 && b >= 0.5, "substitution needs a, b >= 1/2");
    let integrand = move |phi: f64| {
        2.0 * phi.sin().powf(2.0 * a - 1.0) * phi.cos().powf(2.0 * b - 1.0)
    };
    let split = x.sqrt().asin();
    let numer = converged_simpson(&integrand, 0.0, split, 1e-13);
    let denom = converged_simpson(&integrand, 0.0, FRAC_PI_2, 1e-13);
    numer / denom
}

/// Chi-squared survival by quadrature. Substituting t = u^2 in the density
/// kernel t^(df/2 - 1) e^(-t/2) gives 2 u^(df-1) e^(-u^2/2) du, smooth at the
/// origin for df >= 1, and the ratio form needs no gamma constant.
fn chi2_quad(df: usize, x: f64) -> f64 {
    let k = df as f64;
    let integrand = move |u: f64| 2.0 * u.powf(k - 1.0) * (-u * u / 2.0).exp();
    // e^(-u^2/2) underflows f64 well before u = 42, so [0, 42] is exhaustive.
    let upper = 42.0_f64.max(x.sqrt() + 1.0);
    let tail = converged_simpson(&integrand, x.sqrt(), upper, 1e-13);
    let total = converged_simpson(&integrand, 0.0, upper, 1e-13);
    tail / total
}

/// Survival of F(1, d2) by quadrature: F(1, d2) is the square of a Student t
/// with d2 degrees of freedom, and t = sqrt(d2) tan(theta) reduces the t tail
/// to cos^(d2-1) integrals that need no normalizing constant.
fn f1_quad(d2: usize, f: f64) -> f64 {
    let v = d2 as f64;
    let integrand = move |theta: f64| theta.cos().powf(v - 1.0);
    let theta0 = (f.sqrt() / v.sqrt()).atan();
    let tail = converged_simpson(&integrand, theta0, FRAC_PI_2, 1e-13);
    let whole = converged_simpson(&integrand, 0.0, FRAC_PI_2, 1e-13);
    tail / whole
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn to_f64(r: &BigRational) -> f64 {
    // Scale the remainder so the fractional part also converts exactly.
    let trunc = r.trunc();
    let frac = r - &trunc;
    let scale = BigInt::from(1_u64 << 53);
    let scaled = (&frac * BigRational::from_integer(scale.clone())).round();
    trunc.to_integer().to_f64().unwrap() + scaled.to_integer().to_f64().unwrap() / 9007199254740992.0
}

/// Least squares on integer points in exact arithmetic, mirroring none of the
/// library's centered-sum code path.
fn exact_regression(points: &[(i64, i64)]) -> (BigRational, BigRational, BigRational) {
    let n = big(points.len() as i64);
    let sx: BigRational = points.iter().map(|&(x, _)| big(x)).sum();
    let sy: BigRational = points.iter().map(|&(_, y)| big(y)).sum();
    let sxx: BigRational = points.iter().map(|&(x, _)| big(x) * big(x)).sum();
    let sxy: BigRational = points.iter().map(|&(x, y)| big(x) * big(y)).sum();
    let denom = &n * &sxx - &sx * &sx;
    assert!(!denom.is_zero());
    let slope = (&n * &sxy - &sx * &sy) / &denom;
    let intercept = (&sy - &slope * &sx) / &n;
    let mut ssr = BigRational::zero();
    let mut sse = BigRational::zero();
    let mean_y = &sy / &n;
    for &(x, y) in points {
        let fitted = &intercept + &slope * big(x);
        let dr = &fitted - &mean_y;
        let de = big(y) - &fitted;
        ssr += &dr * &dr;
        sse += &de * &de;
    }
    let df = &n - big(2);
    let f = if sse.is_zero() {
        BigRational::from_integer(BigInt::from(-1)) // sentinel: infinite
    } else {
        &ssr / (&sse / &df)
    };
    (slope, intercept, f)
}

#[test]
fn incomplete_beta_matches_quadrature_over_a_grid() {
    let params = [0.5, 1.0, 1.5, 2.5, 4.0, 7.5, 15.0];
    let xs = [0.05, 0.2, 0.36, 0.5, 0.64, 0.8, 0.95];
    for &a in &params {
        for &b in &params {
            for &x in &xs {
                let got = inc_beta(a, b, x);
                let want = beta_quad(a, b, x);
                assert!(
                    (got - want).abs() < 1e-9,
                    "I_{x}({a}, {b}): {got} vs quadrature {want}"
                );
            }
        }
    }
}

#[test]
fn incomplete_beta_closed_forms() {
    // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a.
    for &x in &[0.1, 0.36, 0.5, 0.9] {
        for &b in &[0.5, 1.0, 2.0, 5.0] {
            assert!((inc_beta(1.0, b, x) - (1.0 - (1.0 - x).powf(b))).abs() < 1e-13);
            assert!((inc_beta(b, 1.0, x) - x.powf(b)).abs() < 1e-13);
        }
    }
}

#[test]
fn chi_squared_survival_matches_quadrature() {
    for &df in &[1usize, 2, 3, 5, 10] {
        for &x in &[0.1, 1.0, 3.841458820694124, 10.0, 30.0] {
            let got = chi_squared_survival(x, df as f64);
            let want = chi2_quad(df, x);
            assert!(
                (got - want).abs() < 1e-9,
                "chi2 survival df {df} at {x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn chi_squared_survival_with_two_dof_is_exponential() {
    for &x in &[0.0, 0.5, 2.0, 11.0, 40.0] {
        let got = chi_squared_survival(x, 2.0);
        assert!((got - (-x / 2.0).exp()).abs() < 1e-12, "at {x}: {got}");
    }
}

#[test]
fn f_survival_with_one_numerator_dof_matches_t_quadrature() {
    for &d2 in &[1usize, 2, 3, 8, 18, 30] {
        for &f in &[0.5, 3.2, 32.0 / 9.0, 10.0] {
            let got = f_survival(1.0, d2 as f64, f);
            let want = f1_quad(d2, f);
            assert!(
                (got - want).abs() < 1e-9,
                "F(1, {d2}) survival at {f}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn f_survival_general_dofs_match_beta_quadrature() {
    // P(F(d1, d2) > f) = I_y(d2/2, d1/2) at y = d2 / (d2 + d1 f); the beta
    // side below is quadrature, not the library's continued fraction.
    for &(d1, d2) in &[(2.0, 5.0), (3.0, 7.0), (4.0, 4.0), (1.0, 12.0)] {
        for &f in &[0.3, 1.0, 2.5, 6.0] {
            let got = f_survival(d1, d2, f);
            let want = beta_quad(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
            assert!(
                (got - want).abs() < 1e-9,
                "F({d1}, {d2}) survival at {f}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn ln_gamma_matches_integral_definition_and_exact_values() {
    // Quadrature of the defining integral, with t = u^2 smoothing the origin:
    // Gamma(x) = integral of 2 u^(2x-1) e^(-u^2) du over [0, inf).
    for &x in &[1.0, 1.5, 2.5, 4.0, 6.5, 10.25] {
        let integrand = move |u: f64| 2.0 * u.powf(2.0 * x - 1.0) * (-u * u).exp();
        let gamma = converged_simpson(&integrand, 0.0, 13.0, 1e-12);
        let got = ln_gamma(x);
        assert!(
            (got - gamma.ln()).abs() < 1e-9,
            "ln_gamma({x}) = {got} vs integral {}",
            gamma.ln()
        );
    }
    // Factorials and the half-integer ladder built from Gamma(1/2) = sqrt(pi).
    let mut factorial = 1.0_f64;
    for n in 1..15 {
        assert!((ln_gamma(n as f64) - factorial.ln()).abs() < 1e-11);
        factorial *= n as f64;
    }
    let mut half = PI.sqrt();
    let mut arg = 0.5;
    for _ in 0..10 {
        assert!((ln_gamma(arg) - half.ln()).abs() < 1e-11, "at {arg}");
        half *= arg;
        arg += 1.0;
    }
}

#[test]
fn regression_agrees_with_exact_rational_arithmetic() {
    let datasets: Vec<Vec<(i64, i64)>> = vec![
        vec![(1, 1), (2, 3), (3, 2), (4, 4)],
        vec![(10, 0), (20, 1), (30, 0), (40, 2), (50, 1), (60, 3)],
        vec![(0, 5), (1, 4), (2, 6), (3, 5), (4, 7), (5, 5), (6, 8)],
        vec![(-3, 9), (-1, 2), (0, 1), (2, 3), (5, 30)],
    ];
    for points in &datasets {
        let data: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
        let got = regress_success_vs_rate(&data).unwrap();
        let (slope, intercept, f) = exact_regression(points);
        assert!(
            (got.slope - to_f64(&slope)).abs() < 1e-10,
            "slope on {points:?}"
        );
        assert!(
            (got.intercept - to_f64(&intercept)).abs() < 1e-10,
            "intercept on {points:?}"
        );
        assert!(!f.is_negative(), "datasets here must not fit exactly");
        let f64_f = to_f64(&f);
        assert!(
            (got.f_statistic - f64_f).abs() < 1e-8 * f64_f.max(1.0),
            "F on {points:?}: {} vs {}",
            got.f_statistic,
            f64_f
        );
        let p_want = f1_quad(points.len() - 2, f64_f);
        assert!(
            (got.p_value - p_want).abs() < 1e-9,
            "p on {points:?}: {} vs {}",
            got.p_value,
            p_want
        );
    }
}

#[test]
fn contingency_statistic_agrees_with_exact_rational_arithmetic() {
    let tables = [
        (90u64, 100u64, 10u64, 100u64),
        (27, 30, 25, 30),
        (5, 50, 9, 40),
        (1, 10, 9, 10),
    ];
    for &(sa, na, sb, nb) in &tables {
        let got = chi_squared_success(sa, na, sb, nb);
        let (a, b) = (big(sa as i64), big((na - sa) as i64));
        let (c, d) = (big(sb as i64), big((nb - sb) as i64));
        let n = big((na + nb) as i64);
        let det = &a * &d - &b * &c;
        let denom = (&a + &b) * (&c + &d) * (&a + &c) * (&b + &d);
        let stat = &n * &det * &det / &denom;
        let stat_f = to_f64(&stat);
        assert!(
            (got.statistic - stat_f).abs() < 1e-9 * stat_f.max(1.0),
            "statistic for {sa}/{na} vs {sb}/{nb}"
        );
        let p_want = chi2_quad(1, stat_f);
        let scale = got.p_value.abs().max(1e-300);
        assert!(
            (got.p_value - p_want).abs() / scale < 1e-6 || (got.p_value - p_want).abs() < 1e-12,
            "p for {sa}/{na} vs {sb}/{nb}: {} vs {}",
            got.p_value,
            p_want
        );
    }
}

#[test]
fn quadrature_oracle_reproduces_the_frozen_references() {
    // The same spot values the unit tests pin against library code; if the
    // oracle disagreed with them, every comparison above would be circular.
    assert!((beta_quad(1.0, 0.5, 0.36) - 0.2).abs() < 1e-10);
    assert!((f1_quad(2, 3.2) - 0.21553545944726385).abs() < 1e-10);
    assert!((chi2_quad(1, 3.841458820694124) - 0.05).abs() < 1e-10);
}
