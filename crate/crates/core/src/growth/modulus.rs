use crate::exp_core::ExpSum;
use crate::numeric::{linear_fit, C64};
use crate::par;
use std::f64::consts::PI;

/// Default angular sample count for modulus computations.
pub const DEFAULT_SAMPLES: usize = 256;

/// `max_θ log|f(re^{iθ})|` from `samples` angles plus one parabolic
/// (Newton) step around the best sample.
pub fn log_max_modulus<F>(log_abs: F, r: f64, samples: usize) -> f64
where
    F: Fn(C64) -> f64 + Sync,
{
    let samples = samples.max(8);
    let step = 2.0 * PI / samples as f64;
    let vals = par::map_range(samples, |k| log_abs(C64::from_polar(r, k as f64 * step)));
    let (best, &top) = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty sample set");
    if r == 0.0 || !top.is_finite() {
        return top;
    }
    let (lo, hi) = (vals[(best + samples - 1) % samples], vals[(best + 1) % samples]);
    let curv = lo - 2.0 * top + hi;
    if curv < 0.0 && lo.is_finite() && hi.is_finite() {
        let shift = 0.5 * (lo - hi) / curv;
        let theta = (best as f64 + shift.clamp(-1.0, 1.0)) * step;
        top.max(log_abs(C64::from_polar(r, theta)))
    } else {
        top
    }
}

/// `M_f(r) = max_{|z|=r} |f(z)|`.
pub fn max_modulus<F>(f: F, r: f64, samples: usize) -> f64
where
    F: Fn(C64) -> C64 + Sync,
{
    log_max_modulus(|z| f(z).norm().ln(), r, samples).exp()
}

/// `M_{f,p}(r) = ((1/2π) ∮ |f|^p)^{1/p}` by the trapezoid rule, scaled by
/// the sample maximum to avoid overflow.
pub fn lp_average<F>(f: F, r: f64, p: f64, samples: usize) -> f64
where
    F: Fn(C64) -> C64 + Sync,
{
    let samples = samples.max(8);
    let logs = par::map_range(samples, |k| {
        f(C64::from_polar(r, 2.0 * PI * k as f64 / samples as f64)).norm().ln()
    });
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top.exp();
    }
    let mean = logs.iter().map(|l| ((l - top) * p).exp()).sum::<f64>() / samples as f64;
    (top + mean.ln() / p).exp()
}

/// Exponential type from regression, and exactly when known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeEstimate {
    pub regression: f64,
    pub exact: Option<f64>,
}

/// Least-squares slope of `log M(r)` against `r` over the top half of the
/// ladder.
pub fn exp_type_regression<F>(log_max: F, ladder: &[f64]) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    if ladder.len() < 4 || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return None;
    }
    let top = &ladder[ladder.len() / 2..];
    let ys: Vec<f64> = top.iter().map(|&r| log_max(r)).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return None;
    }
    linear_fit(top, &ys).map(|(slope, _)| slope)
}

/// Type of an evaluator.
pub fn exp_type_estimate<F>(f: F, ladder: &[f64], samples: usize) -> Option<f64>
where
    F: Fn(C64) -> C64 + Sync,
{
    exp_type_regression(|r| log_max_modulus(|z| f(z).norm().ln(), r, samples), ladder)
}

/// Type of an exponential polynomial: the regression evaluated in the log
/// domain, and the exact value `max |α_j|`.
pub fn exp_type_estimate_expsum(f: &ExpSum, ladder: &[f64], samples: usize) -> Option<TypeEstimate> {
    let regression = exp_type_regression(|r| log_max_modulus(|z| f.log_abs(z), r, samples), ladder)?;
    Some(TypeEstimate {
        regression,
        exact: Some(f.exponential_type()),
    })
}

/// `n` evenly spaced radii in `[lo, hi]`.
pub fn linear_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n.max(2) - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ONE, ZERO};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exponential_max_modulus() {
        let m = max_modulus(|z| z.exp(), 1.0, 64);
        assert!((m - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn monomial_moduli() {
        let m = max_modulus(|z| z.powi(3), 1.7, 64);
        assert!((m - 1.7f64.powi(3)).abs() < 1e-12);
        let l2 = lp_average(|z| z.powi(3), 1.7, 2.0, 64);
        assert!((l2 - 1.7f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn cosh_maximum() {
        let f = ExpSum::from_terms([(ONE, vec![ONE]), (-ONE, vec![ONE])]);
        let m = max_modulus(|z| f.evaluate(z), 2.0, 128);
        let dense = (0..100_000)
            .map(|k| f.evaluate(C64::from_polar(2.0, 2.0 * PI * k as f64 / 1e5)).norm())
            .fold(0.0, f64::max);
        assert!((m - dense).abs() < 1e-9 * dense);
        assert!((m - 2.0 * 2f64.cosh()).abs() < 1e-9);
    }

    #[test]
    fn types() {
        let ladder = linear_ladder(5.0, 50.0, 16);
        let f = ExpSum::exponential(c(2.0, 0.0));
        let t = exp_type_estimate_expsum(&f, &ladder, 128).unwrap();
        assert_eq!(t.exact, Some(2.0));
        assert!((t.regression - 2.0).abs() < 1e-3);
        let p = ExpSum::polynomial(vec![ONE, ONE, ONE]);
        assert_eq!(exp_type_estimate_expsum(&p, &ladder, 64).unwrap().exact, Some(0.0));
        let g = ExpSum::from_terms([(ONE, vec![ONE]), (c(0.0, 1.0), vec![ONE])]);
        let t = exp_type_estimate_expsum(&g, &linear_ladder(10.0, 200.0, 32), 256).unwrap();
        assert!((t.regression - 1.0).abs() < 2e-2, "{t:?}");
        assert!(exp_type_estimate(|z| z.exp() + ZERO, &ladder, 64).is_some());
    }
}
