use std::f64::consts::PI;
use super::modulus::linear_ladder;
use crate::convex_geom::{polygon_from_support_vertices, project_support_samples, support_function, ConvexPolygon};
use crate::error::Result;
use crate::exp_core::ExpSum;
use crate::numeric::{linear_fit, C64};
use crate::par;

/// Samples more than a factor `ZERO_REJECT` below the ray's growth line are
/// dropped from ray fits.
pub const ZERO_REJECT: f64 = 1e-12;
/// A residual below the fitted line by more than this (in log units) marks
/// a dip near a zero; such samples are dropped and the line refitted.
const DIP_DEPTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorMethod {
    ExactSupport,
    RadialRegression,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorProfile {
    pub thetas: Vec<f64>,
    pub h_values: Vec<f64>,
    pub r_ladder: Vec<f64>,
    pub method: IndicatorMethod,
    /// Rays where more than half of the window was rejected.
    pub flagged: Vec<bool>,
}

/// Default ladder for regression profiles: 64 radii up to `r_max`.
pub fn default_ladder(r_max: f64) -> Vec<f64> {
    linear_ladder(r_max / 64.0, r_max, 64)
}

/// `h(θ) = H_{K(f)}(e^{iθ})`.
pub fn indicator_exact(f: &ExpSum, thetas: &[f64]) -> IndicatorProfile {
    let k = f.exact_cid();
    let h_values = thetas
        .iter()
        .map(|&t| {
            if k.is_empty() {
                f64::NEG_INFINITY
            } else {
                support_function(&k, C64::from_polar(1.0, t)).expect("non-empty hull")
            }
        })
        .collect();
    IndicatorProfile {
        thetas: thetas.to_vec(),
        h_values,
        r_ladder: Vec::new(),
        method: IndicatorMethod::ExactSupport,
        flagged: vec![false; thetas.len()],
    }
}

/// Per-ray slope of `log|f(re^{iθ})|` against `r` over the top half of the
/// ladder, rejecting samples near zeros of `f`.
pub fn indicator_regression<F>(log_abs: F, thetas: &[f64], ladder: &[f64]) -> IndicatorProfile
where
    F: Fn(C64) -> f64 + Sync,
{
    let window = &ladder[ladder.len() / 2..];
    let rows: Vec<Vec<f64>> = par::map(thetas, |&t| window.iter().map(|&r| log_abs(C64::from_polar(r, t))).collect());
    let cut = ZERO_REJECT.ln();
    let fits: Vec<(f64, bool)> = par::map(&rows, |row| {
        let finite: Vec<(f64, f64)> = window.iter().copied().zip(row.iter().copied()).filter(|p| p.1.is_finite()).collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = finite.iter().copied().unzip();
        // Near-zero samples sit far below the ray's growth line.
        let kept: Vec<(f64, f64)> = match linear_fit(&xs, &ys) {
            Some((slope, icpt)) => finite.into_iter().filter(|(x, y)| *y >= slope * x + icpt + cut).collect(),
            None => finite,
        };
        let (xs, ys): (Vec<f64>, Vec<f64>) = kept.into_iter().unzip();
        let flagged = 2 * xs.len() < row.len();
        (fit_upper(&xs, &ys).unwrap_or(f64::NAN), flagged || xs.len() < 2)
    });
    IndicatorProfile {
        thetas: thetas.to_vec(),
        h_values: fits.iter().map(|f| f.0).collect(),
        r_ladder: ladder.to_vec(),
        method: IndicatorMethod::RadialRegression,
        flagged: fits.iter().map(|f| f.1).collect(),
    }
}

/// Line fit that repeatedly discards samples lying deep below the line.
fn fit_upper(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (mut xs, mut ys) = (xs.to_vec(), ys.to_vec());
    let (mut slope, mut icpt) = linear_fit(&xs, &ys)?;
    for _ in 0..8 {
        let keep: Vec<bool> = xs.iter().zip(&ys).map(|(x, y)| y - (slope * x + icpt) > -DIP_DEPTH).collect();
        if keep.iter().all(|&k| k) || keep.iter().filter(|&&k| k).count() < 2 {
            break;
        }
        let mut k = keep.iter();
        xs.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        ys.retain(|_| *k.next().unwrap());
        (slope, icpt) = linear_fit(&xs, &ys)?;
    }
    Some(slope)
}

/// Regression profile of an exponential polynomial, evaluated in the log
/// domain.
pub fn indicator_estimate(f: &ExpSum, thetas: &[f64], ladder: &[f64]) -> IndicatorProfile {
    indicator_regression(|z| f.log_abs(z), thetas, ladder)
}

/// Diagram reconstructed from an indicator profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CidEstimate {
    pub polygon: ConvexPolygon,
    /// Largest change made to a sample to make the profile that of a convex
    /// set; zero when the profile was already consistent.
    pub relaxation: f64,
}

impl CidEstimate {
    /// Whether the profile had to be corrected (estimation noise).
    pub fn flagged(&self) -> bool {
        self.relaxation > 0.0
    }
}

/// Support-sample reconstruction of `K(f)` from a profile, skipping flagged
/// rays. An inconsistent profile is first replaced by its least-squares
/// projection onto the profiles of convex sets.
pub fn cid_estimate(profile: &IndicatorProfile) -> Result<CidEstimate> {
    let samples: Vec<(f64, f64)> = profile
        .thetas
        .iter()
        .zip(&profile.h_values)
        .zip(&profile.flagged)
        .filter(|(_, &flag)| !flag)
        .map(|((&t, &h), _)| (t, h))
        .filter(|(_, h)| h.is_finite())
        .collect();
    let projected = project_support_samples(&samples)?;
    let relaxation = samples
        .iter()
        .map(|&(t, h)| {
            let t = t.rem_euclid(2.0 * PI);
            let i = projected.partition_point(|p| p.0 < t - 1e-14).min(projected.len() - 1);
            (projected[i].1 - h).abs()
        })
        .fold(0.0, f64::max);
    let polygon = polygon_from_support_vertices(&projected)?;
    Ok(CidEstimate { polygon, relaxation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_geom::hausdorff_distance;
    use crate::numeric::{theta_grid as thetas, I, ONE};

    #[test]
    fn exact_profile_of_exponential() {
        let (tau, psi) = (1.5, 0.7);
        let f = ExpSum::exponential(C64::from_polar(tau, psi));
        let p = indicator_exact(&f, &thetas(64));
        for (t, h) in p.thetas.iter().zip(&p.h_values) {
            assert!((h - tau * (t + psi).cos()).abs() < 1e-12);
        }
        let r = indicator_estimate(&f, &thetas(64), &default_ladder(200.0));
        for (t, h) in r.thetas.iter().zip(&r.h_values) {
            assert!((h - tau * (t + psi).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn segment_profile() {
        let f = ExpSum::from_terms([(ONE, vec![ONE]), (-ONE, vec![ONE])]);
        let p = indicator_exact(&f, &thetas(32));
        for (t, h) in p.thetas.iter().zip(&p.h_values) {
            assert!((h - t.cos().abs()).abs() < 1e-15);
        }
        let r = indicator_estimate(&f, &thetas(32), &default_ladder(200.0));
        for (t, h) in r.thetas.iter().zip(&r.h_values) {
            assert!((h - t.cos().abs()).abs() < 2e-2, "θ={t} h={h}");
        }
    }

    #[test]
    fn constant_has_zero_indicator() {
        let p = indicator_exact(&ExpSum::constant(ONE), &thetas(16));
        assert!(p.h_values.iter().all(|h| *h == 0.0));
        let k = cid_estimate(&p).unwrap().polygon;
        assert!(k.max_modulus() < 1e-9);
    }

    #[test]
    fn triangle_reconstruction() {
        let f = ExpSum::from_terms([(ONE, vec![ONE]), (-ONE, vec![ONE]), (I, vec![ONE])]);
        let th = thetas(256);
        let exact = cid_estimate(&indicator_exact(&f, &th)).unwrap().polygon;
        assert!(hausdorff_distance(&exact, &f.exact_cid()).unwrap() < 1e-3);
        let est = cid_estimate(&indicator_estimate(&f, &th, &default_ladder(200.0))).unwrap().polygon;
        assert!(hausdorff_distance(&est, &f.exact_cid()).unwrap() < 0.05);
    }
}
