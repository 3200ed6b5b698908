use super::density::{lower_density_indices, DensityEstimate};
use crate::error::{Error, Result};
use crate::exp_core::{ExpSum, DEDUP_TOL};
use crate::numeric::{C64, ONE, ZERO};
use crate::operators::{pow2, OrbitStepper, Region, SymbolGerm};
use crate::phi_transform::phi_transform_exact;
use std::f64::consts::PI;

/// Half-opening of the sector `S = {|arg z| ≤ SECTOR_HALF_ANGLE}`.
pub const SECTOR_HALF_ANGLE: f64 = PI / 5.0;
/// Interior samples per unit interval for sign-change detection.
pub const INTERIOR_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    /// `|φ(λ)| ≥ 1`: normalized sequence `h(n) = φ(D)^n f(0)/φ(λ)^n`.
    Normalized,
    /// `|φ(λ)| < 1`: the orbit at 0 decays; no sign changes are sought.
    Decay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub mode: ProbeMode,
    pub phi_lambda: C64,
    /// `h(n)` in normalized mode, `φ(D)^n f(0)` in decay mode.
    pub values: Vec<C64>,
    pub in_sector: Vec<bool>,
    pub sector_exits: Vec<u64>,
    /// `n` such that `Re h` changes sign on `[n, n+1]`.
    pub sign_changes_re: Vec<u64>,
    pub sign_changes_im: Vec<u64>,
    /// Density of the union of sign-change intervals.
    pub density: DensityEstimate,
    /// Whether intervals were sampled with the interpolant `Φ_{log φ̃} f`
    /// (otherwise only integer values were used).
    pub interpolant_used: bool,
    /// `max_n |interpolant(n) - h(n)| / max(1, |h(n)|)` when the interpolant is used.
    pub interpolant_gap: Option<f64>,
}

/// Sign-change diagnostics for `n ↦ φ(D)^n f(0)/φ(λ)^n` with `K(f) = {λ}`.
pub fn fhc_obstruction_probe(phi: &SymbolGerm, lambda: C64, f: &ExpSum, n_max: u64) -> Result<ProbeReport> {
    if f.terms().len() != 1 || (f.terms()[0].alpha() - lambda).norm() > DEDUP_TOL {
        return Err(Error::NotSingleton { expected: lambda });
    }
    let phi_lambda = phi.value(lambda)?;
    let mode = if phi_lambda.norm() >= 1.0 {
        ProbeMode::Normalized
    } else {
        ProbeMode::Decay
    };
    let tilde = match mode {
        ProbeMode::Normalized => SymbolGerm::product(phi.clone(), SymbolGerm::constant(ONE / phi_lambda)),
        ProbeMode::Decay => phi.clone(),
    };
    let mut orbit = OrbitStepper::new(&tilde, f)?;
    let mut values = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        if n > 0 {
            orbit.step()?;
        }
        let (v, e) = orbit.evaluate_scaled(ZERO);
        values.push(v * pow2(e));
    }
    let in_sector: Vec<bool> = values
        .iter()
        .map(|h| *h != ZERO && h.arg().abs() <= SECTOR_HALF_ANGLE)
        .collect();
    let sector_exits = (0..=n_max).filter(|&n| !in_sector[n as usize]).collect();

    let interpolant = match mode {
        ProbeMode::Normalized => interpolant(&tilde, lambda, f),
        ProbeMode::Decay => None,
    };
    let (mut re_changes, mut im_changes) = (Vec::new(), Vec::new());
    let mut gap = None;
    match &interpolant {
        // The decay regime reports only the vanishing orbit at 0.
        _ if mode == ProbeMode::Decay => {}
        Some(g) => {
            let mut worst: f64 = 0.0;
            for (n, h) in values.iter().enumerate() {
                let v = g.evaluate(C64::new(n as f64, 0.0));
                worst = worst.max((v - h).norm() / h.norm().max(1.0));
            }
            gap = Some(worst);
            for n in 0..n_max {
                let samples: Vec<C64> = (0..=INTERIOR_SAMPLES + 1)
                    .map(|k| g.evaluate(C64::new(n as f64 + k as f64 / (INTERIOR_SAMPLES + 1) as f64, 0.0)))
                    .collect();
                if sign_change(samples.iter().map(|v| v.re)) {
                    re_changes.push(n);
                }
                if sign_change(samples.iter().map(|v| v.im)) {
                    im_changes.push(n);
                }
            }
        }
        None => {
            for n in 0..n_max as usize {
                if sign_change([values[n].re, values[n + 1].re].into_iter()) {
                    re_changes.push(n as u64);
                }
                if sign_change([values[n].im, values[n + 1].im].into_iter()) {
                    im_changes.push(n as u64);
                }
            }
        }
    }
    let mut union: Vec<u64> = re_changes.iter().chain(&im_changes).copied().collect();
    union.sort_unstable();
    union.dedup();
    let density = lower_density_indices(&union, n_max.max(1) as f64)?;
    Ok(ProbeReport {
        mode,
        phi_lambda,
        values,
        in_sector,
        sector_exits,
        sign_changes_re: re_changes,
        sign_changes_im: im_changes,
        density,
        interpolant_used: interpolant.is_some(),
        interpolant_gap: gap,
    })
}

/// True when the sequence takes strictly opposite signs, ignoring values
/// that are zero relative to its scale.
fn sign_change(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let eps = 1e-12 * scale;
    let (mut pos, mut neg) = (false, false);
    for x in v {
        pos |= x > eps;
        neg |= x < -eps;
    }
    pos && neg
}

/// `Φ_{log φ̃} f` with `log φ̃(λ) = 0`, on the largest zero-free disk
/// around `λ` among radii `1/2, 1/4, …, 1/16`.
fn interpolant(tilde: &SymbolGerm, lambda: C64, f: &ExpSum) -> Option<ExpSum> {
    let mut r = 0.5;
    while r >= 1.0 / 16.0 {
        if let Ok(log) = SymbolGerm::logarithm(tilde.clone(), Region::disk(lambda, r), Some((lambda, ZERO))) {
            return phi_transform_exact(&log, f).ok();
        }
        r *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::I;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigen_seed_is_constant() {
        let phi = SymbolGerm::entire(ExpSum::from_terms([(ZERO, vec![c(2.0, 0.0)]), (ONE, vec![ONE])]));
        let lam = c(0.2, 0.3);
        let r = fhc_obstruction_probe(&phi, lam, &ExpSum::exponential(lam), 30).unwrap();
        assert_eq!(r.mode, ProbeMode::Normalized);
        assert!(r.values.iter().all(|h| (h - ONE).norm() < 1e-12));
        assert!(r.sign_changes_re.is_empty() && r.sign_changes_im.is_empty());
        assert_eq!(r.density.ldens_proxy, 0.0);
        assert!(r.interpolant_used);
    }

    #[test]
    fn unimodular_exponential() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let r = fhc_obstruction_probe(&e1, I, &ExpSum::exponential(I), 20).unwrap();
        assert!(r.values.iter().all(|h| (h - ONE).norm() < 1e-12));
    }

    #[test]
    fn linear_seed_drifts() {
        let phi = SymbolGerm::entire(ExpSum::from_terms([(ZERO, vec![c(1.0, 0.0)]), (ONE, vec![c(0.0, 1.0)])]));
        let lam = c(0.1, 0.0);
        let f = ExpSum::monomial(lam, vec![ONE, ONE]);
        let r = fhc_obstruction_probe(&phi, lam, &f, 40).unwrap();
        // h(n) = 1 + n φ'(λ)/φ(λ) leaves the sector.
        let q = phi.derivatives(lam, 1).unwrap();
        let ratio = q[1] / q[0];
        for (n, h) in r.values.iter().enumerate() {
            assert!((h - (ONE + ratio * n as f64)).norm() < 1e-10);
        }
        assert!(!r.sector_exits.is_empty());
        assert!(r.interpolant_gap.unwrap() < 1e-10);
    }

    #[test]
    fn decay_mode() {
        let phi = SymbolGerm::constant(c(0.5, 0.0));
        let r = fhc_obstruction_probe(&phi, ZERO, &ExpSum::constant(ONE), 10).unwrap();
        assert_eq!(r.mode, ProbeMode::Decay);
        assert!((r.values[10].re - 0.5f64.powi(10)).abs() < 1e-15);
    }

    #[test]
    fn rejects_two_frequencies() {
        let f = ExpSum::from_terms([(ZERO, vec![ONE]), (ONE, vec![ONE])]);
        assert!(matches!(
            fhc_obstruction_probe(&SymbolGerm::identity(), ZERO, &f, 5),
            Err(Error::NotSingleton { .. })
        ));
    }
}
