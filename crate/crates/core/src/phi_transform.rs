//! The transform `Φ_φ f(z) = (1/2πi) ∮ B f(ξ) e^{φ(ξ)z} dξ`.
//!
//! On exponential polynomials it is computed exactly by residues; a contour
//! form and a Taylor form are provided for cross-checks.

use crate::borel_polya::{BorelFunction, Contour, DEFAULT_CLEARANCE};
use crate::convex_geom::{convex_hull, ConvexPolygon};
use crate::error::{Error, Result};
use crate::exp_core::{ExpSum, TaylorJet, DEDUP_TOL};
use crate::numeric::{compensated_sum, factorial, C64, I, ONE, ZERO};
use crate::operators::{apply_operator_exact, sample_convex, OrbitStepper, Region, SymbolGerm};
use crate::par;
use crate::series::Series;
use std::f64::consts::PI;

/// Slack added to the image hull in the containment check.
pub const CONTAINMENT_SLACK: f64 = 1e-6;

/// Two source frequencies whose images coincide within the dedup tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub sources: (C64, C64),
    pub image: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformReport {
    pub input_terms: usize,
    pub input_max_degree: usize,
    pub output: ExpSum,
    pub collisions: Vec<Collision>,
    /// `slack - max_j dist(φ(α_j), conv φ(K(f)))`; non-negative when contained.
    pub containment_margin: f64,
}

/// Residue of `B(p e_α)(ξ) e^{φ(ξ)z}` at `α`: frequency `φ(α)` and
/// polynomial `Q(z) = Σ_m z^m/m! Σ_k k! p_k [t^k] u(t)^m`,
/// `u(t) = φ(α+t) - φ(α)`.
fn residue_term(phi: &SymbolGerm, alpha: C64, p: &[C64]) -> Result<(C64, Vec<C64>)> {
    let d = p.len() - 1;
    let jet = phi.jet(alpha, d)?;
    let beta = jet.constant_term();
    let mut u = jet.into_coeffs();
    u[0] = ZERO;
    let u = Series::new(u);
    let mut power = Series::constant(ONE, d);
    let mut q = vec![ZERO; d + 1];
    for (m, qm) in q.iter_mut().enumerate() {
        if m > 0 {
            power = power.mul_trunc(&u, d);
        }
        let mut acc = ZERO;
        for (k, pk) in p.iter().enumerate() {
            acc += pk * factorial(k) * power.coeffs()[k];
        }
        *qm = acc / factorial(m);
    }
    Ok((beta, q))
}

/// `Φ_φ f` by residues at the frequencies of `f`.
pub fn phi_transform_exact(phi: &SymbolGerm, f: &ExpSum) -> Result<ExpSum> {
    let terms = f
        .terms()
        .iter()
        .map(|t| residue_term(phi, t.alpha(), t.poly()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpSum::from_terms(terms))
}

/// Exact transform together with frequency collisions and the containment
/// margin against the hull of `φ` over a grid of `K(f)`.
pub fn phi_transform_report(phi: &SymbolGerm, f: &ExpSum) -> Result<TransformReport> {
    let mut images = Vec::with_capacity(f.terms().len());
    let mut terms = Vec::with_capacity(f.terms().len());
    for t in f.terms() {
        let (beta, q) = residue_term(phi, t.alpha(), t.poly())?;
        images.push((t.alpha(), beta));
        terms.push((beta, q));
    }
    let mut collisions = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if (images[i].1 - images[j].1).norm() <= DEDUP_TOL {
                collisions.push(Collision {
                    sources: (images[i].0, images[j].0),
                    image: images[i].1,
                });
            }
        }
    }
    let output = ExpSum::from_terms(terms);
    let hull = image_hull(phi, &f.exact_cid(), &f.frequencies())?;
    let mut margin = CONTAINMENT_SLACK;
    for (_, beta) in &images {
        margin = margin.min(CONTAINMENT_SLACK - hull.distance_to(*beta)?);
    }
    Ok(TransformReport {
        input_terms: f.terms().len(),
        input_max_degree: f.max_degree(),
        output,
        collisions,
        containment_margin: margin,
    })
}

/// `conv φ(S)` for a lattice `S` over `K` plus the given extra points.
pub fn image_hull(phi: &SymbolGerm, k: &ConvexPolygon, extra: &[C64]) -> Result<ConvexPolygon> {
    let (mut pts, _) = sample_convex(k, 16);
    pts.extend_from_slice(extra);
    let vals = par::map(&pts, |&z| phi.value(z));
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(convex_hull(&vals))
}

/// Precomputed `(φ(ξ_k), w_k B(ξ_k))` on a contour.
pub struct PhiKernel {
    nodes: Vec<(C64, C64)>,
}

impl PhiKernel {
    pub fn new(phi: &SymbolGerm, b: &dyn BorelFunction, gamma: &Contour) -> Result<Self> {
        gamma.check_encloses(&b.singularities())?;
        let vals = par::map(gamma.nodes(), |n| phi.value(n.xi).map(|p| (p, n.weight * b.eval(n.xi))));
        Ok(PhiKernel {
            nodes: vals.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn eval(&self, z: C64) -> C64 {
        let v: Vec<C64> = self.nodes.iter().map(|(p, w)| w * (p * z).exp()).collect();
        compensated_sum(&v) / (2.0 * PI * I)
    }
}

/// `Φ_φ f(z)` by quadrature.
pub fn phi_transform_contour(phi: &SymbolGerm, b: &dyn BorelFunction, gamma: &Contour, z: C64) -> Result<C64> {
    Ok(PhiKernel::new(phi, b, gamma)?.eval(z))
}

/// Taylor coefficients `φ(D)^n f(0) / n!`, `n ≤ order`.
pub fn phi_transform_taylor(phi: &SymbolGerm, f: &ExpSum, order: usize) -> Result<TaylorJet> {
    let mut orbit = OrbitStepper::new(phi, f)?;
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut log_fact = 0.0;
    for n in 0..=order {
        if n > 0 {
            orbit.step()?;
            log_fact += (n as f64).ln();
        }
        let (v, e) = orbit.evaluate_scaled(ZERO);
        let scale = (e as f64 * std::f64::consts::LN_2 - log_fact).exp();
        let c = v * scale;
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Overflow { last_good: n.saturating_sub(1) });
        }
        coeffs.push(c);
    }
    let images: Vec<C64> = f
        .terms()
        .iter()
        .map(|t| phi.value(t.alpha()))
        .collect::<Result<_>>()?;
    Ok(TaylorJet {
        coeffs,
        type_bound: images.iter().map(|w| w.norm()).fold(0.0, f64::max),
        hull_bound: Some(convex_hull(&images)),
    })
}

/// `H_φ(w) = (1/2πi) ∮ B(ξ)/(w - φ(ξ)) dξ`, defined for `w` at least
/// `clearance` away from the hull of `φ` on the contour.
pub fn borel_continuation_h(
    phi: &SymbolGerm,
    b: &dyn BorelFunction,
    gamma: &Contour,
    w: C64,
    clearance: f64,
) -> Result<C64> {
    let kernel = PhiKernel::new(phi, b, gamma)?;
    let trace = par::map(gamma.trace(), |&z| phi.value(z));
    let mut image: Vec<C64> = trace.into_iter().collect::<Result<_>>()?;
    image.extend(kernel.nodes.iter().map(|n| n.0));
    let distance = convex_hull(&image).distance_to(w)?;
    if distance < clearance {
        return Err(Error::NearImage { point: w, distance });
    }
    let v: Vec<C64> = kernel.nodes.iter().map(|(p, wt)| wt / (w - p)).collect();
    Ok(compensated_sum(&v) / (2.0 * PI * I))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugacyCase {
    /// `Φ_φ φ(D) = D Φ_φ`.
    Derivative,
    /// `Φ_{log φ} φ(D) = τ_1 Φ_{log φ}`.
    Translation,
    /// `Φ_{ψ^{-1}∘φ} φ(D) = ψ(D) Φ_{ψ^{-1}∘φ}`.
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub absolute: f64,
    /// `absolute / max(1, max |right side|)`.
    pub relative: f64,
}

/// Region around the frequencies of `f` used when `φ` is entire.
fn working_region(phi: &SymbolGerm, f: &ExpSum) -> Region {
    match phi.validity() {
        Region::Near { .. } => phi.validity().clone(),
        Region::Plane => Region::near(f.exact_cid(), DEFAULT_CLEARANCE),
    }
}

/// The germ `log φ` with the default branch on the working region.
pub fn log_symbol(phi: &SymbolGerm, f: &ExpSum) -> Result<SymbolGerm> {
    SymbolGerm::logarithm(phi.clone(), working_region(phi, f), None)
}

/// The germ `ψ^{-1} ∘ φ` near the frequencies of `f`. The inverse branch
/// passes through `center` (default: Newton solution of `ψ(c) = φ(k₀)`
/// started at the centroid `k₀` of `K(f)`).
pub fn psi_chi_symbol(phi: &SymbolGerm, psi: &SymbolGerm, f: &ExpSum, center: Option<C64>) -> Result<SymbolGerm> {
    let cid = f.exact_cid();
    let k0 = cid.centroid().ok_or(Error::EmptySet { op: "psi_chi_symbol" })?;
    let target = phi.value(k0)?;
    let c = match center {
        Some(c) => c,
        None => newton_solve(psi, target, k0)?,
    };
    let image = image_hull(phi, &cid, &f.frequencies())?;
    let inv = SymbolGerm::local_inverse(psi.clone(), c, Region::near(image, DEFAULT_CLEARANCE))?;
    Ok(SymbolGerm::compose(inv, phi.clone()))
}

fn newton_solve(psi: &SymbolGerm, target: C64, start: C64) -> Result<C64> {
    let mut u = start;
    for _ in 0..200 {
        let j = psi.jet(u, 1)?;
        let d = j.coeffs()[1];
        if d == ZERO {
            return Err(Error::SingularInverse { center: u, derivative: d });
        }
        let res = (j.coeffs()[0] - target).norm();
        let mut du = (j.coeffs()[0] - target) / d;
        // Steps are capped at unit length, then shortened until the residual decreases.
        if du.norm() > 1.0 {
            du /= du.norm();
        }
        let mut step = 1.0;
        let mut next = u - du;
        while step > 1e-6 {
            match psi.value(next) {
                Ok(v) if (v - target).norm() < res || res == 0.0 => break,
                _ => {
                    step *= 0.5;
                    next = u - du * step;
                }
            }
        }
        u = next;
        if (du * step).norm() <= 1e-15 * (1.0 + u.norm()) {
            return Ok(u);
        }
    }
    if (psi.value(u)? - target).norm() <= 1e-12 * (1.0 + target.norm()) {
        Ok(u)
    } else {
        Err(Error::InverseNoConvergence { point: target })
    }
}

fn residual_on_grid(left: &ExpSum, right: &ExpSum, grid: &[C64]) -> Residual {
    let pairs = par::map(grid, |&z| ((left.evaluate(z) - right.evaluate(z)).norm(), right.evaluate(z).norm()));
    let absolute = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let scale = pairs.iter().map(|p| p.1).fold(1.0, f64::max);
    Residual {
        absolute,
        relative: absolute / scale,
    }
}

/// Both sides of a quasi-conjugacy identity computed exactly and compared
/// on `grid`.
pub fn conjugacy_residual(
    case: ConjugacyCase,
    phi: &SymbolGerm,
    psi: Option<&SymbolGerm>,
    f: &ExpSum,
    grid: &[C64],
) -> Result<Residual> {
    let phi_f = apply_operator_exact(phi, f)?;
    let (left, right) = match case {
        ConjugacyCase::Derivative => (
            phi_transform_exact(phi, &phi_f)?,
            phi_transform_exact(phi, f)?.differentiate(),
        ),
        ConjugacyCase::Translation => {
            let l = log_symbol(phi, f)?;
            (
                phi_transform_exact(&l, &phi_f)?,
                phi_transform_exact(&l, f)?.translate_argument(ONE),
            )
        }
        ConjugacyCase::Psi => {
            let psi = psi.ok_or_else(|| Error::Config("psi case needs a second symbol".into()))?;
            let chi = psi_chi_symbol(phi, psi, f, None)?;
            (
                phi_transform_exact(&chi, &phi_f)?,
                apply_operator_exact(psi, &phi_transform_exact(&chi, f)?)?,
            )
        }
    };
    Ok(residual_on_grid(&left, &right, grid))
}

/// `max_n |Φ_{log φ} f(n) - φ(D)^n f(0)|` over `0 ≤ n ≤ n_max`, divided by
/// the largest orbit value (at least 1).
pub fn verify_interpolation(phi: &SymbolGerm, f: &ExpSum, n_max: usize) -> Result<f64> {
    let g = phi_transform_exact(&log_symbol(phi, f)?, f)?;
    let mut orbit = OrbitStepper::new(phi, f)?;
    let mut err: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            orbit.step()?;
        }
        let (v, e) = orbit.evaluate_scaled(ZERO);
        let orbit_value = v * crate::operators::pow2(e);
        let interp = g.evaluate(C64::new(n as f64, 0.0));
        err = err.max((orbit_value - interp).norm());
        scale = scale.max(orbit_value.norm());
    }
    Ok(err / scale)
}
