use super::ledger::{ScaledExpSum, ScaledTerm};
use super::symbol::{Region, SymbolGerm};
use crate::borel_polya::{BorelFunction, Contour, DEFAULT_CLEARANCE};
use crate::error::{Error, Result};
use crate::exp_core::{ExpSum, TaylorJet};
use crate::numeric::{compensated_sum, C64, I, ZERO};
use crate::par;
use crate::series::Series;
use std::f64::consts::{LN_2, PI};

/// `q_i = Σ_n a_n p_{i+n} (i+n)!/i!`: the action of `Σ a_n D^n` on a polynomial.
pub(crate) fn apply_jet_to_poly(a: &[C64], p: &[C64]) -> Vec<C64> {
    let mut q = vec![ZERO; p.len()];
    for (i, qi) in q.iter_mut().enumerate() {
        let mut ratio = 1.0; // (i+n)!/i!
        let mut acc = ZERO;
        for n in 0..p.len() - i {
            if n > 0 {
                ratio *= (i + n) as f64;
            }
            if n < a.len() {
                acc += a[n] * p[i + n] * ratio;
            }
        }
        *qi = acc;
    }
    q
}

/// `φ(D)f` termwise: `φ(D)(p e_α) = e_α Σ_n φ^{(n)}(α)/n! · p^{(n)}`.
pub fn apply_operator_exact(phi: &SymbolGerm, f: &ExpSum) -> Result<ExpSum> {
    let mut out = Vec::with_capacity(f.terms().len());
    for t in f.terms() {
        let jet = phi.jet(t.alpha(), t.degree())?;
        out.push((t.alpha(), apply_jet_to_poly(jet.coeffs(), t.poly())));
    }
    Ok(ExpSum::from_terms(out))
}

/// Result of applying `Σ c_n D^n` to a truncated Taylor jet.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesApplication {
    pub jet: TaylorJet,
    /// Largest final partial-sum increment over the output coefficients.
    pub truncation_error: f64,
    /// Number of input coefficients consumed by the truncation guard.
    pub guard: usize,
}

/// `d_k = Σ_n c_n · jet[n+k] · (n+k)!/k!`, keeping `N - guard` output
/// coefficients where `guard = len(coeffs) - 1`.
pub fn apply_operator_series(coeffs: &[C64], jet: &TaylorJet) -> Result<SeriesApplication> {
    if coeffs.is_empty() {
        return Err(Error::Config("operator needs at least one coefficient".into()));
    }
    let guard = coeffs.len() - 1;
    if jet.len() <= guard {
        return Err(Error::Config(format!(
            "jet of length {} is shorter than the truncation guard {}",
            jet.len(),
            guard + 1
        )));
    }
    let out_len = jet.len() - guard;
    let mut out = vec![ZERO; out_len];
    let mut tail: f64 = 0.0;
    for (k, d) in out.iter_mut().enumerate() {
        let mut ratio = 1.0;
        let mut terms = Vec::with_capacity(coeffs.len());
        for (n, c) in coeffs.iter().enumerate() {
            if n > 0 {
                ratio *= (n + k) as f64;
            }
            terms.push(c * jet.coeffs[n + k] * ratio);
        }
        let total = compensated_sum(&terms);
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::NonFinite { last_good: k });
        }
        // Partial sums are not Cauchy if the increments are still growing
        // at the cutoff.
        if terms.len() >= 8 {
            let half = terms.len() / 2;
            let early = terms[..half].iter().map(|t| t.norm()).fold(0.0, f64::max);
            let last = terms[terms.len() - 1].norm();
            if early > 0.0 && last > early {
                return Err(Error::Divergence(format!(
                    "partial sums of output coefficient {k} are not Cauchy (final increment {last:e})"
                )));
            }
        }
        tail = tail.max(terms.last().map(|t| t.norm()).unwrap_or(0.0));
        *d = total;
    }
    Ok(SeriesApplication {
        jet: TaylorJet {
            coeffs: out,
            type_bound: jet.type_bound,
            hull_bound: jet.hull_bound.clone(),
        },
        truncation_error: tail,
        guard,
    })
}

/// Precomputed `w_k B(ξ_k) φ(ξ_k)` on a contour.
pub struct ContourKernel {
    nodes: Vec<(C64, C64)>,
}

impl ContourKernel {
    pub fn new(phi: &SymbolGerm, b: &dyn BorelFunction, gamma: &Contour) -> Result<Self> {
        gamma.check_encloses(&b.singularities())?;
        let vals = par::map(gamma.nodes(), |n| phi.value(n.xi).map(|p| (n.xi, n.weight * b.eval(n.xi) * p)));
        let nodes = vals.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(ContourKernel { nodes })
    }

    pub fn eval(&self, z: C64) -> C64 {
        let v: Vec<C64> = self.nodes.iter().map(|(xi, w)| w * (xi * z).exp()).collect();
        compensated_sum(&v) / (2.0 * PI * I)
    }

    pub fn eval_many(&self, zs: &[C64]) -> Vec<C64> {
        par::map(zs, |&z| self.eval(z))
    }
}

/// `(1/2πi) ∮ B(ξ) φ(ξ) e^{ξz} dξ`.
pub fn apply_operator_contour(phi: &SymbolGerm, b: &dyn BorelFunction, gamma: &Contour, z: C64) -> Result<C64> {
    Ok(ContourKernel::new(phi, b, gamma)?.eval(z))
}

/// `(φ(D)(ψ(D)f), (φψ)(D)f)`.
pub fn compose_apply(phi: &SymbolGerm, psi: &SymbolGerm, f: &ExpSum) -> Result<(ExpSum, ExpSum)> {
    let chained = apply_operator_exact(phi, &apply_operator_exact(psi, f)?)?;
    let product = SymbolGerm::product(phi.clone(), psi.clone());
    Ok((chained, apply_operator_exact(&product, f)?))
}

/// `(1/φ)(D)f`. A bounded validity region of `φ` is used for the zero-free
/// check; otherwise the hull of the frequencies inflated by the default
/// clearance.
pub fn invert_operator(phi: &SymbolGerm, f: &ExpSum) -> Result<ExpSum> {
    if f.is_zero() {
        return Ok(ExpSum::zero());
    }
    let region = match phi.validity() {
        Region::Near { .. } => phi.validity().clone(),
        Region::Plane => Region::near(f.exact_cid(), DEFAULT_CLEARANCE),
    };
    let inv = SymbolGerm::reciprocal(phi.clone(), region)?;
    apply_operator_exact(&inv, f)
}

/// `φ(D)^n f` by `n` single applications, each term carried with a
/// power-of-two exponent.
pub fn iterate_operator(phi: &SymbolGerm, f: &ExpSum, n: u64) -> Result<ScaledExpSum> {
    let mut orbit = OrbitStepper::new(phi, f)?;
    for _ in 0..n {
        orbit.step()?;
    }
    Ok(ScaledExpSum::new(orbit.state().terms().to_vec()))
}

/// `(φ^n)(D) f` by one application of the `n`-th power germ, with the jet
/// of `φ^n` computed as `φ(α)^n · exp(n log(φ/φ(α)))`.
pub fn iterate_operator_power(phi: &SymbolGerm, f: &ExpSum, n: u64) -> Result<ScaledExpSum> {
    let mut out = Vec::with_capacity(f.terms().len());
    for t in f.terms() {
        let deg = t.degree();
        let jet = phi.jet(t.alpha(), deg)?;
        let a0 = jet.constant_term();
        let (power, exp2) = if a0 == ZERO {
            (jet.powi(n), 0i64)
        } else {
            let u = jet.scale(a0.inv());
            let log_u = u.log_with(ZERO).expect("unit constant term");
            let pow_u = log_u.scale(C64::new(n as f64, 0.0)).exp();
            let l = C64::new(n as f64 * a0.norm().ln(), n as f64 * a0.arg());
            let e = (l.re / LN_2).floor() as i64;
            let mant = (l - C64::new(e as f64 * LN_2, 0.0)).exp();
            (pow_u.scale(mant), e)
        };
        let q = apply_jet_to_poly(power.coeffs(), t.poly());
        out.push(ScaledTerm::new(t.alpha(), q, exp2));
    }
    Ok(ScaledExpSum::new(out))
}

/// Successive iterates `φ(D)^n f`, `n = 0, 1, …`, with the jets of `φ` at
/// the frequencies of `f` computed once.
#[derive(Debug, Clone)]
pub struct OrbitStepper {
    jets: Vec<Vec<C64>>,
    state: ScaledExpSum,
    n: u64,
}

impl OrbitStepper {
    pub fn new(phi: &SymbolGerm, f: &ExpSum) -> Result<Self> {
        let jets = f
            .terms()
            .iter()
            .map(|t| phi.jet(t.alpha(), t.degree()).map(Series::into_coeffs))
            .collect::<Result<Vec<_>>>()?;
        let terms = f
            .terms()
            .iter()
            .map(|t| ScaledTerm::new(t.alpha(), t.poly().to_vec(), 0))
            .collect();
        Ok(OrbitStepper {
            jets,
            state: ScaledExpSum::from_terms_unfiltered(terms),
            n: 0,
        })
    }

    /// Advances to `φ(D)^{n+1} f`.
    pub fn step(&mut self) -> Result<()> {
        for (t, a) in self.state.terms_mut().iter_mut().zip(&self.jets) {
            t.mantissa = apply_jet_to_poly(a, &t.mantissa);
            if t.mantissa.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite { last_good: self.n as usize });
            }
            t.normalize();
        }
        self.n += 1;
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn state(&self) -> &ScaledExpSum {
        &self.state
    }

    pub fn evaluate_scaled(&self, z: C64) -> (C64, i64) {
        self.state.evaluate_scaled(z)
    }
}

/// Power germ jet used by tests and diagnostics.
pub fn power_jet(phi: &SymbolGerm, alpha: C64, order: usize, n: u64) -> Result<Series> {
    Ok(phi.jet(alpha, order)?.powi(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel_polya::{borel_of_expsum, make_cauchy_cycle};
    use crate::numeric::ONE;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn r(x: f64) -> C64 {
        c(x, 0.0)
    }

    #[test]
    fn eigen_relation() {
        let out = apply_operator_exact(&SymbolGerm::identity(), &ExpSum::exponential(r(2.0))).unwrap();
        assert_eq!(out, ExpSum::monomial(r(2.0), vec![r(2.0)]));
    }

    #[test]
    fn translation_of_z() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let out = apply_operator_exact(&e1, &ExpSum::polynomial(vec![ZERO, ONE])).unwrap();
        assert!(out.relative_distance(&ExpSum::polynomial(vec![ONE, ONE])) < 1e-15);
    }

    #[test]
    fn second_derivative() {
        let sq = SymbolGerm::polynomial(vec![ZERO, ZERO, ONE]);
        let f = ExpSum::monomial(ONE, vec![ZERO, ZERO, ONE]);
        let out = apply_operator_exact(&sq, &f).unwrap();
        let expect = ExpSum::monomial(ONE, vec![r(2.0), r(4.0), ONE]);
        assert!(out.relative_distance(&expect) < 1e-15);
    }

    #[test]
    fn series_translation() {
        let alpha = c(0.3, 0.4);
        let f = ExpSum::exponential(alpha);
        let jet = f.taylor_jet(40);
        let coeffs: Vec<C64> = (0..20).map(|n| r(1.0 / crate::numeric::factorial(n))).collect();
        let out = apply_operator_series(&coeffs, &jet).unwrap();
        let expect = ExpSum::monomial(alpha, vec![alpha.exp()]).taylor_jet(out.jet.len() - 1);
        for (a, b) in out.jet.coeffs.iter().zip(&expect.coeffs) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn series_identity_and_derivative() {
        let jet = ExpSum::exponential(r(0.7)).taylor_jet(10);
        let id = apply_operator_series(&[ONE], &jet).unwrap();
        assert_eq!(id.jet.coeffs, jet.coeffs);
        let d = apply_operator_series(&[ZERO, ONE], &jet).unwrap();
        assert_eq!(d.jet.len(), 10);
        for k in 0..10 {
            assert!((d.jet.coeffs[k] - jet.coeffs[k + 1] * (k + 1) as f64).norm() < 1e-16);
        }
    }

    #[test]
    fn contour_matches_exact() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let f = ExpSum::polynomial(vec![ZERO, ONE]);
        let b = borel_of_expsum(&f);
        let gamma = make_cauchy_cycle(&f.exact_cid(), 0.5, 256).unwrap();
        let v = apply_operator_contour(&e1, &b, &gamma, r(0.3)).unwrap();
        assert!((v - r(1.3)).norm() < 1e-12);
    }

    #[test]
    fn contour_outside_validity_fails() {
        let region = Region::disk(r(3.0), 1.0);
        let phi = SymbolGerm::reciprocal(SymbolGerm::identity(), region).unwrap();
        let f = ExpSum::exponential(r(3.0));
        let b = borel_of_expsum(&f);
        let gamma = make_cauchy_cycle(&f.exact_cid(), 2.0, 64).unwrap();
        assert!(matches!(
            apply_operator_contour(&phi, &b, &gamma, ZERO),
            Err(Error::OutsideValidity { .. })
        ));
    }

    #[test]
    fn composition_paths_agree() {
        let z = SymbolGerm::identity();
        let f = ExpSum::monomial(ONE, vec![ZERO, ONE]);
        let (a, b) = compose_apply(&z, &z, &f).unwrap();
        let expect = ExpSum::monomial(ONE, vec![r(2.0), ONE]);
        assert!(a.relative_distance(&expect) < 1e-15);
        assert!(b.relative_distance(&expect) < 1e-15);
    }

    #[test]
    fn inverse_translation() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let out = invert_operator(&e1, &ExpSum::polynomial(vec![ZERO, ONE])).unwrap();
        assert!(out.relative_distance(&ExpSum::polynomial(vec![-ONE, ONE])) < 1e-14);
        let z = SymbolGerm::identity();
        assert!(matches!(
            invert_operator(&z, &ExpSum::exponential(r(0.1))),
            Err(Error::NotZeroFree { .. })
        ));
    }

    #[test]
    fn iterates() {
        let alpha = c(0.5, 0.5);
        let out = iterate_operator(&SymbolGerm::identity(), &ExpSum::exponential(alpha), 5).unwrap();
        let expect = ExpSum::monomial(alpha, vec![alpha.powi(5)]);
        assert!(out.to_expsum().unwrap().relative_distance(&expect) < 1e-15);

        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let f = ExpSum::polynomial(vec![ZERO, ZERO, ONE]);
        let out = iterate_operator(&e1, &f, 3).unwrap().to_expsum().unwrap();
        assert!(out.relative_distance(&ExpSum::polynomial(vec![r(9.0), r(6.0), ONE])) < 1e-14);
        let pow = iterate_operator_power(&e1, &f, 3).unwrap().to_expsum().unwrap();
        assert!(pow.relative_distance(&out) < 1e-13);
    }

    #[test]
    fn iterate_past_double_range() {
        let phi = SymbolGerm::constant(r(1e10));
        let f = ExpSum::monomial(ZERO, vec![ONE, ONE]);
        let a = iterate_operator(&phi, &f, 100).unwrap();
        let b = iterate_operator_power(&phi, &f, 100).unwrap();
        assert!(!a.fits_in_double());
        assert!((a.log_abs(ZERO) - 1000.0 * 10f64.ln()).abs() < 1e-9);
        assert!(a.relative_distance(&b) < 1e-10);
    }
}
