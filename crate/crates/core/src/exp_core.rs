//! Exponential polynomials `Σ_j p_j(z) e^{α_j z}` and truncated Taylor jets.
//!
//! `ExpSum` is the exact class every other module computes on: it is closed
//! under differentiation, generalized differential operators, the
//! quasi-conjugating transform and the Borel transform.

use crate::convex_geom::{convex_hull, ConvexPolygon};
use crate::numeric::{factorials, binomial_row, C64, ONE, ZERO};
use std::ops::{Add, Mul, Neg, Sub};

/// Two frequencies closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-9;
/// Leading coefficients below `TRIM_REL * max|coeff|` are dropped.
pub const TRIM_REL: f64 = 1e-14;

/// `p(z) e^{αz}` with `p` in ascending coefficient order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpMonomial {
    alpha: C64,
    poly: Vec<C64>,
}

impl ExpMonomial {
    /// Returns `None` for the zero polynomial.
    pub fn new(alpha: C64, poly: Vec<C64>) -> Option<Self> {
        let poly = trim(poly);
        if poly.is_empty() {
            None
        } else {
            Some(ExpMonomial { alpha, poly })
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn poly(&self) -> &[C64] {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn evaluate(&self, z: C64) -> C64 {
        poly_eval(&self.poly, z) * (self.alpha * z).exp()
    }
}

/// Drops trailing (leading-degree) coefficients that are negligible.
pub(crate) fn trim(mut poly: Vec<C64>) -> Vec<C64> {
    let max = poly.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Vec::new();
    }
    while let Some(last) = poly.last() {
        if last.norm() <= TRIM_REL * max {
            poly.pop();
        } else {
            break;
        }
    }
    poly
}

pub(crate) fn poly_eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

pub(crate) fn poly_derivative(p: &[C64]) -> Vec<C64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Coefficients of `p(z + a)`.
pub(crate) fn poly_shift(p: &[C64], a: C64) -> Vec<C64> {
    let n = p.len();
    let mut out = vec![ZERO; n];
    for (i, c) in p.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let row = binomial_row(i);
        let mut apow = ONE;
        for k in (0..=i).rev() {
            out[k] += c * row[k] * apow;
            apow *= a;
        }
    }
    out
}

/// Finite sum of exponential monomials with pairwise distinct frequencies.
/// The empty sum is the zero function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpSum {
    terms: Vec<ExpMonomial>,
}

impl ExpSum {
    pub fn zero() -> Self {
        ExpSum { terms: Vec::new() }
    }

    /// `e_α(z) = e^{αz}`.
    pub fn exponential(alpha: C64) -> Self {
        Self::monomial(alpha, vec![ONE])
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(ZERO, vec![c])
    }

    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        Self::monomial(ZERO, coeffs)
    }

    pub fn monomial(alpha: C64, poly: Vec<C64>) -> Self {
        Self::from_terms([(alpha, poly)])
    }

    /// Merges frequencies within [`DEDUP_TOL`] and drops zero terms.
    pub fn from_terms<I: IntoIterator<Item = (C64, Vec<C64>)>>(terms: I) -> Self {
        Self::from_terms_with_tol(terms, DEDUP_TOL)
    }

    pub fn from_terms_with_tol<I: IntoIterator<Item = (C64, Vec<C64>)>>(terms: I, tol: f64) -> Self {
        let mut merged: Vec<(C64, Vec<C64>)> = Vec::new();
        for (alpha, poly) in terms {
            if let Some((_, acc)) = merged.iter_mut().find(|(a, _)| (a - alpha).norm() <= tol) {
                if acc.len() < poly.len() {
                    acc.resize(poly.len(), ZERO);
                }
                for (k, c) in poly.into_iter().enumerate() {
                    acc[k] += c;
                }
            } else {
                merged.push((alpha, poly));
            }
        }
        ExpSum {
            terms: merged
                .into_iter()
                .filter_map(|(a, p)| ExpMonomial::new(a, p))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[ExpMonomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn frequencies(&self) -> Vec<C64> {
        self.terms.iter().map(|t| t.alpha).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.degree()).max().unwrap_or(0)
    }

    /// Largest frequency modulus, the exponential type.
    pub fn exponential_type(&self) -> f64 {
        self.terms.iter().map(|t| t.alpha.norm()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, z: C64) -> C64 {
        self.terms.iter().map(|t| t.evaluate(z)).sum()
    }

    /// `ln|f(z)|` without overflow: the largest `Re(α z)` is factored out.
    pub fn log_abs(&self, z: C64) -> f64 {
        if self.terms.is_empty() {
            return f64::NEG_INFINITY;
        }
        let shift = self
            .terms
            .iter()
            .map(|t| (t.alpha * z).re)
            .fold(f64::NEG_INFINITY, f64::max);
        let s: C64 = self
            .terms
            .iter()
            .map(|t| poly_eval(&t.poly, z) * (t.alpha * z - shift).exp())
            .sum();
        s.norm().ln() + shift
    }

    /// Termwise `(p' + αp) e^{αz}`.
    pub fn differentiate(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| {
            let mut q: Vec<C64> = t.poly.iter().map(|c| c * t.alpha).collect();
            for (k, d) in poly_derivative(&t.poly).into_iter().enumerate() {
                q[k] += d;
            }
            (t.alpha, q)
        }))
    }

    /// `f · e_β`: every frequency shifted by `β`.
    pub fn multiply_by_exponential(&self, beta: C64) -> Self {
        ExpSum {
            terms: self
                .terms
                .iter()
                .map(|t| ExpMonomial {
                    alpha: t.alpha + beta,
                    poly: t.poly.clone(),
                })
                .collect(),
        }
    }

    /// `z ↦ f(z + a)`.
    pub fn translate_argument(&self, a: C64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| {
            let e = (t.alpha * a).exp();
            (t.alpha, poly_shift(&t.poly, a).into_iter().map(|c| c * e).collect())
        }))
    }

    pub fn add(&self, other: &ExpSum) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|t| (t.alpha, t.poly.clone())),
        )
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| (t.alpha, t.poly.iter().map(|p| p * c).collect())),
        )
    }

    /// Taylor coefficients `c_n = f^{(n)}(0)/n!` for `n ≤ order`:
    /// `c_n = Σ_k p_k α^{n-k}/(n-k)!` per term.
    pub fn taylor_jet(&self, order: usize) -> TaylorJet {
        let inv_fact: Vec<f64> = factorials(order).into_iter().map(|f| 1.0 / f).collect();
        let mut coeffs = vec![ZERO; order + 1];
        for t in &self.terms {
            let mut apow = vec![ONE; order + 1];
            for m in 1..=order {
                apow[m] = apow[m - 1] * t.alpha;
            }
            for (n, c) in coeffs.iter_mut().enumerate() {
                for (k, p) in t.poly.iter().enumerate().take(n + 1) {
                    *c += p * apow[n - k] * inv_fact[n - k];
                }
            }
        }
        TaylorJet {
            coeffs,
            type_bound: self.exponential_type(),
            hull_bound: Some(self.exact_cid()),
        }
    }

    /// Conjugate indicator diagram: convex hull of the frequencies.
    pub fn exact_cid(&self) -> ConvexPolygon {
        convex_hull(&self.frequencies())
    }

    /// Coefficientwise distance `max |Δ coeff| / max(1, max |coeff|)` after
    /// pairing frequencies within `DEDUP_TOL`.
    pub fn relative_distance(&self, other: &ExpSum) -> f64 {
        let diff = self.add(&other.scale(-ONE));
        let scale = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .flat_map(|t| t.poly.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        diff.terms
            .iter()
            .flat_map(|t| t.poly.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
            / scale
    }
}

impl Add for &ExpSum {
    type Output = ExpSum;
    fn add(self, rhs: &ExpSum) -> ExpSum {
        ExpSum::add(self, rhs)
    }
}

impl Sub for &ExpSum {
    type Output = ExpSum;
    fn sub(self, rhs: &ExpSum) -> ExpSum {
        ExpSum::add(self, &rhs.scale(-ONE))
    }
}

impl Neg for &ExpSum {
    type Output = ExpSum;
    fn neg(self) -> ExpSum {
        self.scale(-ONE)
    }
}

impl Mul<C64> for &ExpSum {
    type Output = ExpSum;
    fn mul(self, rhs: C64) -> ExpSum {
        self.scale(rhs)
    }
}

/// Truncated Taylor data `c_n = f^{(n)}(0)/n!` of an entire function with a
/// declared exponential-type bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    pub coeffs: Vec<C64>,
    pub type_bound: f64,
    pub hull_bound: Option<ConvexPolygon>,
}

impl TaylorJet {
    pub fn new(coeffs: Vec<C64>, type_bound: f64) -> Self {
        TaylorJet {
            coeffs,
            type_bound,
            hull_bound: None,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest index from which `|c_n|^{1/n} n/e ≤ type_bound (1 + slack)`
    /// holds for every later coefficient (Stirling-consistent decay).
    pub fn decay_index(&self, slack: f64) -> Option<usize> {
        let limit = self.type_bound * (1.0 + slack);
        let mut first_ok = None;
        for n in 1..self.coeffs.len() {
            let a = self.coeffs[n].norm();
            let rate = if a == 0.0 {
                0.0
            } else {
                a.powf(1.0 / n as f64) * n as f64 / std::f64::consts::E
            };
            if rate <= limit {
                first_ok.get_or_insert(n);
            } else {
                first_ok = None;
            }
        }
        first_ok
    }
}
