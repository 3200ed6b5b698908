use crate::error::{Error, Result};
use crate::exp_core::{poly_eval, ExpSum};
use crate::numeric::{C64, ZERO};

const RESCALE_ABOVE: f64 = 1.157920892373162e77; // 2^256
const RESCALE_BELOW: f64 = 8.636168555094445e-78; // 2^-256

/// One term `2^exp2 · p(z) e^{αz}` with the polynomial held as a mantissa.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTerm {
    pub alpha: C64,
    pub mantissa: Vec<C64>,
    pub exp2: i64,
}

impl ScaledTerm {
    pub fn new(alpha: C64, mantissa: Vec<C64>, exp2: i64) -> Self {
        let mut t = ScaledTerm { alpha, mantissa, exp2 };
        t.normalize();
        t
    }

    /// Moves powers of two between mantissa and exponent so the largest
    /// coefficient stays within `[2^-256, 2^256]`.
    pub fn normalize(&mut self) {
        let m = self.mantissa.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m == 0.0 || !m.is_finite() {
            return;
        }
        if !(RESCALE_BELOW..=RESCALE_ABOVE).contains(&m) {
            let e = m.log2().floor() as i64;
            let s = pow2(-e);
            for c in &mut self.mantissa {
                *c *= s;
            }
            self.exp2 += e;
        }
    }

    /// `(value mantissa, exp2)` with value = mantissa · 2^exp2.
    pub fn evaluate_scaled(&self, z: C64) -> (C64, i64) {
        (poly_eval(&self.mantissa, z) * (self.alpha * z).exp(), self.exp2)
    }
}

/// Multiplication by `2^e` in steps that stay exact within double range.
pub(crate) fn pow2(mut e: i64) -> f64 {
    let mut s = 1.0f64;
    while e > 1000 {
        s *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        s *= 2f64.powi(-1000);
        e += 1000;
    }
    s * 2f64.powi(e as i32)
}

/// An exponential polynomial whose terms carry separate power-of-two
/// exponents, so that orbits growing past `1e300` remain representable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScaledExpSum {
    terms: Vec<ScaledTerm>,
}

impl ScaledExpSum {
    pub fn new(terms: Vec<ScaledTerm>) -> Self {
        ScaledExpSum {
            terms: terms.into_iter().filter(|t| t.mantissa.iter().any(|c| *c != ZERO)).collect(),
        }
    }

    /// Keeps zero terms so that term positions stay aligned with a source.
    pub(crate) fn from_terms_unfiltered(terms: Vec<ScaledTerm>) -> Self {
        ScaledExpSum { terms }
    }

    pub(crate) fn terms_mut(&mut self) -> &mut [ScaledTerm] {
        &mut self.terms
    }

    pub fn from_expsum(f: &ExpSum) -> Self {
        Self::new(
            f.terms()
                .iter()
                .map(|t| ScaledTerm::new(t.alpha(), t.poly().to_vec(), 0))
                .collect(),
        )
    }

    pub fn terms(&self) -> &[ScaledTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exp2(&self) -> i64 {
        self.terms.iter().map(|t| t.exp2).max().unwrap_or(0)
    }

    /// True when every term fits in ordinary doubles.
    pub fn fits_in_double(&self) -> bool {
        self.terms.iter().all(|t| {
            let m = t.mantissa.iter().map(|c| c.norm()).fold(0.0, f64::max);
            m == 0.0 || (m.log2() + t.exp2 as f64).abs() < 1000.0
        })
    }

    pub fn to_expsum(&self) -> Result<ExpSum> {
        if !self.fits_in_double() {
            return Err(Error::Overflow { last_good: 0 });
        }
        Ok(ExpSum::from_terms(self.terms.iter().map(|t| {
            let s = pow2(t.exp2);
            (t.alpha, t.mantissa.iter().map(|c| c * s).collect())
        })))
    }

    /// Multiplies every term by `2^-shift`; used to normalize orbits.
    pub fn rescaled(&self, shift: i64) -> ScaledExpSum {
        ScaledExpSum {
            terms: self
                .terms
                .iter()
                .map(|t| ScaledTerm {
                    alpha: t.alpha,
                    mantissa: t.mantissa.clone(),
                    exp2: t.exp2 - shift,
                })
                .collect(),
        }
    }

    /// `(mantissa, exp2)` of the value at `z`; the mantissa is in double range.
    pub fn evaluate_scaled(&self, z: C64) -> (C64, i64) {
        let parts: Vec<(C64, i64)> = self.terms.iter().map(|t| t.evaluate_scaled(z)).collect();
        let top = parts.iter().map(|p| p.1).max().unwrap_or(0);
        let sum = parts.iter().map(|(v, e)| v * pow2(e - top)).sum();
        (sum, top)
    }

    /// Value at `z`; infinite when out of double range.
    pub fn evaluate(&self, z: C64) -> C64 {
        let (v, e) = self.evaluate_scaled(z);
        v * pow2(e)
    }

    /// `log|value|` at `z`, finite beyond the double range.
    pub fn log_abs(&self, z: C64) -> f64 {
        let (v, e) = self.evaluate_scaled(z);
        v.norm().ln() + e as f64 * std::f64::consts::LN_2
    }

    /// Coefficientwise relative distance after matching frequencies.
    pub fn relative_distance(&self, other: &ScaledExpSum) -> f64 {
        let scale = self.max_exp2().max(other.max_exp2());
        let a = self.rescaled(scale).to_expsum_lossy();
        let b = other.rescaled(scale).to_expsum_lossy();
        a.relative_distance(&b)
    }

    fn to_expsum_lossy(&self) -> ExpSum {
        ExpSum::from_terms(self.terms.iter().map(|t| {
            let s = pow2(t.exp2.max(-1100));
            (t.alpha, t.mantissa.iter().map(|c| c * s).collect())
        }))
    }
}
