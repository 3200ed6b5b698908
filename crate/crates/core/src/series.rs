//! Truncated power series in one variable, `Σ a_k t^k` for `k ≤ order`.
//!
//! These back every exact derivative computation: symbol germs, residues of
//! the quasi-conjugating transform, powers of symbols. All operations keep
//! the truncation order of their inputs.

use crate::numeric::{C64, ONE, ZERO};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<C64>,
}

impl Series {
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least a constant term");
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![ZERO; order + 1],
        }
    }

    pub fn constant(c: C64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c + t`, truncated.
    pub fn variable(c: C64, order: usize) -> Self {
        let mut s = Self::constant(c, order);
        if order >= 1 {
            s.coeffs[1] = ONE;
        }
        s
    }

    /// Series of `exp(beta t)`.
    pub fn exp_linear(beta: C64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = ONE;
        coeffs.push(term);
        for k in 1..=order {
            term = term * beta / k as f64;
            coeffs.push(term);
        }
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn constant_term(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.resize(order + 1, ZERO);
        self
    }

    pub fn scale(&self, c: C64) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `1 / self`; fails when the constant term vanishes.
    pub fn recip(&self) -> Option<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return None;
        }
        let n = self.order();
        let mut b = vec![ZERO; n + 1];
        b[0] = ONE / a0;
        for k in 1..=n {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * b[k - j];
            }
            b[k] = -acc / a0;
        }
        Some(Series { coeffs: b })
    }

    /// Formal derivative, order drops by one (kept at least 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: (1..=self.order())
                .map(|k| self.coeffs[k] * k as f64)
                .collect(),
        }
    }

    /// Formal antiderivative with constant `c`, order grows by one.
    pub fn integral(&self, c: C64) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c);
        for (k, a) in self.coeffs.iter().enumerate() {
            coeffs.push(a / (k + 1) as f64);
        }
        Series { coeffs }
    }

    /// `log(self)` with the constant term fixed to `log0` (a chosen logarithm
    /// of the constant coefficient).
    pub fn log_with(&self, log0: C64) -> Option<Self> {
        let n = self.order();
        if n == 0 {
            return if self.coeffs[0] == ZERO {
                None
            } else {
                Some(Series::constant(log0, 0))
            };
        }
        let inv = self.recip()?;
        let d = self.derivative();
        let q = d.mul_trunc(&inv.truncate(n - 1), n - 1);
        Some(q.integral(log0))
    }

    /// `exp(self)`.
    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut b = vec![ZERO; n + 1];
        b[0] = self.coeffs[0].exp();
        // b' = a' b  =>  k b_k = Σ_{j=1..k} j a_j b_{k-j}
        for k in 1..=n {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * b[k - j] * j as f64;
            }
            b[k] = acc / k as f64;
        }
        Series { coeffs: b }
    }

    /// Product truncated at `order`.
    pub fn mul_trunc(&self, other: &Series, order: usize) -> Self {
        let mut c = vec![ZERO; order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Series { coeffs: c }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut n: u64) -> Self {
        let order = self.order();
        let mut result = Series::constant(ONE, order);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_trunc(&base, order);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_trunc(&base, order);
            }
        }
        result
    }

    /// `outer(self(t))` where `outer` is a series around `self`'s constant
    /// term, i.e. `outer` is expanded in powers of `self - self(0)`.
    pub fn compose_into(&self, outer: &Series) -> Self {
        let order = self.order();
        let mut inner = self.clone();
        inner.coeffs[0] = ZERO;
        // Horner in the shifted inner series.
        let mut acc = Series::constant(outer.coeffs[outer.order().min(order)], order);
        for k in (0..outer.order().min(order)).rev() {
            acc = acc.mul_trunc(&inner, order);
            acc.coeffs[0] += outer.coeffs[k];
        }
        acc
    }

    /// Compositional inverse of `Σ_{k≥1} b_k t^k` (constant term ignored):
    /// returns `s ↦ t(s)` with `self(t(s)) - self(0) = s`.
    pub fn reversion(&self) -> Option<Self> {
        let order = self.order();
        if order == 0 {
            return Some(Series::zero(0));
        }
        let b1 = self.coeffs[1];
        if b1 == ZERO {
            return None;
        }
        let mut higher = self.clone();
        higher.coeffs[0] = ZERO;
        higher.coeffs[1] = ZERO;
        let s = Series::variable(ZERO, order);
        // Fixed point t = (s - Σ_{k≥2} b_k t^k) / b1, one order per sweep.
        let mut t = s.scale(ONE / b1);
        for _ in 0..order {
            let h = t.compose_into(&higher);
            t = (s.clone() - h).scale(ONE / b1);
        }
        Some(t)
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * t + c)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Series {
            coeffs: (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self + (-rhs)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.mul_trunc(rhs, self.order().min(rhs.order()))
    }
}
