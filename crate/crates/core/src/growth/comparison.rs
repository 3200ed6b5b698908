use crate::error::{Error, Result};
use crate::exp_core::TaylorJet;
use crate::numeric::factorial;

/// Slack allowed in the monotonicity conditions.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// The last ratio must be below this fraction of the mid-ladder ratio.
pub const RATIO_DECAY: f64 = 0.9;

/// Coefficients `a_n` of a comparison function `Σ a_n z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonFunction {
    a: Vec<f64>,
}

impl ComparisonFunction {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Config("comparison function needs coefficients".into()));
        }
        Ok(ComparisonFunction { a })
    }

    /// `a_n = 1/n!`.
    pub fn exponential(len: usize) -> Self {
        ComparisonFunction {
            a: (0..len.max(1)).map(|n| 1.0 / factorial(n)).collect(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissibilityCondition {
    Positive,
    RatioDecreasing,
    RatioToZero,
    WeightedRatioDecreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// First failing condition and the index where it fails.
    pub violation: Option<(AdmissibilityCondition, usize)>,
}

/// Checks `a_n > 0`, `a_{n+1}/a_n` decreasing towards 0 and
/// `(n+1) a_{n+1}/a_n` non-increasing on the given coefficients.
pub fn admissibility_check(a: &ComparisonFunction) -> Admissibility {
    let fail = |c, i| Admissibility {
        admissible: false,
        violation: Some((c, i)),
    };
    let a = &a.a;
    if let Some(i) = a.iter().position(|x| !(*x > 0.0)) {
        return fail(AdmissibilityCondition::Positive, i);
    }
    let ratios: Vec<f64> = a.windows(2).map(|w| w[1] / w[0]).collect();
    for i in 1..ratios.len() {
        if ratios[i] > ratios[i - 1] * (1.0 + MONOTONE_SLACK) {
            return fail(AdmissibilityCondition::RatioDecreasing, i);
        }
    }
    if ratios.len() >= 2 {
        let (mid, last) = (ratios[ratios.len() / 2], ratios[ratios.len() - 1]);
        if last > RATIO_DECAY * mid {
            return fail(AdmissibilityCondition::RatioToZero, ratios.len() - 1);
        }
    }
    for i in 1..ratios.len() {
        let (prev, cur) = (i as f64 * ratios[i - 1], (i + 1) as f64 * ratios[i]);
        if cur > prev * (1.0 + MONOTONE_SLACK) {
            return fail(AdmissibilityCondition::WeightedRatioDecreasing, i);
        }
    }
    Admissibility {
        admissible: true,
        violation: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2Norm {
    pub value: f64,
    /// Set when the last term carries more than `1e-12` of the sum.
    pub tail_significant: bool,
}

/// `‖f‖_a = (Σ |c_n|² / a_n²)^{1/2}` over the jet.
pub fn e2_norm(jet: &TaylorJet, a: &ComparisonFunction) -> Result<E2Norm> {
    if jet.len() > a.a.len() {
        return Err(Error::Config(format!(
            "jet of length {} exceeds comparison ladder of length {}",
            jet.len(),
            a.a.len()
        )));
    }
    let terms: Vec<f64> = jet.coeffs.iter().zip(&a.a).map(|(c, an)| (c.norm() / an).powi(2)).collect();
    let sum: f64 = terms.iter().sum();
    let last = terms.last().copied().unwrap_or(0.0);
    Ok(E2Norm {
        value: sum.sqrt(),
        tail_significant: sum > 0.0 && last > 1e-12 * sum,
    })
}
