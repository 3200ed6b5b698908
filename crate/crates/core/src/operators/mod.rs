//! Symbols `φ` as holomorphic germs and the operators `φ(D)`.

mod apply;
mod ledger;
mod predicate;
mod symbol;

pub use apply::{
    apply_operator_contour, apply_operator_exact, apply_operator_series, compose_apply, invert_operator,
    iterate_operator, iterate_operator_power, power_jet, ContourKernel, OrbitStepper, SeriesApplication,
};
pub(crate) use ledger::pow2;
pub use ledger::{ScaledExpSum, ScaledTerm};
pub(crate) use predicate::sample_convex;
pub use predicate::{hypercyclicity_predicate, PredicateReport, Side, Verdict, PREDICATE_TOL};
pub use symbol::{image_winding, Region, SymbolGerm, SymbolKind, INVERSE_DERIVATIVE_MIN, WINDING_SAMPLES};

/// `φ^{(k)}(α)` for `k ≤ m`.
pub fn symbol_derivatives(phi: &SymbolGerm, alpha: crate::C64, m: usize) -> crate::Result<Vec<crate::C64>> {
    phi.derivatives(alpha, m)
}
