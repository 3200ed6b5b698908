use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the library. Each variant belongs to one module and
/// carries a stable code (see [`Error::code`]) so front ends can report it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operation `{op}` is undefined on the empty set")]
    EmptySet { op: &'static str },

    #[error("half-plane system is infeasible: {0}")]
    Infeasible(String),

    #[error("evaluation point {point} lies within {distance:e} of pole {pole}")]
    NearPole {
        point: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("|xi| = {xi_abs} is inside the divergence disk of radius {radius}")]
    OutsideDivergenceDisk { xi_abs: f64, radius: f64 },

    #[error("contour winds {found} times around {point}, expected {expected}")]
    Winding {
        point: Complex64,
        expected: i64,
        found: i64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("point {point} is outside the validity region of the symbol")]
    OutsideValidity { point: Complex64 },

    #[error("symbol has a zero in its validity region (winding number {winding})")]
    NotZeroFree { winding: i64 },

    #[error("symbol vanishes at {point}")]
    ZeroOfSymbol { point: Complex64 },

    #[error("derivative {derivative} at {center} is too small for a local inverse")]
    SingularInverse {
        center: Complex64,
        derivative: Complex64,
    },

    #[error("local inverse failed to converge at {point}")]
    InverseNoConvergence { point: Complex64 },

    #[error("evaluation point {point} is too close to the image of the contour (distance {distance:e})")]
    NearImage { point: Complex64, distance: f64 },

    #[error("series does not converge: {0}")]
    Divergence(String),

    #[error("value overflow after step {last_good}")]
    Overflow { last_good: usize },

    #[error("non-finite value encountered after step {last_good}")]
    NonFinite { last_good: usize },

    #[error("least-squares fit residual {residual:e} exceeds {limit:e}")]
    FitFailure { residual: f64, limit: f64 },

    #[error("refused: {0}")]
    Refused(String),

    #[error("conjugate indicator diagram is not the singleton {{{expected}}}")]
    NotSingleton { expected: Complex64 },
}

impl Error {
    /// Module-qualified code, e.g. `borel_polya.near_pole`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySet { .. } => "convex_geom.empty_set",
            Error::Infeasible(_) => "convex_geom.infeasible",
            Error::NearPole { .. } => "borel_polya.near_pole",
            Error::OutsideDivergenceDisk { .. } => "borel_polya.divergence_disk",
            Error::Winding { .. } => "borel_polya.winding",
            Error::Config(_) => "config.invalid",
            Error::OutsideValidity { .. } => "operators.outside_validity",
            Error::NotZeroFree { .. } => "operators.not_zero_free",
            Error::ZeroOfSymbol { .. } => "operators.zero_of_symbol",
            Error::SingularInverse { .. } => "operators.singular_inverse",
            Error::InverseNoConvergence { .. } => "operators.inverse_no_convergence",
            Error::NearImage { .. } => "phi_transform.near_image",
            Error::Divergence(_) => "operators.divergence",
            Error::Overflow { .. } => "dynamics.overflow",
            Error::NonFinite { .. } => "dynamics.non_finite",
            Error::FitFailure { .. } => "dynamics.fit_failure",
            Error::Refused(_) => "dynamics.refused",
            Error::NotSingleton { .. } => "dynamics.not_singleton",
        }
    }

    /// Numeric failures (as opposed to violated preconditions).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_)
                | Error::InverseNoConvergence { .. }
                | Error::Divergence(_)
                | Error::Overflow { .. }
                | Error::NonFinite { .. }
                | Error::FitFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
