//! Growth analytics: maximum modulus, exponential type, indicator functions
//! and diagrams, `Exp(K)` seminorms, `E²(a)` norms and the level set
//! `C_φ = {|φ| = 1}`.

mod comparison;
mod indicator;
mod level_set;
mod modulus;
mod seminorm;

pub use comparison::{
    admissibility_check, e2_norm, Admissibility, AdmissibilityCondition, ComparisonFunction, E2Norm, MONOTONE_SLACK,
    RATIO_DECAY,
};
pub use indicator::{
    cid_estimate, default_ladder, indicator_estimate, indicator_exact, indicator_regression, CidEstimate, IndicatorMethod,
    IndicatorProfile, ZERO_REJECT,
};
pub use level_set::{level_set_trace, polyline_hausdorff, LevelSet, Window, CROSSING_TOL};
pub use modulus::{
    exp_type_estimate, exp_type_estimate_expsum, exp_type_regression, linear_ladder, log_max_modulus, lp_average,
    max_modulus, TypeEstimate, DEFAULT_SAMPLES,
};
pub use seminorm::{seminorm, Seminorm, SEMINORM_RAYS};
