//! Exact and numerical computation with entire functions of exponential type.
//!
//! The exact class is the exponential polynomials ([`ExpSum`]). On top of it
//! the crate provides the Borel transform and Pólya reconstruction by contour
//! quadrature, generalized differential operators `φ(D)`, the quasi-conjugating
//! transform `Φ_φ`, growth analytics (indicator functions, conjugate indicator
//! diagrams, seminorms, level sets) and orbit diagnostics.
//!
//! Grid and quadrature evaluations run on rayon when the `parallel` feature is
//! enabled (the default) and sequentially otherwise; results are identical.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borel_polya;
pub mod convex_geom;
pub mod dynamics;
pub mod error;
pub mod exp_core;
pub mod growth;
pub mod numeric;
pub mod operators;
pub mod par;
pub mod phi_transform;
pub mod series;

pub use borel_polya::{BorelFunction, Contour, RationalBorel};
pub use convex_geom::ConvexPolygon;
pub use error::{Error, Result};
pub use exp_core::{ExpMonomial, ExpSum, TaylorJet};
pub use numeric::C64;
pub use operators::{Region, SymbolGerm};
