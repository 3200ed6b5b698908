//! Orbit experiments for `φ(D)`: visit times and densities, orbit steering
//! through expanding eigenfunctions, and a sign-change probe for singleton
//! diagrams.

mod density;
mod orbit;
mod probe;
mod steering;

pub use density::{lower_density, lower_density_indices, lower_density_window, DensityEstimate, DEFAULT_WINDOW};
pub use orbit::{
    default_disk_grid, disk_grid, orbit_run, orbit_run_with, OrbitOptions, OrbitRecord, OrbitRun, SPOT_CHECK_EVERY,
    SPOT_CHECK_TOL,
};
pub use probe::{fhc_obstruction_probe, ProbeMode, ProbeReport, INTERIOR_SAMPLES, SECTOR_HALF_ANGLE};
pub use steering::{godefroy_shapiro_vector, SteeringReport, SteeringVector, EXPANSION_MARGIN, MAX_BASIS, RIDGE};

use crate::convex_geom::ConvexPolygon;
use crate::error::{Error, Result};
use crate::growth::{level_set_trace, Window};
use crate::operators::SymbolGerm;

/// Portion of `C_φ` lying in `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcReport {
    pub pieces: Vec<Vec<crate::C64>>,
    pub length: f64,
}

impl ArcReport {
    /// Whether `φ(K)` contains an arc of the unit circle (a piece of `C_φ`
    /// of positive length inside `K`).
    pub fn has_arc(&self) -> bool {
        self.length > 0.0
    }
}

/// Traces `C_φ` over the bounding box of `K` and keeps the parts inside `K`.
pub fn unit_circle_arc(phi: &SymbolGerm, k: &ConvexPolygon, resolution: usize) -> Result<ArcReport> {
    let v = k.vertices();
    if v.is_empty() {
        return Err(Error::EmptySet { op: "unit_circle_arc" });
    }
    let pad = 0.05 * (1.0 + k.max_modulus());
    let window = Window {
        x0: v.iter().map(|z| z.re).fold(f64::INFINITY, f64::min) - pad,
        x1: v.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) + pad,
        y0: v.iter().map(|z| z.im).fold(f64::INFINITY, f64::min) - pad,
        y1: v.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max) + pad,
    };
    let ls = level_set_trace(phi, window, resolution)?;
    let tol = 1e-7 * (1.0 + k.max_modulus());
    let mut pieces = Vec::new();
    let mut length = 0.0;
    for line in &ls.polylines {
        let mut cur: Vec<crate::C64> = Vec::new();
        for &p in line {
            if k.contains(p, tol) {
                if let Some(q) = cur.last() {
                    length += (p - q).norm();
                }
                cur.push(p);
            } else if !cur.is_empty() {
                pieces.push(std::mem::take(&mut cur));
            }
        }
        if !cur.is_empty() {
            pieces.push(cur);
        }
    }
    Ok(ArcReport { pieces, length })
}
