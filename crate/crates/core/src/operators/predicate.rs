use super::symbol::SymbolGerm;
use crate::convex_geom::{ConvexPolygon, Shape};
use crate::error::{Error, Result};
use crate::numeric::C64;
use crate::par;

/// Tolerance on `||φ| - 1|` for witnesses and certified margins.
pub const PREDICATE_TOL: f64 = 1e-9;
const START_DIVISIONS: usize = 16;
const MAX_DIVISIONS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `φ(K)` misses the unit circle.
    No,
    /// `φ(K)` meets the unit circle at the witness.
    Yes,
    Undetermined,
}

/// Which side of the unit circle `φ(K)` lies on when it misses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Inside,
    Outside,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateReport {
    pub verdict: Verdict,
    pub witness: Option<C64>,
    pub side: Side,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub samples: usize,
    /// Lipschitz bound used for the certificate, times the mesh size.
    pub grid_margin: f64,
}

/// Grid of `K` with spacing `mesh`: barycentric lattice on a fan
/// triangulation, a uniform subdivision for a segment, or the point itself.
pub(crate) fn sample_convex(k: &ConvexPolygon, m: usize) -> (Vec<C64>, f64) {
    let v = k.vertices();
    match k.shape() {
        Shape::Empty => (Vec::new(), 0.0),
        Shape::Point => (vec![v[0]], 0.0),
        Shape::Segment => {
            let (a, b) = (v[0], v[1]);
            let pts = (0..=m).map(|i| a + (b - a) * (i as f64 / m as f64)).collect();
            (pts, (b - a).norm() / m as f64)
        }
        Shape::Polygon => {
            let mut pts = Vec::new();
            let mut longest: f64 = 0.0;
            for t in 1..v.len() - 1 {
                let (a, b, c) = (v[0], v[t], v[t + 1]);
                longest = longest.max((b - a).norm()).max((c - a).norm()).max((c - b).norm());
                for i in 0..=m {
                    for j in 0..=(m - i) {
                        pts.push(a + (b - a) * (i as f64 / m as f64) + (c - a) * (j as f64 / m as f64));
                    }
                }
            }
            (pts, longest / m as f64)
        }
    }
}

/// Decides whether `φ(K)` meets the unit circle.
pub fn hypercyclicity_predicate(phi: &SymbolGerm, k: &ConvexPolygon, tol: f64) -> Result<PredicateReport> {
    if k.is_empty() {
        return Err(Error::EmptySet {
            op: "hypercyclicity_predicate",
        });
    }
    let mut m = START_DIVISIONS;
    let mut last = None;
    while m <= MAX_DIVISIONS {
        let (pts, mesh) = sample_convex(k, m);
        let vals = par::map(&pts, |&z| phi.jet(z, 1).map(|j| (j.coeffs()[0].norm(), j.coeffs()[1].norm())));
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        let min = vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        let max = vals.iter().map(|v| v.0).fold(0.0, f64::max);
        let lip = 2.0 * vals.iter().map(|v| v.1).fold(0.0, f64::max);
        let mut report = PredicateReport {
            verdict: Verdict::Undetermined,
            witness: None,
            side: Side::Both,
            min_modulus: min,
            max_modulus: max,
            samples: pts.len(),
            grid_margin: lip * mesh,
        };
        if let Some(i) = vals.iter().position(|v| (v.0 - 1.0).abs() <= tol) {
            report.verdict = Verdict::Yes;
            report.witness = Some(pts[i]);
            return Ok(report);
        }
        let below = vals.iter().position(|v| v.0 < 1.0);
        let above = vals.iter().position(|v| v.0 > 1.0);
        match (below, above) {
            (Some(i), Some(j)) => {
                let w = bisect_unit_modulus(phi, pts[i], pts[j])?;
                if (phi.value(w)?.norm() - 1.0).abs() <= tol.max(1e-12) {
                    report.verdict = Verdict::Yes;
                    report.witness = Some(w);
                    return Ok(report);
                }
            }
            (Some(_), None) => {
                report.side = Side::Inside;
                if max + lip * mesh < 1.0 - tol {
                    report.verdict = Verdict::No;
                    return Ok(report);
                }
            }
            (None, Some(_)) => {
                report.side = Side::Outside;
                if min - lip * mesh > 1.0 + tol {
                    report.verdict = Verdict::No;
                    return Ok(report);
                }
            }
            (None, None) => unreachable!("non-empty grid"),
        }
        if mesh == 0.0 {
            return Ok(report);
        }
        last = Some(report);
        m *= 2;
    }
    Ok(last.expect("at least one pass"))
}

/// Root of `log|φ|` on the segment `[a, b]` with `|φ(a)| < 1 < |φ(b)|`.
fn bisect_unit_modulus(phi: &SymbolGerm, mut a: C64, mut b: C64) -> Result<C64> {
    for _ in 0..200 {
        let mid = (a + b) * 0.5;
        if mid == a || mid == b {
            break;
        }
        if phi.value(mid)?.norm() < 1.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (fa, fb) = (phi.value(a)?.norm() - 1.0, phi.value(b)?.norm() - 1.0);
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
