use crate::convex_geom::{dist_origin, point_segment_distance, PointSet};
use crate::error::{Error, Result};
use crate::numeric::{C64, ZERO};
use crate::operators::SymbolGerm;
use crate::par;
use std::collections::HashMap;

/// `log|φ|` is clamped to `±LOG_CLAMP` (zeros and poles of the field).
const LOG_CLAMP: f64 = 700.0;
/// Crossings are refined until `|log|φ|| ≤ CROSSING_TOL`.
pub const CROSSING_TOL: f64 = 1e-8;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn square(half_width: f64) -> Self {
        Window {
            x0: -half_width,
            x1: half_width,
            y0: -half_width,
            y1: half_width,
        }
    }

    /// Square of half-width `2 + τ` where `τ` is the symbol's type scale.
    pub fn default_for(phi: &SymbolGerm) -> Self {
        Window::square(2.0 + phi.type_estimate())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub polylines: Vec<Vec<C64>>,
    /// `dist(0, C_φ)` within the window, `None` when no crossing was found.
    pub tau: Option<f64>,
    /// Point of `C_φ` realising `tau`.
    pub nearest: Option<C64>,
}

fn log_mod(phi: &SymbolGerm, z: C64) -> Result<f64> {
    let v = phi.value(z)?.norm().ln();
    Ok(if v.is_nan() { -LOG_CLAMP } else { v.clamp(-LOG_CLAMP, LOG_CLAMP) })
}

/// Regula falsi on `log|φ|` between `a` and `b` (values of opposite sign).
fn refine(phi: &SymbolGerm, mut a: C64, mut fa: f64, mut b: C64, mut fb: f64) -> Result<C64> {
    let mut side = 0i8;
    for _ in 0..100 {
        let t = fa / (fa - fb);
        let m = a + (b - a) * t;
        let fm = log_mod(phi, m)?;
        if fm.abs() <= CROSSING_TOL || (b - a).norm() < 1e-15 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = m;
            fb = fm;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok(a + (b - a) * (fa / (fa - fb)))
}

/// Edge identifiers: horizontal edge `(i, j)-(i+1, j)` and vertical edge
/// `(i, j)-(i, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Traces `C_φ = {|φ| = 1}` in `window` with marching squares on `log|φ|`
/// over a `resolution × resolution` cell grid.
pub fn level_set_trace(phi: &SymbolGerm, window: Window, resolution: usize) -> Result<LevelSet> {
    if resolution < 2 || !(window.x1 > window.x0 && window.y1 > window.y0) {
        return Err(Error::Config("level set needs a non-degenerate window and resolution ≥ 2".into()));
    }
    let n = resolution;
    let dx = (window.x1 - window.x0) / n as f64;
    let dy = (window.y1 - window.y0) / n as f64;
    let node = |i: usize, j: usize| C64::new(window.x0 + i as f64 * dx, window.y0 + j as f64 * dy);
    let grid = par::map_range((n + 1) * (n + 1), |k| log_mod(phi, node(k % (n + 1), k / (n + 1))));
    let grid = grid.into_iter().collect::<Result<Vec<f64>>>()?;
    let val = |i: usize, j: usize| grid[j * (n + 1) + i];
    let neg = |v: f64| v < 0.0;

    // Crossing points per edge, refined in parallel.
    let mut edges = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            if i < n && neg(val(i, j)) != neg(val(i + 1, j)) {
                edges.push(Edge::H(i, j));
            }
            if j < n && neg(val(i, j)) != neg(val(i, j + 1)) {
                edges.push(Edge::V(i, j));
            }
        }
    }
    let points = par::map(&edges, |e| {
        let (a, b) = match *e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        refine(phi, node(a.0, a.1), val(a.0, a.1), node(b.0, b.1), val(b.0, b.1))
    });
    let mut crossing: HashMap<Edge, C64> = HashMap::with_capacity(edges.len());
    for (e, p) in edges.iter().zip(points) {
        crossing.insert(*e, p?);
    }

    // Segments per cell; saddles resolved by the cell-centre value.
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (bl, br, tr, tl) = (val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1));
            let code = (neg(bl) as u8) | (neg(br) as u8) << 1 | (neg(tr) as u8) << 2 | (neg(tl) as u8) << 3;
            let (b, r, t, l) = (Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j));
            match code {
                0 | 15 => {}
                1 | 14 => segments.push((l, b)),
                2 | 13 => segments.push((b, r)),
                3 | 12 => segments.push((l, r)),
                4 | 11 => segments.push((r, t)),
                6 | 9 => segments.push((b, t)),
                7 | 8 => segments.push((l, t)),
                5 | 10 => {
                    let centre = log_mod(phi, node(i, j) + C64::new(0.5 * dx, 0.5 * dy))?;
                    // Code 5: bottom-left and top-right negative.
                    let centre_matches_bl = neg(centre) == neg(bl);
                    if centre_matches_bl {
                        segments.push((l, t));
                        segments.push((b, r));
                    } else {
                        segments.push((l, b));
                        segments.push((r, t));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    let polylines: Vec<Vec<C64>> = link(&segments)
        .into_iter()
        .map(|chain| chain.iter().map(|e| crossing[e]).collect())
        .collect();

    let (d, found) = dist_origin(PointSet::Polylines(&polylines));
    if !found {
        return Ok(LevelSet {
            polylines,
            tau: None,
            nearest: None,
        });
    }
    let nearest = nearest_point(&polylines);
    let (tau, point) = polish_tau(phi, nearest, d, dx.max(dy))?;
    Ok(LevelSet {
        polylines,
        tau: Some(tau),
        nearest: Some(point),
    })
}

/// Joins segments sharing an edge crossing into maximal chains.
fn link(segments: &[(Edge, Edge)]) -> Vec<Vec<Edge>> {
    let mut adj: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    // Open chains start at edges used once; closed loops are picked up after.
    let mut starts: Vec<Edge> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    starts.sort_by_key(edge_key);
    let all: Vec<Edge> = {
        let mut v: Vec<Edge> = segments.iter().map(|s| s.0).collect();
        v.sort_by_key(edge_key);
        v
    };
    for start in starts.into_iter().chain(all) {
        let Some(&first) = adj[&start].iter().find(|&&k| !used[k]) else {
            continue;
        };
        let mut chain = vec![start];
        let mut cur = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == cur { b } else { a };
            chain.push(next);
            cur = next;
            match adj[&cur].iter().find(|&&k| !used[k]) {
                Some(&k) => seg = k,
                None => break,
            }
        }
        chains.push(chain);
    }
    chains
}

fn edge_key(e: &Edge) -> (u8, usize, usize) {
    match *e {
        Edge::H(i, j) => (0, j, i),
        Edge::V(i, j) => (1, j, i),
    }
}

fn nearest_point(polylines: &[Vec<C64>]) -> C64 {
    let mut best = (f64::INFINITY, ZERO);
    for line in polylines {
        for w in line.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ab = b - a;
            let t = if ab.norm_sqr() > 0.0 {
                (-(a.re * ab.re + a.im * ab.im) / ab.norm_sqr()).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let p = a + ab * t;
            if p.norm() < best.0 {
                best = (p.norm(), p);
            }
        }
        if line.len() == 1 && line[0].norm() < best.0 {
            best = (line[0].norm(), line[0]);
        }
    }
    best.1
}

/// Radial Newton for `log|φ(re^{iθ})| = 0` starting at `r0`.
fn radial_root(phi: &SymbolGerm, theta: f64, r0: f64) -> Option<f64> {
    let dir = C64::from_polar(1.0, theta);
    let mut r = r0;
    for _ in 0..50 {
        let j = phi.jet(dir * r, 1).ok()?;
        let (v, d) = (j.coeffs()[0], j.coeffs()[1]);
        if v == ZERO {
            return None;
        }
        let g = v.norm().ln();
        let dg = (d / v * dir).re;
        if dg == 0.0 || !dg.is_finite() {
            return None;
        }
        let step = g / dg;
        r -= step;
        if !(r > 0.0) || !r.is_finite() {
            return None;
        }
        if step.abs() <= 1e-14 * (1.0 + r) {
            return Some(r);
        }
    }
    None
}

/// Refines `dist(0, C_φ)`: radial Newton at the polyline's nearest point,
/// then a golden-section search over nearby angles.
fn polish_tau(phi: &SymbolGerm, p: C64, d: f64, cell: f64) -> Result<(f64, C64)> {
    if d <= 1e-12 || p.norm() <= 1e-12 {
        return Ok((d, p));
    }
    let theta0 = p.arg();
    let Some(r0) = radial_root(phi, theta0, p.norm()) else {
        return Ok((d, p));
    };
    if (r0 - d).abs() > 2.0 * cell {
        return Ok((d, p));
    }
    let half = (2.0 * cell / r0).min(0.5);
    let radius = |t: f64| radial_root(phi, t, r0).filter(|r| (r - r0).abs() <= 2.0 * cell).unwrap_or(f64::INFINITY);
    let (t_best, neg_r) = crate::numeric::golden_max(|t| -radius(t), theta0 - half, theta0 + half, 80);
    let (tau, theta) = if -neg_r < r0 { (-neg_r, t_best) } else { (r0, theta0) };
    Ok((tau, C64::from_polar(tau, theta)))
}

/// Symmetric Hausdorff distance between two polyline sets, measured from
/// vertices to segments.
pub fn polyline_hausdorff(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    fn one_sided(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
        let pts: Vec<C64> = a.iter().flatten().copied().collect();
        par::map(&pts, |&p| {
            b.iter()
                .flat_map(|l| {
                    l.windows(2)
                        .map(move |w| point_segment_distance(p, w[0], w[1]))
                        .chain(l.iter().take(usize::from(l.len() == 1)).map(move |q| (p - q).norm()))
                })
                .fold(f64::INFINITY, f64::min)
        })
        .into_iter()
        .fold(0.0, f64::max)
    }
    one_sided(a, b).max(one_sided(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_core::ExpSum;
    use crate::numeric::ONE;
    use crate::operators::Region;
    use crate::ConvexPolygon;

    #[test]
    fn unit_circle() {
        let ls = level_set_trace(&SymbolGerm::identity(), Window::square(2.0), 64).unwrap();
        assert!((ls.tau.unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(ls.polylines.len(), 1);
        let line = &ls.polylines[0];
        assert_eq!(line.first(), line.last());
        for p in line {
            assert!((p.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn exponential_lines() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let ls = level_set_trace(&e1, Window::default_for(&e1), 64).unwrap();
        assert!(ls.tau.unwrap() <= 1e-6);
        let two = SymbolGerm::entire(ExpSum::monomial(ONE, vec![C64::new(2.0, 0.0)]));
        let ls = level_set_trace(&two, Window::default_for(&two), 64).unwrap();
        assert!((ls.tau.unwrap() - 2f64.ln()).abs() < 1e-6);
        for p in ls.polylines.iter().flatten() {
            assert!((p.re + 2f64.ln()).abs() < 1e-8);
        }
    }

    #[test]
    fn reciprocal_has_same_level_set() {
        let phi = SymbolGerm::entire(ExpSum::from_terms([(ZERO, vec![C64::new(0.5, 0.0)]), (ONE, vec![ONE])]));
        let w = Window::square(1.5);
        let region = Region::near(ConvexPolygon::rectangle(w.x0, w.x1, w.y0, w.y1), 0.25);
        let inv = SymbolGerm::reciprocal(phi.clone(), region).unwrap();
        let a = level_set_trace(&phi, w, 48).unwrap();
        let b = level_set_trace(&inv, w, 48).unwrap();
        assert!(polyline_hausdorff(&a.polylines, &b.polylines) < 1e-6);
    }

    #[test]
    fn no_crossing() {
        let c = SymbolGerm::constant(C64::new(3.0, 0.0));
        let ls = level_set_trace(&c, Window::square(1.0), 8).unwrap();
        assert!(ls.polylines.is_empty() && ls.tau.is_none());
    }
}
