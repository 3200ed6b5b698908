//! Compact convex sets in the plane, stored as counter-clockwise vertex
//! lists. The empty set, single points and segments are valid polygons.

use crate::error::{Error, Result};
use crate::numeric::{theta_grid, C64};
use std::f64::consts::PI;

/// Number of θ nodes used by [`hausdorff_distance`].
pub const HAUSDORFF_GRID: usize = 1024;
/// Redundancy tolerance for half-plane intersection.
pub const HALFPLANE_TOL: f64 = 1e-10;
/// Disk sampling used by [`minkowski_inflate`]; support deficit is
/// `r (1 - cos(π/256)) ≈ 7.5e-5 r`.
pub const INFLATE_ARC_NODES: usize = 256;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    vertices: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Empty,
    Point,
    Segment,
    Polygon,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon { vertices: Vec::new() }
    }

    pub fn point(p: C64) -> Self {
        ConvexPolygon { vertices: vec![p] }
    }

    pub fn segment(a: C64, b: C64) -> Self {
        convex_hull(&[a, b])
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        convex_hull(&[
            C64::new(x0, y0),
            C64::new(x1, y0),
            C64::new(x1, y1),
            C64::new(x0, y1),
        ])
    }

    /// Regular `n`-gon inscribed in the circle `|z - center| = radius`.
    pub fn regular(center: C64, radius: f64, n: usize) -> Self {
        let pts: Vec<C64> = (0..n)
            .map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
            .collect();
        convex_hull(&pts)
    }

    /// Builds a polygon from arbitrary vertices (normalised through the hull).
    pub fn from_vertices(vertices: Vec<C64>) -> Self {
        convex_hull(&vertices)
    }

    pub fn vertices(&self) -> &[C64] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn shape(&self) -> Shape {
        match self.vertices.len() {
            0 => Shape::Empty,
            1 => Shape::Point,
            2 => Shape::Segment,
            _ => Shape::Polygon,
        }
    }

    /// Signed area (non-negative for CCW).
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut a = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            a += p.re * q.im - q.re * p.im;
        }
        a / 2.0
    }

    pub fn centroid(&self) -> Option<C64> {
        let n = self.vertices.len();
        match n {
            0 => None,
            1 | 2 => Some(self.vertices.iter().sum::<C64>() / n as f64),
            _ => {
                let a = self.area();
                if a <= 0.0 {
                    return Some(self.vertices.iter().sum::<C64>() / n as f64);
                }
                let (mut cx, mut cy) = (0.0, 0.0);
                for i in 0..n {
                    let p = self.vertices[i];
                    let q = self.vertices[(i + 1) % n];
                    let cr = p.re * q.im - q.re * p.im;
                    cx += (p.re + q.re) * cr;
                    cy += (p.im + q.im) * cr;
                }
                Some(C64::new(cx / (6.0 * a), cy / (6.0 * a)))
            }
        }
    }

    /// Largest vertex modulus.
    pub fn max_modulus(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn translate(&self, by: C64) -> Self {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| v + by).collect(),
        }
    }

    /// Euclidean distance from `z` to the set (0 inside).
    pub fn distance_to(&self, z: C64) -> Result<f64> {
        let n = self.vertices.len();
        match n {
            0 => Err(Error::EmptySet { op: "distance_to" }),
            1 => Ok((z - self.vertices[0]).norm()),
            2 => Ok(point_segment_distance(z, self.vertices[0], self.vertices[1])),
            _ => {
                if self.contains(z, 0.0) {
                    return Ok(0.0);
                }
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let d = point_segment_distance(z, self.vertices[i], self.vertices[(i + 1) % n]);
                    best = best.min(d);
                }
                Ok(best)
            }
        }
    }

    /// Membership with an absolute slack `tol` on every edge inequality.
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        let n = self.vertices.len();
        match n {
            0 => false,
            1 | 2 => self.distance_to(z).map(|d| d <= tol).unwrap_or(false),
            _ => (0..n).all(|i| {
                let p = self.vertices[i];
                let q = self.vertices[(i + 1) % n];
                let e = q - p;
                let len = e.norm();
                // signed distance to the left of the edge
                cross(e, z - p) / len >= -tol
            }),
        }
    }

    /// Boundary sampled with `per_edge` points on each edge.
    pub fn boundary_points(&self, per_edge: usize) -> Vec<C64> {
        let n = self.vertices.len();
        if n <= 1 {
            return self.vertices.clone();
        }
        let mut pts = Vec::with_capacity(n * per_edge);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            for k in 0..per_edge {
                pts.push(p + (q - p) * (k as f64 / per_edge as f64));
            }
        }
        pts
    }
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

pub(crate) fn point_segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Minimal convex polygon containing `points` (monotone chain). Collinear
/// and duplicate points are dropped; degenerate inputs give a point or a
/// segment.
pub fn convex_hull(points: &[C64]) -> ConvexPolygon {
    let mut pts: Vec<C64> = points.iter().copied().filter(|p| p.re.is_finite() && p.im.is_finite()).collect();
    if pts.is_empty() {
        return ConvexPolygon::empty();
    }
    let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-12 * scale;
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() == 1 {
        return ConvexPolygon::point(pts[0]);
    }
    // Exact turn test first; tolerances are applied on the cyclic hull, where
    // near-duplicates are neighbours regardless of the sort order.
    let mut lower: Vec<C64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 2]) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<C64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 2]) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let mut verts = lower;
    let mut changed = true;
    while changed && verts.len() >= 2 {
        changed = false;
        let mut i = 0;
        while i < verts.len() && verts.len() >= 2 {
            let n = verts.len();
            let (prev, cur, next) = (verts[(i + n - 1) % n], verts[i], verts[(i + 1) % n]);
            let redundant = (cur - next).norm() <= eps || (n >= 3 && point_segment_distance(cur, prev, next) <= eps);
            if redundant {
                verts.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
    }
    if verts.len() == 1 {
        return ConvexPolygon::point(verts[0]);
    }
    // Start at the lexicographically smallest vertex so the hull of a hull
    // reproduces it exactly.
    let first = (0..verts.len())
        .min_by(|&i, &j| verts[i].re.total_cmp(&verts[j].re).then(verts[i].im.total_cmp(&verts[j].im)))
        .unwrap_or(0);
    verts.rotate_left(first);
    ConvexPolygon { vertices: verts }
}

/// `H_K(z) = max_{u ∈ K} Re(z u)`.
pub fn support_function(k: &ConvexPolygon, z: C64) -> Result<f64> {
    if k.is_empty() {
        return Err(Error::EmptySet { op: "support_function" });
    }
    Ok(k.vertices
        .iter()
        .map(|u| (z * u).re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Polygonal approximation of `K + r·D̄` whose support function lies in
/// `[H_K + r|z|(1 - 7.5e-5), H_K + r|z|]`.
pub fn minkowski_inflate(k: &ConvexPolygon, r: f64) -> Result<ConvexPolygon> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::Config(format!("inflation radius must be >= 0, got {r}")));
    }
    if r == 0.0 || k.is_empty() {
        return Ok(k.clone());
    }
    let disk: Vec<C64> = (0..INFLATE_ARC_NODES)
        .map(|j| C64::from_polar(r, 2.0 * PI * j as f64 / INFLATE_ARC_NODES as f64))
        .collect();
    let mut pts = Vec::with_capacity(k.vertices.len() * disk.len());
    for v in &k.vertices {
        pts.extend(disk.iter().map(|d| v + d));
    }
    Ok(convex_hull(&pts))
}

/// Sup-metric distance between support functions on a 1024-node θ-grid.
/// For convex bodies this is the Hausdorff distance.
pub fn hausdorff_distance(a: &ConvexPolygon, b: &ConvexPolygon) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet { op: "hausdorff_distance" });
    }
    let mut worst: f64 = 0.0;
    for t in theta_grid(HAUSDORFF_GRID) {
        let z = C64::from_polar(1.0, t);
        let d = (support_function(a, z)? - support_function(b, z)?).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Intersection of the half-planes `{u : Re(e^{iθ} u) ≤ h(θ)}`: an outer
/// approximation of the convex body with support samples `h`.
pub fn polygon_from_support_samples(samples: &[(f64, f64)]) -> Result<ConvexPolygon> {
    if samples.len() < 3 {
        return Err(Error::Config(format!(
            "need at least 3 support samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(t, h)| !t.is_finite() || !h.is_finite()) {
        return Err(Error::Infeasible("non-finite support sample".into()));
    }
    let mut thetas: Vec<f64> = samples.iter().map(|(t, _)| t.rem_euclid(2.0 * PI)).collect();
    thetas.sort_by(f64::total_cmp);
    let mut max_gap = thetas[0] + 2.0 * PI - thetas[thetas.len() - 1];
    for w in thetas.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    if max_gap >= PI - 1e-12 {
        return Err(Error::Config("support samples do not cover the circle".into()));
    }
    let bound = samples.iter().map(|(_, h)| h.abs()).fold(0.0, f64::max);
    let big = 4.0 * bound / (max_gap / 2.0).cos() + 1.0;
    let mut poly = vec![
        C64::new(-big, -big),
        C64::new(big, -big),
        C64::new(big, big),
        C64::new(-big, big),
    ];
    for &(t, h) in samples {
        // Re(e^{iθ} u) = <u, n> with n = conj(e^{iθ}).
        let nrm = C64::from_polar(1.0, -t);
        poly = clip_halfplane(&poly, nrm, h + HALFPLANE_TOL);
        if poly.is_empty() {
            return Err(Error::Infeasible(format!(
                "half-plane at theta = {t} empties the intersection"
            )));
        }
    }
    Ok(convex_hull(&poly))
}

/// Least-squares projection of support samples onto the profiles of convex
/// sets: the closest `g` (sorted by angle) satisfying the three-point
/// inequality `g(θ₋) sin(θ₊ − θ) + g(θ₊) sin(θ − θ₋) ≥ g(θ) sin(θ₊ − θ₋)`
/// at every sample. Every half-plane of the projected profile is tight, so
/// the intersection no longer collapses when a thin set meets a low sample.
/// Computed by Dykstra's alternating projections.
pub fn project_support_samples(samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut s: Vec<(f64, f64)> = samples.iter().map(|&(t, h)| (t.rem_euclid(2.0 * PI), h)).collect();
    if s.iter().any(|(t, h)| !t.is_finite() || !h.is_finite()) {
        return Err(Error::Infeasible("non-finite support sample".into()));
    }
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    s.dedup_by(|b, a| {
        let same = (b.0 - a.0).abs() <= 1e-14;
        if same {
            a.1 = a.1.min(b.1);
        }
        same
    });
    let n = s.len();
    if n < 3 {
        return Err(Error::Config(format!("need at least 3 distinct support samples, got {n}")));
    }
    // Constraint k: w · (g[k-1], g[k], g[k+1]) ≥ 0.
    let mut rows: Vec<(usize, [f64; 3], f64)> = Vec::with_capacity(n);
    for k in 0..n {
        let (km, kp) = ((k + n - 1) % n, (k + 1) % n);
        let gap = |a: f64, b: f64| (b - a).rem_euclid(2.0 * PI);
        let (dm, dp) = (gap(s[km].0, s[k].0), gap(s[k].0, s[kp].0));
        if dm + dp >= PI {
            continue;
        }
        let w = [dp.sin(), -(dm + dp).sin(), dm.sin()];
        let norm2 = w.iter().map(|x| x * x).sum::<f64>();
        rows.push((k, w, norm2));
    }
    let idx = |k: usize| [(k + n - 1) % n, k, (k + 1) % n];
    let dot = |g: &[f64], k: usize, w: &[f64; 3]| idx(k).iter().zip(w).map(|(&i, wi)| g[i] * wi).sum::<f64>();
    let mut g: Vec<f64> = s.iter().map(|p| p.1).collect();
    let scale = g.iter().map(|h| h.abs()).fold(1e-300, f64::max);
    if rows.iter().all(|(k, w, _)| dot(&g, *k, w) >= 0.0) {
        return Ok(s);
    }
    let mut corr = vec![[0.0; 3]; rows.len()];
    for _ in 0..200_000 {
        let mut moved: f64 = 0.0;
        for (r, (k, w, norm2)) in rows.iter().enumerate() {
            let ids = idx(*k);
            let z: [f64; 3] = std::array::from_fn(|j| g[ids[j]] + corr[r][j]);
            let v = z.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
            let step = if v < 0.0 { v / norm2 } else { 0.0 };
            for j in 0..3 {
                let p = z[j] - step * w[j];
                corr[r][j] = z[j] - p;
                moved = moved.max((g[ids[j]] - p).abs());
                g[ids[j]] = p;
            }
        }
        if moved <= 1e-14 * scale {
            break;
        }
    }
    Ok(s.iter().zip(g).map(|(&(t, _), h)| (t, h)).collect())
}

/// Convex hull of the intersections of adjacent support lines of a profile
/// sorted by angle. Each vertex depends only on two neighbouring samples, so
/// small residual inconsistencies stay local, unlike in the half-plane
/// intersection.
pub fn polygon_from_support_vertices(sorted: &[(f64, f64)]) -> Result<ConvexPolygon> {
    let n = sorted.len();
    if n < 3 {
        return Err(Error::Config(format!("need at least 3 support samples, got {n}")));
    }
    let mut pts = Vec::with_capacity(n);
    for k in 0..n {
        let ((t1, h1), (t2, h2)) = (sorted[k], sorted[(k + 1) % n]);
        // Lines x cos t - y sin t = h.
        let det = -t1.cos() * t2.sin() + t1.sin() * t2.cos();
        if det.abs() <= 1e-14 {
            return Err(Error::Config("adjacent support directions coincide".into()));
        }
        let x = (-h1 * t2.sin() + t1.sin() * h2) / det;
        let y = (t1.cos() * h2 - h1 * t2.cos()) / det;
        pts.push(C64::new(x, y));
    }
    Ok(convex_hull(&pts))
}

fn clip_halfplane(poly: &[C64], nrm: C64, h: f64) -> Vec<C64> {
    let val = |p: C64| p.re * nrm.re + p.im * nrm.im - h;
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (vp, vq) = (val(p), val(q));
        if vp <= 0.0 {
            out.push(p);
        }
        if (vp <= 0.0) != (vq <= 0.0) {
            let t = vp / (vp - vq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Input to [`dist_origin`].
pub enum PointSet<'a> {
    Points(&'a [C64]),
    Polylines(&'a [Vec<C64>]),
}

/// Distance from the origin to a discretised set. Polylines are refined by
/// projecting onto each segment. Returns `(distance, finite)`; an empty set
/// gives `(+∞, false)`.
pub fn dist_origin(set: PointSet<'_>) -> (f64, bool) {
    let mut best = f64::INFINITY;
    match set {
        PointSet::Points(pts) => {
            for p in pts {
                best = best.min(p.norm());
            }
        }
        PointSet::Polylines(lines) => {
            for line in lines {
                match line.len() {
                    0 => {}
                    1 => best = best.min(line[0].norm()),
                    _ => {
                        for w in line.windows(2) {
                            best = best.min(point_segment_distance(C64::new(0.0, 0.0), w[0], w[1]));
                        }
                    }
                }
            }
        }
    }
    (best, best.is_finite())
}
