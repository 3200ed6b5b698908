//! Borel transform, Cauchy cycles and Pólya reconstruction.
//!
//! Circles are integrated with the periodic trapezoidal rule. Rounded
//! polygonal cycles are split into straight and circular panels, each
//! integrated with Gauss-Legendre; every panel is analytic, so both
//! schemes converge exponentially for the integrands used here.

use crate::convex_geom::ConvexPolygon;
use crate::error::{Error, Result};
use crate::exp_core::{ExpSum, TaylorJet};
use crate::numeric::{compensated_sum, factorial, gauss_legendre, wrap_angle, C64, I, ONE, ZERO};
use crate::par;
use std::f64::consts::PI;

/// Default distance between the contour and the hull it encloses.
pub const DEFAULT_CLEARANCE: f64 = 0.5;
/// Default number of quadrature nodes.
pub const DEFAULT_NODES: usize = 512;
/// Minimum node count accepted by contour constructors.
pub const MIN_NODES: usize = 16;
/// Evaluations closer than this to a pole are rejected.
pub const POLE_PROXIMITY: f64 = 1e-9;
/// Default relative margin outside the divergence disk for series evaluation.
pub const DEFAULT_SERIES_MARGIN: f64 = 0.2;

/// Principal part `Σ_k c_k (ξ - α)^{-(k+1)}` at one pole.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub alpha: C64,
    pub principal: Vec<C64>,
}

/// Borel transform of an exponential polynomial: a rational function that
/// vanishes at infinity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RationalBorel {
    pub poles: Vec<Pole>,
}

/// Anything that can be integrated against a Cauchy cycle.
pub trait BorelFunction: Sync {
    fn eval(&self, xi: C64) -> C64;

    /// Points every admissible contour must wind around once.
    fn singularities(&self) -> Vec<C64> {
        Vec::new()
    }
}

/// `p(z)e^{αz} ↦ Σ_k k! p_k (ξ-α)^{-(k+1)}`.
pub fn borel_of_expsum(f: &ExpSum) -> RationalBorel {
    RationalBorel {
        poles: f
            .terms()
            .iter()
            .map(|t| Pole {
                alpha: t.alpha(),
                principal: t
                    .poly()
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p * factorial(k))
                    .collect(),
            })
            .collect(),
    }
}

impl RationalBorel {
    /// Sum of principal parts; rejects points within [`POLE_PROXIMITY`] of a pole.
    pub fn try_eval(&self, xi: C64) -> Result<C64> {
        for p in &self.poles {
            let d = (xi - p.alpha).norm();
            if d <= POLE_PROXIMITY {
                return Err(Error::NearPole {
                    point: xi,
                    pole: p.alpha,
                    distance: d,
                });
            }
        }
        Ok(self.eval_unchecked(xi))
    }

    fn eval_unchecked(&self, xi: C64) -> C64 {
        let mut acc = ZERO;
        for p in &self.poles {
            let inv = ONE / (xi - p.alpha);
            // Horner in 1/(ξ-α), then one more factor for the simple pole.
            let mut s = ZERO;
            for c in p.principal.iter().rev() {
                s = s * inv + c;
            }
            acc += s * inv;
        }
        acc
    }

    /// Inverse transform for rational data: back to the exponential polynomial.
    pub fn to_expsum(&self) -> ExpSum {
        ExpSum::from_terms(self.poles.iter().map(|p| {
            (
                p.alpha,
                p.principal
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c / factorial(k))
                    .collect(),
            )
        }))
    }

    pub fn pole_locations(&self) -> Vec<C64> {
        self.poles.iter().map(|p| p.alpha).collect()
    }
}

impl BorelFunction for RationalBorel {
    fn eval(&self, xi: C64) -> C64 {
        self.eval_unchecked(xi)
    }

    fn singularities(&self) -> Vec<C64> {
        self.pole_locations()
    }
}

/// A Borel-side evaluator given as a closure, with the singular points the
/// contour has to enclose.
pub struct SampledBorel<F> {
    f: F,
    singular: Vec<C64>,
}

impl<F: Fn(C64) -> C64 + Sync> SampledBorel<F> {
    pub fn new(f: F, singular: Vec<C64>) -> Self {
        SampledBorel { f, singular }
    }
}

impl<F: Fn(C64) -> C64 + Sync> BorelFunction for SampledBorel<F> {
    fn eval(&self, xi: C64) -> C64 {
        (self.f)(xi)
    }

    fn singularities(&self) -> Vec<C64> {
        self.singular.clone()
    }
}

/// Partial sum of `Σ f^{(n)}(0)/ξ^{n+1}` with a geometric tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    pub error_estimate: f64,
    pub terms: usize,
}

pub fn borel_series_eval(jet: &TaylorJet, xi: C64, margin: f64) -> Result<SeriesValue> {
    let radius = jet.type_bound * (1.0 + margin);
    let r = xi.norm();
    if r <= radius {
        return Err(Error::OutsideDivergenceDisk { xi_abs: r, radius });
    }
    let inv = ONE / xi;
    let mut pow = inv; // ξ^{-(n+1)}
    let mut fact = 1.0; // n!
    let mut terms = Vec::with_capacity(jet.coeffs.len());
    for (n, c) in jet.coeffs.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
            pow *= inv;
        }
        terms.push(c * fact * pow);
    }
    let value = compensated_sum(&terms);
    // Tail dominated by a geometric series with ratio type_bound/|ξ|.
    let q = (jet.type_bound / r).min(1.0 - 1e-12);
    let last = terms.last().map(|t| t.norm()).unwrap_or(0.0);
    let error_estimate = last * q / (1.0 - q) + f64::EPSILON * value.norm();
    Ok(SeriesValue {
        value,
        error_estimate,
        terms: terms.len(),
    })
}

/// One quadrature node: `∮ g(ξ) dξ ≈ Σ weight · g(xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub xi: C64,
    pub weight: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Segment { a: C64, b: C64 },
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    fn length(&self) -> f64 {
        match self {
            Piece::Segment { a, b } => (b - a).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    fn split(&self, parts: usize) -> Vec<Piece> {
        (0..parts)
            .map(|k| {
                let s0 = k as f64 / parts as f64;
                let s1 = (k + 1) as f64 / parts as f64;
                match *self {
                    Piece::Segment { a, b } => Piece::Segment {
                        a: a + (b - a) * s0,
                        b: a + (b - a) * s1,
                    },
                    Piece::Arc { center, radius, start, sweep } => Piece::Arc {
                        center,
                        radius,
                        start: start + sweep * s0,
                        sweep: sweep * (s1 - s0),
                    },
                }
            })
            .collect()
    }

    fn point(&self, s: f64) -> C64 {
        match *self {
            Piece::Segment { a, b } => a + (b - a) * s,
            Piece::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + sweep * s),
        }
    }

    fn gauss_nodes(&self, x: &[f64], w: &[f64]) -> Vec<QuadNode> {
        x.iter()
            .zip(w)
            .map(|(&x, &w)| {
                let s = (x + 1.0) / 2.0;
                match *self {
                    Piece::Segment { a, b } => QuadNode {
                        xi: a + (b - a) * s,
                        weight: (b - a) * (w / 2.0),
                    },
                    Piece::Arc { center, radius, start, sweep } => {
                        let e = C64::from_polar(radius, start + sweep * s);
                        QuadNode {
                            xi: center + e,
                            weight: I * e * (sweep * w / 2.0),
                        }
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContourShape {
    Circle { center: C64, radius: f64 },
    /// Closed chain of analytic panels (straight edges and circular arcs).
    Panels { pieces: Vec<Piece> },
}

/// Closed positively oriented integration contour with precomputed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    shape: ContourShape,
    nodes: Vec<QuadNode>,
    trace: Vec<C64>,
}

impl Contour {
    /// Circle with the trapezoidal rule on `nodes` equispaced points.
    pub fn circle(center: C64, radius: f64, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::Config(format!("contour needs at least {MIN_NODES} nodes, got {nodes}")));
        }
        if !(radius > 0.0) {
            return Err(Error::Config(format!("circle radius must be positive, got {radius}")));
        }
        let h = 2.0 * PI / nodes as f64;
        let q: Vec<QuadNode> = (0..nodes)
            .map(|k| {
                let e = C64::from_polar(radius, h * k as f64);
                QuadNode {
                    xi: center + e,
                    weight: I * e * h,
                }
            })
            .collect();
        let trace = q.iter().map(|n| n.xi).collect();
        Ok(Contour {
            shape: ContourShape::Circle { center, radius },
            nodes: q,
            trace,
        })
    }

    /// Closed polyline through `vertices` (in order), Gauss-Legendre with
    /// `nodes_per_edge` points on every edge.
    pub fn polyline(vertices: &[C64], nodes_per_edge: usize) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Config("closed polyline needs at least 3 vertices".into()));
        }
        if nodes_per_edge * vertices.len() < MIN_NODES {
            return Err(Error::Config(format!("contour needs at least {MIN_NODES} nodes")));
        }
        let n = vertices.len();
        let pieces: Vec<Piece> = (0..n)
            .map(|i| Piece::Segment {
                a: vertices[i],
                b: vertices[(i + 1) % n],
            })
            .collect();
        Ok(Self::from_panels(pieces, nodes_per_edge))
    }

    fn from_panels(pieces: Vec<Piece>, per_panel: usize) -> Self {
        let (x, w) = gauss_legendre(per_panel);
        let mut nodes = Vec::with_capacity(pieces.len() * per_panel);
        let mut trace = Vec::with_capacity(pieces.len() * (per_panel + 1));
        for p in &pieces {
            let q = p.gauss_nodes(&x, &w);
            trace.push(p.point(0.0));
            trace.extend(q.iter().map(|n| n.xi));
            nodes.extend(q);
        }
        Contour {
            shape: ContourShape::Panels { pieces },
            nodes,
            trace,
        }
    }

    pub fn shape(&self) -> &ContourShape {
        &self.shape
    }

    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Ordered points along the curve (closed implicitly).
    pub fn trace(&self) -> &[C64] {
        &self.trace
    }

    /// Discrete argument principle: total change of `arg(ξ - u)` / 2π.
    pub fn winding_number(&self, u: C64) -> i64 {
        let n = self.trace.len();
        let mut total = 0.0;
        for k in 0..n {
            let a = self.trace[k] - u;
            let b = self.trace[(k + 1) % n] - u;
            total += wrap_angle(b.arg() - a.arg());
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// Fails unless the contour winds once around every point of `inside`.
    pub fn check_encloses(&self, inside: &[C64]) -> Result<()> {
        for &u in inside {
            let w = self.winding_number(u);
            if w != 1 {
                return Err(Error::Winding {
                    point: u,
                    expected: 1,
                    found: w,
                });
            }
        }
        Ok(())
    }

    /// `(1/2πi) ∮ g(ξ) dξ`; nodes are evaluated in parallel and summed in
    /// node order with compensation.
    pub fn integrate<G>(&self, g: G) -> C64
    where
        G: Fn(C64) -> C64 + Sync + Send,
    {
        let vals = par::map(&self.nodes, |n| n.weight * g(n.xi));
        compensated_sum(&vals) / (2.0 * PI * I)
    }
}

/// Cauchy cycle around `K`: the boundary of `K + clearance·D̄`, made of
/// offset edges and circular corner arcs. A single point gives a circle.
pub fn make_cauchy_cycle(k: &ConvexPolygon, clearance: f64, nodes: usize) -> Result<Contour> {
    if nodes < MIN_NODES {
        return Err(Error::Config(format!("contour needs at least {MIN_NODES} nodes, got {nodes}")));
    }
    if !(clearance > 0.0) {
        return Err(Error::Config(format!("clearance must be positive, got {clearance}")));
    }
    let v = k.vertices();
    let contour = match v.len() {
        0 => return Err(Error::EmptySet { op: "make_cauchy_cycle" }),
        1 => Contour::circle(v[0], clearance, nodes)?,
        n => {
            let normal = |i: usize| {
                let e = v[(i + 1) % n] - v[i];
                -I * e / e.norm()
            };
            let mut pieces = Vec::with_capacity(2 * n);
            for i in 0..n {
                let ni = normal(i);
                let nj = normal((i + 1) % n);
                pieces.push(Piece::Segment {
                    a: v[i] + ni * clearance,
                    b: v[(i + 1) % n] + ni * clearance,
                });
                let mut sweep = (nj.arg() - ni.arg()).rem_euclid(2.0 * PI);
                if n == 2 && sweep.abs() < 1e-12 {
                    sweep = PI;
                }
                if sweep > 0.0 {
                    pieces.push(Piece::Arc {
                        center: v[(i + 1) % n],
                        radius: clearance,
                        start: ni.arg(),
                        sweep,
                    });
                }
            }
            // Panels no longer than the clearance keep every pole at least
            // one panel length away.
            let mut panels = Vec::new();
            for p in pieces {
                let parts = (p.length() / clearance).ceil().max(1.0) as usize;
                panels.extend(p.split(parts));
            }
            let per_panel = nodes.div_ceil(panels.len()).max(8);
            Contour::from_panels(panels, per_panel)
        }
    };
    contour.check_encloses(k.vertices())?;
    Ok(contour)
}

/// Value of a contour quadrature together with the node count used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    pub nodes: usize,
}

/// `f(z) = (1/2πi) ∮ B f(ξ) e^{ξz} dξ`.
pub fn polya_reconstruct(b: &dyn BorelFunction, gamma: &Contour, z: C64) -> Result<Quadrature> {
    gamma.check_encloses(&b.singularities())?;
    let value = gamma.integrate(|xi| b.eval(xi) * (xi * z).exp());
    Ok(Quadrature {
        value,
        nodes: gamma.node_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_geom::ConvexPolygon;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Truncated series Σ_{n≤N} f^{(n)}(0)/ξ^{n+1}, written independently.
    fn series_oracle(f: &ExpSum, xi: C64, n: usize) -> C64 {
        let mut d = f.clone();
        let mut acc = ZERO;
        let mut pow = ONE / xi;
        for _ in 0..=n {
            acc += d.evaluate(ZERO) * pow;
            d = d.differentiate();
            pow /= xi;
        }
        acc
    }

    #[test]
    fn borel_examples() {
        let b = borel_of_expsum(&ExpSum::constant(ONE));
        assert_eq!(b.try_eval(c(2.0, 0.0)).unwrap(), c(0.5, 0.0));
        let b = borel_of_expsum(&ExpSum::exponential(I));
        assert_eq!(b.poles, vec![Pole { alpha: I, principal: vec![ONE] }]);
        assert!((b.try_eval(c(1.0, 1.0)).unwrap() - ONE).norm() < 1e-15);

        let alpha = c(0.3, -0.4);
        let f = ExpSum::monomial(alpha, vec![ZERO, ONE]);
        let b = borel_of_expsum(&f);
        let xi = alpha + C64::from_polar(alpha.norm() + 2.0, 0.7);
        let closed = ONE / ((xi - alpha) * (xi - alpha));
        assert!((b.try_eval(xi).unwrap() - closed).norm() < 1e-15);
        let s = series_oracle(&f, xi, 60);
        assert!((s - closed).norm() <= 1e-10 * closed.norm());
    }

    #[test]
    fn near_pole_rejected() {
        let b = borel_of_expsum(&ExpSum::exponential(ONE));
        assert!(matches!(b.try_eval(c(1.0, 1e-12)), Err(Error::NearPole { .. })));
    }

    #[test]
    fn series_eval_examples() {
        let j = ExpSum::exponential(ONE).taylor_jet(80);
        let v = borel_series_eval(&j, c(3.0, 0.0), DEFAULT_SERIES_MARGIN).unwrap();
        assert!((v.value - c(0.5, 0.0)).norm() < 1e-14);
        let j = ExpSum::constant(ONE).taylor_jet(5);
        let v = borel_series_eval(&j, c(5.0, 0.0), DEFAULT_SERIES_MARGIN).unwrap();
        assert!((v.value - c(0.2, 0.0)).norm() < 1e-16);
        let f = &ExpSum::exponential(ONE) + &ExpSum::exponential(-ONE);
        let v = borel_series_eval(&f.taylor_jet(80), c(2.0, 0.0), DEFAULT_SERIES_MARGIN).unwrap();
        assert!((v.value - c(4.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!(v.error_estimate < 1e-12);
        assert!(borel_series_eval(&f.taylor_jet(10), c(1.1, 0.0), DEFAULT_SERIES_MARGIN).is_err());
    }

    #[test]
    fn cauchy_cycle_examples() {
        let g = make_cauchy_cycle(&ConvexPolygon::point(ZERO), 1.0, 64).unwrap();
        assert!(matches!(g.shape(), ContourShape::Circle { radius, .. } if *radius == 1.0));
        assert_eq!(g.winding_number(ZERO), 1);

        let seg = ConvexPolygon::segment(c(0.0, -1.0), c(0.0, 1.0));
        let g = make_cauchy_cycle(&seg, 0.5, 128).unwrap();
        for u in [ZERO, c(0.0, 0.9), c(0.0, -0.9), c(0.0, 1.0), c(0.0, -1.0)] {
            assert_eq!(g.winding_number(u), 1, "{u}");
        }
        assert_eq!(g.winding_number(c(2.0, 0.0)), 0);
        assert!(make_cauchy_cycle(&seg, 0.5, 8).is_err());
    }

    #[test]
    fn polya_examples() {
        let alpha = c(0.6, -0.5);
        let b = borel_of_expsum(&ExpSum::exponential(alpha));
        let g = Contour::circle(ZERO, alpha.norm() + 1.0, 512).unwrap();
        for z in [ZERO, c(2.0, 0.0), c(-1.0, 1.5), c(0.0, -2.0)] {
            let q = polya_reconstruct(&b, &g, z).unwrap();
            assert!((q.value - (alpha * z).exp()).norm() < 1e-8);
            assert_eq!(q.nodes, 512);
        }
        let q = polya_reconstruct(&RationalBorel::default(), &g, c(1.0, 1.0)).unwrap();
        assert_eq!(q.value, ZERO);

        let f = ExpSum::monomial(alpha, vec![ZERO, ONE]);
        let b = borel_of_expsum(&f);
        let z = c(1.3, 0.4);
        let q = polya_reconstruct(&b, &g, z).unwrap();
        assert!((q.value - f.evaluate(z)).norm() < 1e-8);
    }

    #[test]
    fn polya_rejects_contour_missing_pole() {
        let b = borel_of_expsum(&ExpSum::exponential(c(3.0, 0.0)));
        let g = Contour::circle(ZERO, 1.0, 64).unwrap();
        assert!(matches!(polya_reconstruct(&b, &g, ONE), Err(Error::Winding { .. })));
    }

    #[test]
    fn rounded_contour_matches_circle() {
        let f = ExpSum::from_terms([
            (c(0.5, 0.2), vec![ONE, c(0.0, 1.0)]),
            (c(-0.3, -0.6), vec![c(2.0, 0.0)]),
            (c(0.1, 0.7), vec![c(0.5, 0.0), ZERO, c(0.25, 0.0)]),
        ]);
        let b = borel_of_expsum(&f);
        let circ = Contour::circle(ZERO, 2.0, 512).unwrap();
        let poly = make_cauchy_cycle(&f.exact_cid(), DEFAULT_CLEARANCE, DEFAULT_NODES).unwrap();
        for z in [ZERO, c(1.5, -1.0), c(-2.0, 0.0), c(0.3, 1.9)] {
            let a = polya_reconstruct(&b, &circ, z).unwrap().value;
            let p = polya_reconstruct(&b, &poly, z).unwrap().value;
            assert!((a - p).norm() < 1e-8, "{z}: {a} vs {p}");
            assert!((a - f.evaluate(z)).norm() < 1e-8);
        }
    }

    #[test]
    fn polyline_contour_encloses_interior() {
        let sq = [c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)];
        let g = Contour::polyline(&sq, 16).unwrap();
        assert_eq!(g.winding_number(ZERO), 1);
        assert_eq!(g.winding_number(c(3.0, 0.0)), 0);
        // ∮ dξ/ξ over the square = 2πi
        let v = g.integrate(|xi| ONE / xi);
        assert!((v - ONE).norm() < 1e-6);
    }
}
