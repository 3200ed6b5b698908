//! Seeded random instances.

use exptype_core::convex_geom::convex_hull;
use exptype_core::{ConvexPolygon, ExpSum, SymbolGerm, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn in_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI))
}

/// Coefficient with modulus in `[0.2, 1]`.
pub fn coeff(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(0.2..=1.0), rng.gen_range(-PI..PI))
}

pub fn poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<C64> {
    let d = rng.gen_range(0..=max_degree);
    (0..=d).map(|_| coeff(rng)).collect()
}

/// Exponential sum with 1 to `max_terms` terms whose frequencies lie in the
/// disk of radius `radius` and are at least `0.05` apart.
pub fn expsum(rng: &mut ChaCha8Rng, max_terms: usize, max_degree: usize, radius: f64) -> ExpSum {
    let n = rng.gen_range(1..=max_terms);
    let mut terms: Vec<(C64, Vec<C64>)> = Vec::with_capacity(n);
    while terms.len() < n {
        let a = in_disk(rng, radius);
        if terms.iter().all(|(b, _)| (a - b).norm() >= 0.05) {
            terms.push((a, poly(rng, max_degree)));
        }
    }
    ExpSum::from_terms(terms)
}

/// Entire symbol with up to three terms, and its defining sum.
pub fn entire_symbol(rng: &mut ChaCha8Rng) -> (SymbolGerm, ExpSum) {
    let g = expsum(rng, 3, 1, 1.0);
    (SymbolGerm::entire(g.clone()), g)
}

/// `2 + c e^{βz}` with `|c| ≤ 0.3`, `|β| ≤ 1`: zero-free on `|z| ≤ 1.5`.
pub fn zero_free_symbol(rng: &mut ChaCha8Rng) -> (SymbolGerm, ExpSum) {
    let k = in_disk(rng, 0.3);
    let b = in_disk(rng, 1.0);
    let g = ExpSum::from_terms([(C64::new(0.0, 0.0), vec![C64::new(2.0, 0.0)]), (b, vec![k])]);
    (SymbolGerm::entire(g.clone()), g)
}

/// Affine or scaled-exponential symbol; both have global inverse branches.
pub fn invertible_symbol(rng: &mut ChaCha8Rng) -> SymbolGerm {
    if rng.gen_bool(0.5) {
        let a = in_disk(rng, 1.0);
        SymbolGerm::polynomial(vec![a, coeff(rng)])
    } else {
        let beta = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(-PI..PI));
        SymbolGerm::scaled_exponential(coeff(rng), beta)
    }
}

/// Polygon containing the frequencies of `f` plus up to three random points.
pub fn polygon_around(rng: &mut ChaCha8Rng, f: &ExpSum, radius: f64) -> ConvexPolygon {
    let mut pts = f.frequencies();
    for _ in 0..rng.gen_range(0..=3) {
        pts.push(in_disk(rng, radius));
    }
    convex_hull(&pts)
}

/// Random convex combination of the vertices of `k`.
pub fn point_in(rng: &mut ChaCha8Rng, k: &ConvexPolygon) -> C64 {
    let w: Vec<f64> = k.vertices().iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    k.vertices().iter().zip(&w).map(|(v, wi)| v * (wi / s)).sum()
}

/// Grid on the closed disk `|z| ≤ r`.
pub fn disk_points(r: f64) -> Vec<C64> {
    let n = 17;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = C64::new(-r + 2.0 * r * i as f64 / (n - 1) as f64, -r + 2.0 * r * j as f64 / (n - 1) as f64);
            if z.norm() <= r {
                out.push(z);
            }
        }
    }
    out
}
