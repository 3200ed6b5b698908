#![allow(dead_code)]

use exptype_core::{ConvexPolygon, ExpSum, SymbolGerm, C64};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Point of the closed disk of the given radius.
pub fn in_disk(radius: f64) -> impl Strategy<Value = C64> {
    (0.0..=1.0f64, -std::f64::consts::PI..std::f64::consts::PI).prop_map(move |(s, t)| C64::from_polar(radius * s.sqrt(), t))
}

/// Coefficient with both parts in `[-1, 1]`, bounded away from zero.
pub fn coeff() -> impl Strategy<Value = C64> {
    (0.2..=1.0f64, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

pub fn poly(max_degree: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(coeff(), 1..=max_degree + 1)
}

/// Exponential sum with up to `max_terms` terms, frequencies in the disk of
/// radius `radius`, pairwise at least `0.05` apart.
pub fn expsum(max_terms: usize, max_degree: usize, radius: f64) -> impl Strategy<Value = ExpSum> {
    prop::collection::vec((in_disk(radius), poly(max_degree)), 1..=max_terms).prop_map(|raw| {
        let mut kept: Vec<(C64, Vec<C64>)> = Vec::new();
        for (a, p) in raw {
            if kept.iter().all(|(b, _)| (a - b).norm() >= 0.05) {
                kept.push((a, p));
            }
        }
        ExpSum::from_terms(kept)
    })
}

/// Entire symbol `Σ c_j e^{β_j z}` with up to three terms.
pub fn entire_symbol() -> impl Strategy<Value = (SymbolGerm, ExpSum)> {
    expsum(3, 1, 1.0).prop_map(|g| (SymbolGerm::entire(g.clone()), g))
}

/// `2 + c e^{βz}` with `|c| ≤ 0.3`, `|β| ≤ 1`: zero-free on `|z| ≤ 1.5`.
pub fn zero_free_symbol() -> impl Strategy<Value = (SymbolGerm, ExpSum)> {
    (in_disk(0.3), in_disk(1.0)).prop_map(|(k, b)| {
        let g = ExpSum::from_terms([(c(0.0, 0.0), vec![c(2.0, 0.0)]), (b, vec![k])]);
        (SymbolGerm::entire(g.clone()), g)
    })
}

/// Convex hull of 3 to 8 random points in the disk of the given radius.
pub fn polygon(radius: f64) -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec(in_disk(radius), 3..=8).prop_map(|pts| exptype_core::convex_geom::convex_hull(&pts))
}

/// Square grid on `[-r, r]²` with `n × n` points.
pub fn square_grid(r: f64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = -r + 2.0 * r * i as f64 / (n - 1) as f64;
            let y = -r + 2.0 * r * j as f64 / (n - 1) as f64;
            out.push(c(x, y));
        }
    }
    out
}

/// Grid on the closed disk `|z| ≤ r`.
pub fn disk_points(r: f64) -> Vec<C64> {
    square_grid(r, 17).into_iter().filter(|z| z.norm() <= r).collect()
}

/// Largest coefficient gap, relative to the largest coefficient of `b`.
pub fn coeff_gap(a: &ExpSum, b: &ExpSum) -> f64 {
    a.relative_distance(b)
}
