use crate::convex_geom::{support_function, ConvexPolygon};
use crate::error::{Error, Result};
use crate::exp_core::ExpSum;
use crate::numeric::{golden_max, C64};
use crate::par;
use std::f64::consts::PI;

/// Number of rays in the seminorm grid.
pub const SEMINORM_RAYS: usize = 64;
const RADII: usize = 96;
/// The tail envelope beyond the grid must fall below this fraction of the
/// grid supremum.
const TAIL_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seminorm {
    /// `+∞` when `K(f)` is not inside `K + (1/n)D̄`.
    pub value: f64,
    /// Point where the grid supremum was attained.
    pub argmax: C64,
    /// Grid outer radius.
    pub r_max: f64,
    /// Upper bound for `|f(z)| e^{-H_K(z) - |z|/n}` on `|z| ≥ r_max`.
    pub tail_bound: f64,
}

impl Seminorm {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `‖f‖_{K,n} = sup_z |f(z)| e^{-H_K(z) - |z|/n}`.
pub fn seminorm(f: &ExpSum, k: &ConvexPolygon, n: u32) -> Result<Seminorm> {
    if n == 0 {
        return Err(Error::Config("seminorm index n must be at least 1".into()));
    }
    if k.is_empty() {
        return Err(Error::EmptySet { op: "seminorm" });
    }
    let relax = 1.0 / n as f64;
    // Envelope |p_j(z) e^{α_j z}| e^{-H_K(z)-|z|/n} ≤ P_j(r) e^{-δ_j r},
    // δ_j = 1/n - dist(α_j, K).
    let mut env = Vec::with_capacity(f.terms().len());
    for t in f.terms() {
        let delta = relax - k.distance_to(t.alpha())?;
        let tol = 1e-12 * (1.0 + relax);
        if delta < -tol || (delta <= tol && t.degree() > 0) {
            return Ok(Seminorm {
                value: f64::INFINITY,
                argmax: t.alpha(),
                r_max: f64::INFINITY,
                tail_bound: f64::INFINITY,
            });
        }
        let abs: Vec<f64> = t.poly().iter().map(|c| c.norm()).collect();
        env.push((delta.max(0.0), abs));
    }
    if env.is_empty() {
        return Ok(Seminorm {
            value: 0.0,
            argmax: C64::new(0.0, 0.0),
            r_max: 0.0,
            tail_bound: 0.0,
        });
    }
    let envelope = |r: f64| -> f64 {
        env.iter()
            .map(|(d, p)| p.iter().rev().fold(0.0, |acc, c| acc * r + c) * (-d * r).exp())
            .sum()
    };
    let log_g = |z: C64| -> f64 { f.log_abs(z) - support_function(k, z).unwrap_or(0.0) - z.norm() * relax };

    let at_zero = log_g(C64::new(0.0, 0.0));
    let floor = at_zero.exp();
    // Outer radius where the envelope is small and decreasing.
    let r_max = tail_radius(&envelope, floor.max(f64::MIN_POSITIVE));
    let radii: Vec<f64> = (1..=RADII)
        .map(|i| r_max * (1e-3f64).powf(1.0 - i as f64 / RADII as f64))
        .collect();
    let rows = par::map_range(SEMINORM_RAYS, |a| {
        let theta = 2.0 * PI * a as f64 / SEMINORM_RAYS as f64;
        radii
            .iter()
            .map(|&r| log_g(C64::from_polar(r, theta)))
            .enumerate()
            .fold((f64::NEG_INFINITY, 0usize), |best, (i, v)| if v > best.0 { (v, i) } else { best })
    });
    let (mut best, mut arg) = (at_zero, C64::new(0.0, 0.0));
    let mut best_ray = None;
    for (a, &(v, i)) in rows.iter().enumerate() {
        if v > best {
            best = v;
            best_ray = Some((a, i));
        }
    }
    if let Some((a, i)) = best_ray {
        let dtheta = 2.0 * PI / SEMINORM_RAYS as f64;
        let mut theta = a as f64 * dtheta;
        let (mut lo, mut hi) = (if i == 0 { 0.0 } else { radii[i - 1] }, radii[(i + 1).min(RADII - 1)]);
        let mut r = radii[i];
        arg = C64::from_polar(r, theta);
        for _ in 0..3 {
            let (rr, vr) = golden_max(|s| log_g(C64::from_polar(s, theta)), lo, hi, 60);
            if vr > best {
                best = vr;
                r = rr;
                arg = C64::from_polar(r, theta);
            }
            let (tt, vt) = golden_max(|t| log_g(C64::from_polar(r, t)), theta - dtheta, theta + dtheta, 60);
            if vt > best {
                best = vt;
                theta = tt;
                arg = C64::from_polar(r, theta);
            }
            lo = (r * 0.8).max(0.0);
            hi = r * 1.25;
        }
    }
    let value = best.exp();
    Ok(Seminorm {
        value,
        argmax: arg,
        r_max,
        tail_bound: sup_beyond(&envelope, r_max),
    })
}

fn tail_radius(envelope: &dyn Fn(f64) -> f64, scale: f64) -> f64 {
    let mut r = 4.0;
    while r < 1e6 {
        if envelope(r) <= TAIL_FRACTION * scale && envelope(2.0 * r) <= envelope(r) {
            return r;
        }
        r *= 1.5;
    }
    r
}

fn sup_beyond(envelope: &dyn Fn(f64) -> f64, r0: f64) -> f64 {
    // The envelope is a sum of r^k e^{-δr}; past its last critical point it
    // is decreasing, so sampling a geometric ladder bounds the supremum.
    (0..64).map(|i| envelope(r0 * 1.1f64.powi(i))).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ONE, ZERO};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exponential_over_its_own_point() {
        for n in 1..4 {
            let alpha = c(0.4, -0.3);
            let s = seminorm(&ExpSum::exponential(alpha), &ConvexPolygon::point(alpha), n).unwrap();
            assert!((s.value - 1.0).abs() < 1e-12);
            assert!(s.tail_bound < 1e-6);
        }
    }

    #[test]
    fn type_beyond_set_is_infinite() {
        let s = seminorm(&ExpSum::exponential(c(2.0, 0.0)), &ConvexPolygon::point(ZERO), 1).unwrap();
        assert!(!s.is_finite());
    }

    #[test]
    fn isometry_under_shift() {
        let alpha = c(0.3, 0.2);
        let k = ConvexPolygon::regular(alpha, 0.5, 5);
        let f = ExpSum::from_terms([(c(0.5, 0.2), vec![ONE, c(0.0, 1.0)]), (c(0.1, 0.4), vec![c(2.0, 0.0)])]);
        let g = f.multiply_by_exponential(-alpha);
        let a = seminorm(&f, &k, 2).unwrap();
        let b = seminorm(&g, &k.translate(-alpha), 2).unwrap();
        assert!((a.value - b.value).abs() <= 1e-9 * a.value, "{a:?} {b:?}");
    }

    #[test]
    fn monotone_in_n_and_k() {
        let f = ExpSum::from_terms([(c(0.5, 0.0), vec![ONE, ONE]), (c(-0.2, 0.3), vec![ONE])]);
        let k = ConvexPolygon::regular(ZERO, 0.3, 6);
        let a = seminorm(&f, &k, 2).unwrap().value;
        let b = seminorm(&f, &k, 4).unwrap().value;
        assert!(b >= a);
        let big = ConvexPolygon::regular(ZERO, 0.6, 6);
        assert!(seminorm(&f, &big, 2).unwrap().value <= a);
    }
}
