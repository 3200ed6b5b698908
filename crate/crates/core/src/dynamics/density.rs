use crate::error::{Error, Result};

/// Fraction of `[0, r_max]` used by the trailing-window liminf proxy.
pub const DEFAULT_WINDOW: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub points: Vec<f64>,
    /// `(λ_i, #{λ ≤ λ_i}/λ_i)` at every positive point up to `r_max`.
    pub ratios: Vec<(f64, f64)>,
    /// Smallest ratio sampled at the points of `[(1-window) r_max, r_max]`
    /// and at `r_max` itself.
    pub ldens_proxy: f64,
    /// `1/d` when the points form an arithmetic progression of step `d`.
    pub exact_limit: Option<f64>,
    pub r_max: f64,
}

/// Counting ratio curve and its trailing-window minimum.
pub fn lower_density(points: &[f64], r_max: f64) -> Result<DensityEstimate> {
    lower_density_window(points, r_max, DEFAULT_WINDOW)
}

pub fn lower_density_window(points: &[f64], r_max: f64, window: f64) -> Result<DensityEstimate> {
    if points.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::Config("density points must be finite and non-negative".into()));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("density points must be sorted".into()));
    }
    if !(r_max > 0.0) || !(window > 0.0 && window <= 1.0) {
        return Err(Error::Config("density needs r_max > 0 and window in (0, 1]".into()));
    }
    let pts: Vec<f64> = points.iter().copied().filter(|p| *p <= r_max).collect();
    let mut ratios = Vec::with_capacity(pts.len());
    for &p in pts.iter().filter(|p| **p > 0.0) {
        // Count includes ties with later entries.
        let count = pts.partition_point(|q| *q <= p);
        ratios.push((p, count as f64 / p));
    }
    // Ratios sampled at the points in the trailing window and at `r_max`.
    let r0 = (1.0 - window) * r_max;
    let at_end = pts.len() as f64 / r_max;
    let inf = ratios
        .iter()
        .filter(|(p, _)| *p >= r0)
        .map(|r| r.1)
        .fold(at_end, f64::min);
    Ok(DensityEstimate {
        exact_limit: affine_step(&pts).map(|d| 1.0 / d),
        points: pts,
        ratios,
        ldens_proxy: inf,
        r_max,
    })
}

/// Step `d` if the points are `a + d·i` to within `1e-9` relative.
fn affine_step(pts: &[f64]) -> Option<f64> {
    if pts.len() < 3 {
        return None;
    }
    let d = pts[1] - pts[0];
    if !(d > 0.0) {
        return None;
    }
    let tol = 1e-9 * pts[pts.len() - 1].abs().max(1.0);
    pts.iter()
        .enumerate()
        .all(|(i, p)| (p - (pts[0] + d * i as f64)).abs() <= tol)
        .then_some(d)
}

/// Density of a set of iteration indices.
pub fn lower_density_indices(indices: &[u64], r_max: f64) -> Result<DensityEstimate> {
    let pts: Vec<f64> = indices.iter().map(|&n| n as f64).collect();
    lower_density(&pts, r_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(f: impl Fn(u64) -> f64, r: f64) -> Vec<f64> {
        (1..).map(f).take_while(|x| *x <= r).collect()
    }

    #[test]
    fn naturals_evens_squares() {
        let r = 1e4;
        let n = lower_density(&seq(|k| k as f64, r), r).unwrap();
        assert_eq!(n.ldens_proxy, 1.0);
        assert_eq!(n.exact_limit, Some(1.0));
        let e = lower_density(&seq(|k| 2.0 * k as f64, r), r).unwrap();
        assert_eq!(e.ldens_proxy, 0.5);
        assert_eq!(e.exact_limit, Some(0.5));
        let s = lower_density(&seq(|k| (k * k) as f64, r), r).unwrap();
        assert!(s.ldens_proxy <= 1e-2);
        assert_eq!(s.exact_limit, None);
    }

    #[test]
    fn ratios_recount() {
        let pts = [1.0, 2.0, 2.0, 5.0];
        let d = lower_density(&pts, 10.0).unwrap();
        assert_eq!(d.ratios, vec![(1.0, 1.0), (2.0, 1.5), (2.0, 1.5), (5.0, 0.8)]);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(lower_density(&[2.0, 1.0], 3.0).is_err());
    }
}
