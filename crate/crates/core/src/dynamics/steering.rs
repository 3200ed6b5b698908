use super::orbit::default_disk_grid;
use crate::convex_geom::ConvexPolygon;
use crate::error::{Error, Result};
use crate::exp_core::ExpSum;
use crate::numeric::{C64, ZERO};
use crate::operators::{hypercyclicity_predicate, sample_convex, SymbolGerm, Verdict, PREDICATE_TOL};
use crate::par;
use nalgebra::{DMatrix, DVector};

/// Maximum number of candidate frequencies.
pub const MAX_BASIS: usize = 40;
/// Singular values below `RIDGE · σ_max` are damped.
pub const RIDGE: f64 = 1e-10;
/// Candidates need `|φ(β)| > 1 + EXPANSION_MARGIN`.
pub const EXPANSION_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringReport {
    pub basis: Vec<C64>,
    pub schedule: Vec<u64>,
    /// Grid sup-distance between `φ(D)^{N_m} f` and target `m`.
    pub residuals: Vec<f64>,
    /// Ratio of smallest to largest singular value of the normalized system.
    pub inverse_condition: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub f: ExpSum,
    pub report: SteeringReport,
}

/// Greedy farthest-point selection of up to `k` points, starting from `first`.
fn spread(points: &[C64], first: usize, k: usize) -> Vec<C64> {
    let mut chosen = vec![points[first]];
    let mut dist: Vec<f64> = points.iter().map(|p| (p - points[first]).norm()).collect();
    while chosen.len() < k.min(points.len()) {
        let (i, d) = dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        if *d <= 0.0 {
            break;
        }
        chosen.push(points[i]);
        for (dj, p) in dist.iter_mut().zip(points) {
            *dj = dj.min((p - points[i]).norm());
        }
    }
    chosen
}

/// Builds `f = Σ_j x_j e_{β_j}` with `β_j` in `{|φ| > 1 + δ} ∩ K` such that
/// `φ(D)^{N_m} f` approximates target `m` on the disk for every `m`.
/// The coefficients solve one ridge-regularised least-squares system over
/// all targets jointly.
pub fn godefroy_shapiro_vector(
    phi: &SymbolGerm,
    k: &ConvexPolygon,
    targets: &[ExpSum],
    schedule: &[u64],
    disk_radius: f64,
    tol: f64,
) -> Result<SteeringVector> {
    if targets.len() != schedule.len() {
        return Err(Error::Config("one scheduled time per target is required".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("schedule must be strictly increasing".into()));
    }
    let grid = default_disk_grid(disk_radius);
    if targets.is_empty() {
        return Ok(SteeringVector {
            f: ExpSum::zero(),
            report: SteeringReport {
                basis: Vec::new(),
                schedule: Vec::new(),
                residuals: Vec::new(),
                inverse_condition: 1.0,
                tol,
            },
        });
    }
    let verdict = hypercyclicity_predicate(phi, k, PREDICATE_TOL)?;
    if verdict.verdict != Verdict::Yes {
        return Err(Error::Refused(format!(
            "φ(K) is not known to meet the unit circle (verdict {:?})",
            verdict.verdict
        )));
    }
    let (pts, _) = sample_convex(k, 24);
    let vals = par::map(&pts, |&z| phi.value(z));
    let vals = vals.into_iter().collect::<Result<Vec<C64>>>()?;
    if !vals.iter().any(|v| v.norm() < 1.0) {
        return Err(Error::Refused("{|φ| < 1} ∩ K is empty on the sample grid".into()));
    }
    let expanding: Vec<(C64, C64)> = pts
        .iter()
        .zip(&vals)
        .filter(|(_, v)| v.norm() > 1.0 + EXPANSION_MARGIN)
        .map(|(p, v)| (*p, *v))
        .collect();
    if expanding.is_empty() {
        return Err(Error::Refused("{|φ| > 1} ∩ K is empty on the sample grid".into()));
    }
    let first = expanding
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.norm().total_cmp(&b.1 .1.norm()))
        .map(|(i, _)| i)
        .expect("non-empty");
    let cand: Vec<C64> = expanding.iter().map(|e| e.0).collect();
    let basis = spread(&cand, first, MAX_BASIS);
    let lambdas: Vec<C64> = basis.iter().map(|&b| phi.value(b)).collect::<Result<_>>()?;

    // Unknowns y_j = x_j φ(β_j)^{N_last}; row block m carries φ(β_j)^{N_m - N_last}.
    let fit_grid = crate::dynamics::orbit::disk_grid(disk_radius, 12, 48);
    let last = *schedule.last().expect("non-empty");
    let rows = fit_grid.len() * targets.len();
    let cols = basis.len();
    let mut a = DMatrix::<C64>::zeros(rows, cols);
    let mut rhs = DVector::<C64>::zeros(rows);
    for (m, (g, &n)) in targets.iter().zip(schedule).enumerate() {
        let back = (last - n) as i32;
        for (p, &z) in fit_grid.iter().enumerate() {
            let row = m * fit_grid.len() + p;
            rhs[row] = g.evaluate(z);
            for j in 0..cols {
                a[(row, j)] = (basis[j] * z).exp() / lambdas[j].powi(back);
            }
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    for (j, nj) in norms.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / nj);
    }
    let svd = a.svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let lambda2 = (RIDGE * s_max).powi(2);
    let utb = u.adjoint() * &rhs;
    let mut coef = DVector::<C64>::zeros(cols);
    for (i, s) in svd.singular_values.iter().enumerate() {
        let w = s / (s * s + lambda2);
        coef += v_t.row(i).adjoint() * (utb[i] * w);
    }
    let terms: Vec<(C64, Vec<C64>)> = (0..cols)
        .map(|j| {
            let y = coef[j] / norms[j];
            (basis[j], vec![y / lambdas[j].powi(last as i32)])
        })
        .collect();
    let f = ExpSum::from_terms(terms);
    if f.terms().iter().any(|t| t.poly().iter().any(|c| !c.re.is_finite() || !c.im.is_finite())) {
        return Err(Error::NonFinite { last_good: 0 });
    }

    // Certificate: exact orbit values at the scheduled times on the orbit grid.
    let residuals: Vec<f64> = targets
        .iter()
        .zip(schedule)
        .map(|(g, &n)| {
            let orbit = orbit_at(&f, phi, n);
            par::map(&grid, |&z| (orbit.evaluate(z) - g.evaluate(z)).norm())
                .into_iter()
                .fold(0.0, f64::max)
        })
        .collect();
    let report = SteeringReport {
        basis,
        schedule: schedule.to_vec(),
        residuals: residuals.clone(),
        inverse_condition: if s_max > 0.0 { s_min / s_max } else { 0.0 },
        tol,
    };
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::FitFailure {
            residual: worst,
            limit: tol,
        });
    }
    Ok(SteeringVector { f, report })
}

/// `φ(D)^n f` for a sum of pure exponentials, evaluated exactly.
fn orbit_at(f: &ExpSum, phi: &SymbolGerm, n: u64) -> ExpSum {
    ExpSum::from_terms(f.terms().iter().map(|t| {
        let lam = phi.value(t.alpha()).unwrap_or(ZERO);
        (t.alpha(), t.poly().iter().map(|c| c * lam.powi(n as i32)).collect())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit::orbit_run;
    use crate::numeric::ONE;

    #[test]
    fn empty_targets_give_zero() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let k = ConvexPolygon::rectangle(-1.0, 1.0, -1.0, 1.0);
        let v = godefroy_shapiro_vector(&e1, &k, &[], &[], 1.0, 1e-3).unwrap();
        assert!(v.f.is_zero());
    }

    #[test]
    fn refuses_without_unit_circle() {
        let k = ConvexPolygon::regular(ZERO, 0.5, 16);
        let r = godefroy_shapiro_vector(&SymbolGerm::identity(), &k, &[ExpSum::constant(ONE)], &[3], 1.0, 1e-3);
        assert!(matches!(r, Err(Error::Refused(_))));
    }

    #[test]
    fn steers_translation_orbit() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let k = ConvexPolygon::rectangle(-1.0, 1.0, -1.0, 1.0);
        let targets = [ExpSum::constant(ONE), ExpSum::polynomial(vec![ZERO, ONE])];
        let schedule = [10, 20];
        let v = godefroy_shapiro_vector(&e1, &k, &targets, &schedule, 1.0, 1e-3).unwrap();
        let run = orbit_run(&e1, &v.f, 20, &targets, 1.0, 1e-3).unwrap();
        assert!(run.hits[0].contains(&10), "{:?} {:?}", run.hits, v.report);
        assert!(run.hits[1].contains(&20), "{:?} {:?}", run.hits, v.report);
    }
}
