use super::density::{lower_density_indices, DensityEstimate};
use crate::error::{Error, Result};
use crate::exp_core::ExpSum;
use crate::numeric::C64;
use crate::operators::{iterate_operator_power, OrbitStepper, ScaledExpSum, SymbolGerm};
use crate::par;
use std::f64::consts::PI;

/// Steps between cross-checks against the power-germ path.
pub const SPOT_CHECK_EVERY: u64 = 10;
/// Largest accepted relative gap in a spot check.
pub const SPOT_CHECK_TOL: f64 = 1e-6;

/// Polar grid on the closed disk `|z| ≤ radius`: the centre plus `rings`
/// circles of `per_ring` points.
pub fn disk_grid(radius: f64, rings: usize, per_ring: usize) -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    for k in 1..=rings {
        let r = radius * k as f64 / rings as f64;
        for j in 0..per_ring {
            // Rings are staggered by half a step.
            let t = 2.0 * PI * (j as f64 + 0.5 * (k % 2) as f64) / per_ring as f64;
            pts.push(C64::from_polar(r, t));
        }
    }
    pts
}

/// Default orbit grid: 8 rings of 32 points.
pub fn default_disk_grid(radius: f64) -> Vec<C64> {
    disk_grid(radius, 8, 32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub n: u64,
    pub state: ScaledExpSum,
    pub disk_samples: Vec<C64>,
    /// `sup_grid |φ(D)^n f - g_m|` per target.
    pub target_distances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRun {
    pub records: Vec<OrbitRecord>,
    pub hits: Vec<Vec<u64>>,
    pub densities: Vec<DensityEstimate>,
    /// Largest relative gap between the stepped and power-germ states.
    pub spot_check_max: f64,
    pub grid: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitOptions {
    pub grid: Vec<C64>,
    /// Keep only every `keep_every`-th record (hits are always kept).
    pub keep_every: u64,
}

/// Iterates `φ(D)` on `f` for `n = 0..=n_max` and records when the orbit is
/// within `epsilon` of each target on the disk grid.
pub fn orbit_run(
    phi: &SymbolGerm,
    f: &ExpSum,
    n_max: u64,
    targets: &[ExpSum],
    disk_radius: f64,
    epsilon: f64,
) -> Result<OrbitRun> {
    orbit_run_with(
        phi,
        f,
        n_max,
        targets,
        epsilon,
        &OrbitOptions {
            grid: default_disk_grid(disk_radius),
            keep_every: 1,
        },
    )
}

pub fn orbit_run_with(
    phi: &SymbolGerm,
    f: &ExpSum,
    n_max: u64,
    targets: &[ExpSum],
    epsilon: f64,
    opts: &OrbitOptions,
) -> Result<OrbitRun> {
    if n_max < 1 {
        return Err(Error::Config("orbit needs n_max ≥ 1".into()));
    }
    let grid = &opts.grid;
    let target_values: Vec<Vec<C64>> = targets.iter().map(|g| par::map(grid, |&z| g.evaluate(z))).collect();
    let mut stepper = OrbitStepper::new(phi, f)?;
    let mut records = Vec::new();
    let mut hits = vec![Vec::new(); targets.len()];
    let mut spot_max: f64 = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            stepper.step()?;
        }
        let state = ScaledExpSum::new(stepper.state().terms().to_vec());
        let samples = par::map(grid, |&z| state.evaluate(z));
        if samples.iter().any(|v| v.re.is_nan() || v.im.is_nan()) {
            return Err(Error::NonFinite {
                last_good: n.saturating_sub(1) as usize,
            });
        }
        let distances: Vec<f64> = target_values
            .iter()
            .map(|tv| samples.iter().zip(tv).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
            .collect();
        let mut hit = false;
        for (m, d) in distances.iter().enumerate() {
            if *d < epsilon {
                hits[m].push(n);
                hit = true;
            }
        }
        if n > 0 && n % SPOT_CHECK_EVERY == 0 {
            let power = iterate_operator_power(phi, f, n)?;
            spot_max = spot_max.max(state.relative_distance(&power));
        }
        if hit || n % opts.keep_every.max(1) == 0 || n == n_max {
            records.push(OrbitRecord {
                n,
                state,
                disk_samples: samples,
                target_distances: distances,
            });
        }
    }
    let densities = hits
        .iter()
        .map(|h| lower_density_indices(h, n_max as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitRun {
        records,
        hits,
        densities,
        spot_check_max: spot_max,
        grid: grid.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ONE, ZERO};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigen_orbit_hits_at_two() {
        let f = ExpSum::exponential(c(2.0, 0.0));
        let g = ExpSum::monomial(c(2.0, 0.0), vec![c(4.0, 0.0)]);
        let run = orbit_run(&SymbolGerm::identity(), &f, 6, &[g], 1.0, 1e-9).unwrap();
        assert_eq!(run.hits[0], vec![2]);
    }

    #[test]
    fn translation_orbit_hits_at_five() {
        let e1 = SymbolGerm::entire(ExpSum::exponential(ONE));
        let f = ExpSum::polynomial(vec![ZERO, ONE]);
        let g = ExpSum::polynomial(vec![c(5.0, 0.0), ONE]);
        let run = orbit_run(&e1, &f, 20, &[g], 1.0, 1e-9).unwrap();
        assert_eq!(run.hits[0], vec![5]);
        assert!(run.spot_check_max < 1e-12);
    }

    #[test]
    fn long_eigen_orbit_stays_exact() {
        let alpha = c(0.3, 0.2);
        let phi = SymbolGerm::entire(ExpSum::from_terms([(ZERO, vec![c(3.0, 0.0)]), (ONE, vec![ONE])]));
        let f = ExpSum::exponential(alpha);
        let run = orbit_run(&phi, &f, 1000, &[], 1.0, 1e-9).unwrap();
        let last = run.records.last().unwrap();
        let lam = phi.value(alpha).unwrap();
        let e = (1000.0 * lam.norm().log2()).floor() as i64;
        let expect = ScaledExpSum::new(vec![crate::operators::ScaledTerm::new(
            alpha,
            vec![C64::from_polar((1000.0 * lam.norm().log2() - e as f64).exp2(), 1000.0 * lam.arg())],
            e,
        )]);
        assert!(last.state.relative_distance(&expect) < 1e-11);
        assert!(run.spot_check_max < 1e-10);
    }
}
