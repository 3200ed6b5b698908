mod common;

use common::*;
use exptype_core::dynamics::{
    fhc_obstruction_probe, godefroy_shapiro_vector, lower_density, orbit_run, ProbeMode,
};
use exptype_core::operators::{ScaledExpSum, ScaledTerm};
use exptype_core::{ConvexPolygon, ExpSum, SymbolGerm, C64};
use proptest::prelude::*;

/// Increasing sequence with gaps in `[1, 6]`.
fn visit_set() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1u32..=6, 10..400).prop_map(|gaps| {
        let mut t = 0.0;
        gaps.into_iter()
            .map(|g| {
                t += g as f64;
                t
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_of_union_dominates_parts(a in visit_set(), b in visit_set()) {
        let r = a.last().unwrap().min(*b.last().unwrap());
        let mut u: Vec<f64> = a.iter().chain(&b).copied().collect();
        u.sort_by(f64::total_cmp);
        let da = lower_density(&a, r).unwrap().ldens_proxy;
        let db = lower_density(&b, r).unwrap().ldens_proxy;
        let du = lower_density(&u, r).unwrap().ldens_proxy;
        prop_assert!(du >= da.max(db) - 1e-15);
    }

    #[test]
    fn eigen_orbits_stay_exact((phi, g) in entire_symbol(), alpha in in_disk(1.0)) {
        let lam = g.evaluate(alpha);
        prop_assume!(lam.norm() > 1e-3);
        let run = orbit_run(&phi, &ExpSum::exponential(alpha), 300, &[], 1.0, 1e-9).unwrap();
        for rec in run.records.iter().filter(|r| r.n % 100 == 0 && r.n > 0) {
            // λ^n = 2^e · m with the exponent kept apart from the mantissa.
            let n = rec.n as f64;
            let log2 = n * lam.norm().log2();
            let e = log2.floor() as i64;
            let expect = ScaledExpSum::new(vec![ScaledTerm::new(
                alpha,
                vec![C64::from_polar((log2 - e as f64).exp2(), n * lam.arg())],
                e,
            )]);
            let err = rec.state.relative_distance(&expect);
            prop_assert!(err <= 1e-12 * n / 100.0 + 1e-13, "n={}: {err}", rec.n);
        }
    }

    #[test]
    fn probe_on_eigen_seed_sees_no_sign_changes((phi, g) in entire_symbol(), lam in in_disk(1.0)) {
        prop_assume!(g.evaluate(lam).norm() > 1e-3);
        let rep = fhc_obstruction_probe(&phi, lam, &ExpSum::exponential(lam), 40).unwrap();
        if rep.mode == ProbeMode::Normalized {
            prop_assert!(rep.values.iter().all(|h| (h - c(1.0, 0.0)).norm() <= 1e-10));
        }
        prop_assert_eq!(rep.density.ldens_proxy, 0.0);
    }
}

#[test]
fn steering_certificate_survives_independent_orbit() {
    let e1 = SymbolGerm::entire(ExpSum::exponential(c(1.0, 0.0)));
    let k = ConvexPolygon::rectangle(-1.0, 1.0, -1.0, 1.0);
    let targets = [
        ExpSum::polynomial(vec![c(1.0, 0.0), c(0.0, 1.0)]),
        ExpSum::polynomial(vec![c(0.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)]),
    ];
    let v = godefroy_shapiro_vector(&e1, &k, &targets, &[8, 16], 1.0, 1e-3).unwrap();
    let run = orbit_run(&e1, &v.f, 16, &targets, 1.0, 1e-3).unwrap();
    let d8 = run.records.iter().find(|r| r.n == 8).unwrap().target_distances[0];
    let d16 = run.records.iter().find(|r| r.n == 16).unwrap().target_distances[1];
    assert!(d8 <= v.report.residuals[0] * (1.0 + 1e-6) + 1e-12);
    assert!(d16 <= v.report.residuals[1] * (1.0 + 1e-6) + 1e-12);
    assert!(run.hits[0].contains(&8) && run.hits[1].contains(&16));
}
