mod common;

use common::*;
use exptype_core::convex_geom::{convex_hull, minkowski_inflate, support_function};
use exptype_core::numeric::theta_grid;
use exptype_core::phi_transform::{
    conjugacy_residual, phi_transform_exact, phi_transform_report, verify_interpolation, ConjugacyCase,
};
use exptype_core::{ExpSum, SymbolGerm, C64};
use proptest::prelude::*;

/// `ψ` with a global inverse branch: affine or a scaled exponential.
fn invertible_symbol() -> impl Strategy<Value = SymbolGerm> {
    prop_oneof![
        (in_disk(1.0), coeff()).prop_map(|(a, b)| SymbolGerm::polynomial(vec![a, b])),
        (coeff(), (0.5..1.5f64, -3.0..3.0f64)).prop_map(|(k, (r, t))| SymbolGerm::scaled_exponential(k, C64::from_polar(r, t))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frequencies_land_in_image_hull((phi, g) in entire_symbol(), f in expsum(4, 2, 1.0)) {
        let rep = phi_transform_report(&phi, &f).unwrap();
        prop_assert!(rep.containment_margin >= 0.0);
        let images: Vec<C64> = f.frequencies().iter().map(|a| g.evaluate(*a)).collect();
        let hull = minkowski_inflate(&convex_hull(&images), 1e-6).unwrap();
        for t in rep.output.terms() {
            prop_assert!(images.iter().any(|w| (w - t.alpha()).norm() <= 1e-12 * w.norm().max(1.0)));
            for th in theta_grid(64) {
                let z = C64::from_polar(1.0, th);
                prop_assert!((z * t.alpha()).re <= support_function(&hull, z).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn semigroup((phi, _) in entire_symbol(), (psi, _) in entire_symbol(), f in expsum(3, 2, 1.0)) {
        let two_step = phi_transform_exact(&psi, &phi_transform_exact(&phi, &f).unwrap()).unwrap();
        let composed = phi_transform_exact(&SymbolGerm::compose(psi.clone(), phi.clone()), &f).unwrap();
        prop_assert!(two_step.relative_distance(&composed) <= 1e-9);
    }

    #[test]
    fn degree_is_preserved((phi, _) in entire_symbol(), alpha in in_disk(1.0), p in poly(4)) {
        let out = phi_transform_exact(&phi, &ExpSum::monomial(alpha, p.clone())).unwrap();
        let d1 = phi.derivatives(alpha, 1).unwrap()[1];
        prop_assert_eq!(out.terms().len(), 1);
        let deg = out.terms()[0].degree();
        prop_assert!(deg < p.len());
        if d1.norm() > 1e-6 {
            prop_assert_eq!(deg, p.len() - 1);
        }
    }

    #[test]
    fn derivative_conjugacy((phi, _) in entire_symbol(), f in expsum(4, 2, 1.0)) {
        let r = conjugacy_residual(ConjugacyCase::Derivative, &phi, None, &f, &disk_points(2.0)).unwrap();
        prop_assert!(r.relative <= 1e-8, "{r:?}");
    }

    #[test]
    fn translation_conjugacy((phi, _) in zero_free_symbol(), f in expsum(4, 2, 1.0)) {
        let r = conjugacy_residual(ConjugacyCase::Translation, &phi, None, &f, &disk_points(2.0)).unwrap();
        prop_assert!(r.relative <= 1e-8, "{r:?}");
    }

    #[test]
    fn psi_conjugacy((phi, _) in zero_free_symbol(), psi in invertible_symbol(), f in expsum(4, 2, 0.3)) {
        let r = conjugacy_residual(ConjugacyCase::Psi, &phi, Some(&psi), &f, &disk_points(2.0)).unwrap();
        prop_assert!(r.relative <= 1e-8, "{r:?}");
    }

    #[test]
    fn interpolates_orbit_at_integers((phi, _) in zero_free_symbol(), f in expsum(3, 2, 1.0)) {
        prop_assert!(verify_interpolation(&phi, &f, 20).unwrap() <= 1e-8);
    }
}

#[test]
fn critical_point_lowers_degree() {
    // φ(z) = z² has φ'(0) = 0, so z e^{0z} maps to a constant.
    let phi = SymbolGerm::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let out = phi_transform_exact(&phi, &ExpSum::polynomial(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
    assert_eq!(out.terms()[0].degree(), 0);
}
