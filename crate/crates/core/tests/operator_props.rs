mod common;

use common::*;
use exptype_core::borel_polya::{borel_of_expsum, make_cauchy_cycle, polya_reconstruct};
use exptype_core::operators::{
    apply_operator_contour, apply_operator_exact, compose_apply, invert_operator, iterate_operator,
    iterate_operator_power,
};
use exptype_core::{BorelFunction, Contour, ExpSum, SymbolGerm};
use proptest::prelude::*;

fn reconstruction_error(f: &ExpSum, gamma: &Contour) -> f64 {
    let b = borel_of_expsum(f);
    disk_points(2.0)
        .into_iter()
        .map(|z| (polya_reconstruct(&b, gamma, z).unwrap().value - f.evaluate(z)).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polya_round_trip(f in expsum(4, 2, 1.0)) {
        let gamma = Contour::circle(c(0.0, 0.0), 2.0, 512).unwrap();
        prop_assert!(reconstruction_error(&f, &gamma) <= 1e-8);
    }

    #[test]
    fn contour_choice_does_not_matter(f in expsum(4, 2, 1.0)) {
        let b = borel_of_expsum(&f);
        let circle = Contour::circle(c(0.0, 0.0), 2.0, 512).unwrap();
        let cycle = make_cauchy_cycle(&f.exact_cid(), 0.5, 512).unwrap();
        for z in disk_points(2.0) {
            let a = polya_reconstruct(&b, &circle, z).unwrap().value;
            let g = polya_reconstruct(&b, &cycle, z).unwrap().value;
            prop_assert!((a - g).norm() <= 1e-8, "{a} vs {g}");
        }
    }

    #[test]
    fn quadrature_converges(f in expsum(4, 2, 1.0)) {
        let mut prev = f64::INFINITY;
        for nodes in [32, 64, 128] {
            let err = reconstruction_error(&f, &Contour::circle(c(0.0, 0.0), 2.0, nodes).unwrap());
            let floor = 1e-12 * f.terms().iter().flat_map(|t| t.poly()).map(|c| c.norm()).fold(1.0, f64::max);
            prop_assert!(err <= prev / 10.0 || err <= floor * 1e2, "{nodes}: {err} after {prev}");
            prev = err;
        }
    }

    #[test]
    fn borel_is_linear(f in expsum(3, 2, 1.0), g in expsum(3, 2, 1.0), xi in in_disk(1.0)) {
        let xi = xi * 3.0 / xi.norm().max(1e-3);
        let sum = borel_of_expsum(&f.add(&g)).eval(xi);
        let parts = borel_of_expsum(&f).eval(xi) + borel_of_expsum(&g).eval(xi);
        prop_assert!((sum - parts).norm() <= 1e-12 * parts.norm().max(1.0));
    }

    #[test]
    fn eigen_relation((phi, g) in entire_symbol(), alpha in in_disk(1.5)) {
        let out = apply_operator_exact(&phi, &ExpSum::exponential(alpha)).unwrap();
        let expect = ExpSum::monomial(alpha, vec![g.evaluate(alpha)]);
        prop_assert!(out.relative_distance(&expect) <= 1e-12);
    }

    #[test]
    fn shift_covariance((phi, _) in entire_symbol(), alpha in in_disk(1.0), p in poly(3)) {
        let lhs = apply_operator_exact(&phi, &ExpSum::monomial(alpha, p.clone())).unwrap();
        let shifted = SymbolGerm::shift(phi.clone(), alpha);
        let rhs = apply_operator_exact(&shifted, &ExpSum::polynomial(p)).unwrap().multiply_by_exponential(alpha);
        prop_assert!(lhs.relative_distance(&rhs) <= 1e-10);
    }

    #[test]
    fn composition((phi, _) in entire_symbol(), (psi, _) in entire_symbol(), f in expsum(4, 2, 1.0)) {
        let (chained, product) = compose_apply(&phi, &psi, &f).unwrap();
        prop_assert!(chained.relative_distance(&product) <= 1e-10);
    }

    #[test]
    fn inverse_undoes_operator((phi, _) in zero_free_symbol(), f in expsum(4, 2, 0.3)) {
        let back = invert_operator(&phi, &apply_operator_exact(&phi, &f).unwrap()).unwrap();
        prop_assert!(back.relative_distance(&f) <= 1e-9);
    }

    #[test]
    fn contour_path_matches_exact((phi, _) in entire_symbol(), f in expsum(4, 2, 1.0)) {
        let exact = apply_operator_exact(&phi, &f).unwrap();
        let gamma = Contour::circle(c(0.0, 0.0), 2.0, 512).unwrap();
        let b = borel_of_expsum(&f);
        let scale = exact.terms().iter().flat_map(|t| t.poly()).map(|c| c.norm()).fold(1.0, f64::max);
        for z in disk_points(1.0) {
            let v = apply_operator_contour(&phi, &b, &gamma, z).unwrap();
            prop_assert!((v - exact.evaluate(z)).norm() <= 1e-8 * scale);
        }
    }

    #[test]
    fn stepping_matches_power_path((phi, _) in zero_free_symbol(), f in expsum(3, 2, 0.5), n in 1u64..60) {
        let stepped = iterate_operator(&phi, &f, n).unwrap();
        let power = iterate_operator_power(&phi, &f, n).unwrap();
        prop_assert!(stepped.relative_distance(&power) <= 1e-9);
    }
}
