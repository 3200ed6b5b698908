use exptype_verify::{render_table, run, CRITERIA, DEFAULT_SEED};

fn check(id: u8) {
    let o = run(id, DEFAULT_SEED).expect("known criterion");
    // Printed with --nocapture; kept on failure otherwise.
    print!("{}", render_table(std::slice::from_ref(&o)));
    assert!(o.passed, "criterion {} ({}) failed: {}", o.id, o.name, o.detail);
}

#[test]
fn c01_eigen_relation() {
    check(1);
}

#[test]
fn c02_borel_polya_round_trip() {
    check(2);
}

#[test]
fn c03_composition_and_inversion() {
    check(3);
}

#[test]
fn c04_quasi_conjugacy() {
    check(4);
}

#[test]
fn c05_transform_containment() {
    check(5);
}

#[test]
fn c06_interpolation_identity() {
    check(6);
}

#[test]
fn c07_indicator_of_exponentials() {
    check(7);
}

#[test]
fn c08_cid_reconstruction() {
    check(8);
}

#[test]
fn c09_level_sets() {
    check(9);
}

#[test]
fn c10_hypercyclicity_predicate() {
    check(10);
}

#[test]
fn c11_orbit_steering() {
    check(11);
}

#[test]
fn c12_density_suite() {
    check(12);
}

#[test]
fn c13_probe_smoke_tests() {
    check(13);
}

#[test]
fn c14_seminorm_isometry() {
    check(14);
}

#[test]
fn every_criterion_is_covered() {
    assert_eq!(CRITERIA.len(), 14);
    assert!(CRITERIA.iter().enumerate().all(|(i, c)| c.0 as usize == i + 1));
}

#[test]
fn runs_are_reproducible() {
    let a = run(14, DEFAULT_SEED).unwrap();
    let b = run(14, DEFAULT_SEED).unwrap();
    assert_eq!(render_table(&[a]), render_table(&[b]));
}
