//! Reproducible acceptance checks for `exptype-core`.
//!
//! Each criterion draws its random instances from a ChaCha stream seeded by
//! `seed + id`, so a run is fully determined by the seed.

pub mod gen;

use exptype_core::borel_polya::{borel_of_expsum, polya_reconstruct};
use exptype_core::convex_geom::{
    convex_hull, hausdorff_distance, minkowski_inflate, support_function,
};
use exptype_core::dynamics::{fhc_obstruction_probe, godefroy_shapiro_vector, lower_density, orbit_run};
use exptype_core::growth::{
    cid_estimate, default_ladder, indicator_estimate, indicator_exact, level_set_trace, seminorm, Window,
};
use exptype_core::numeric::{compensated_sum, theta_grid};
use exptype_core::operators::{
    apply_operator_exact, compose_apply, hypercyclicity_predicate, invert_operator, Verdict, PREDICATE_TOL,
};
use exptype_core::phi_transform::{conjugacy_residual, phi_transform_report, verify_interpolation, ConjugacyCase};
use exptype_core::{Contour, ConvexPolygon, ExpSum, Result, SymbolGerm, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Pinned tolerances.
pub mod tol {
    pub const EIGEN: f64 = 1e-12;
    pub const POLYA: f64 = 1e-8;
    pub const POLYA_DROP: f64 = 10.0;
    pub const COMPOSE: f64 = 1e-10;
    pub const INVERT: f64 = 1e-9;
    pub const CONJUGACY: f64 = 1e-8;
    pub const CONTAINMENT: f64 = 1e-6;
    pub const INTERPOLATION: f64 = 1e-8;
    pub const INDICATOR_EXACT: f64 = 1e-12;
    pub const INDICATOR_REGRESSION: f64 = 2e-2;
    pub const CID: f64 = 0.05;
    pub const LEVEL_SET: f64 = 1e-6;
    pub const STEERING: f64 = 1e-3;
    pub const STEERING_SECONDS: u64 = 60;
    pub const DENSITY: f64 = 1e-2;
    pub const PROBE: f64 = 1e-10;
    pub const SEMINORM: f64 = 1e-9;

    /// Every pinned tolerance by name, for manifests.
    pub const ALL: [(&str, f64); 17] = [
        ("eigen", EIGEN),
        ("polya", POLYA),
        ("polya_drop", POLYA_DROP),
        ("compose", COMPOSE),
        ("invert", INVERT),
        ("conjugacy", CONJUGACY),
        ("containment", CONTAINMENT),
        ("interpolation", INTERPOLATION),
        ("indicator_exact", INDICATOR_EXACT),
        ("indicator_regression", INDICATOR_REGRESSION),
        ("cid", CID),
        ("level_set", LEVEL_SET),
        ("steering", STEERING),
        ("steering_seconds", STEERING_SECONDS as f64),
        ("density", DENSITY),
        ("probe", PROBE),
        ("seminorm", SEMINORM),
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error (or the relevant measured quantity).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    /// Wall time; not part of the rendered table.
    pub elapsed: Duration,
}

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "eigen relation"),
    (2, "borel/polya round trip"),
    (3, "composition and inversion"),
    (4, "quasi-conjugacy"),
    (5, "transform containment"),
    (6, "interpolation identity"),
    (7, "indicator of exponentials"),
    (8, "cid reconstruction"),
    (9, "level sets"),
    (10, "hypercyclicity predicate"),
    (11, "orbit steering"),
    (12, "density suite"),
    (13, "probe smoke tests"),
    (14, "seminorm isometry"),
];

struct Check {
    passed: bool,
    worst: f64,
    tolerance: f64,
    detail: String,
}

fn within(worst: f64, tolerance: f64, detail: impl Into<String>) -> Check {
    Check {
        passed: worst <= tolerance,
        worst,
        tolerance,
        detail: detail.into(),
    }
}

/// Runs criterion `id` with the given seed.
pub fn run(id: u8, seed: u64) -> Option<Outcome> {
    let name = CRITERIA.iter().find(|c| c.0 == id)?.1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let start = Instant::now();
    let result = match id {
        1 => eigen_relation(&mut rng),
        2 => polya_round_trip(&mut rng),
        3 => composition_and_inversion(&mut rng),
        4 => quasi_conjugacy(&mut rng),
        5 => containment(&mut rng),
        6 => interpolation(&mut rng),
        7 => indicator(&mut rng),
        8 => cid(&mut rng),
        9 => level_sets(),
        10 => predicate(),
        11 => steering(),
        12 => density(),
        13 => probe(&mut rng),
        14 => seminorm_isometry(&mut rng),
        _ => return None,
    };
    let elapsed = start.elapsed();
    let check = result.unwrap_or_else(|e| Check {
        passed: false,
        worst: f64::NAN,
        tolerance: f64::NAN,
        detail: format!("error: {e}"),
    });
    Some(Outcome {
        id,
        name,
        passed: check.passed,
        worst: check.worst,
        tolerance: check.tolerance,
        detail: check.detail,
        elapsed,
    })
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|(id, _)| run(*id, seed)).collect()
}

/// One line per criterion, without timings.
pub fn render_table(outcomes: &[Outcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        s.push_str(&format!(
            "{:>2} {:<28} {}  worst={:.3e} tol={:.1e}  {}\n",
            o.id,
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.worst,
            o.tolerance,
            o.detail
        ));
    }
    s
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn eigen_relation(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (phi, g) = gen::entire_symbol(rng);
        let alpha = gen::in_disk(rng, 1.5);
        // φ(α) summed term by term, independently of the operator code.
        let parts: Vec<C64> = g
            .terms()
            .iter()
            .flat_map(|t| {
                let e = (t.alpha() * alpha).exp();
                t.poly().iter().enumerate().map(move |(k, p)| p * alpha.powu(k as u32) * e).collect::<Vec<_>>()
            })
            .collect();
        let lam = compensated_sum(&parts);
        let out = apply_operator_exact(&phi, &ExpSum::exponential(alpha))?;
        let ok_shape = out.terms().len() == 1 && out.terms()[0].degree() == 0;
        let err = if ok_shape {
            (out.terms()[0].poly()[0] - lam).norm() / lam.norm().max(f64::MIN_POSITIVE)
        } else {
            f64::INFINITY
        };
        worst = worst.max(err);
    }
    Ok(within(worst, tol::EIGEN, "100 random (φ, α)"))
}

fn reconstruction_error(f: &ExpSum, nodes: usize) -> Result<f64> {
    let gamma = Contour::circle(c(0.0, 0.0), 2.0, nodes)?;
    let b = borel_of_expsum(f);
    let mut worst: f64 = 0.0;
    for z in gen::disk_points(2.0) {
        worst = worst.max((polya_reconstruct(&b, &gamma, z)?.value - f.evaluate(z)).norm());
    }
    Ok(worst)
}

fn polya_round_trip(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut worst_drop = f64::INFINITY;
    let mut checked = 0;
    for _ in 0..20 {
        let f = gen::expsum(rng, 4, 2, 1.0);
        worst = worst.max(reconstruction_error(&f, 512)?);
        // Doubling is judged until the error reaches the rounding floor.
        let scale = f.terms().iter().flat_map(|t| t.poly()).map(|p| p.norm()).fold(1.0, f64::max) * 8.0_f64.exp();
        let floor = 1e-12 * scale;
        let mut prev = reconstruction_error(&f, 16)?;
        for nodes in [32, 64, 128] {
            let e = reconstruction_error(&f, nodes)?;
            if prev > 1e2 * floor {
                worst_drop = worst_drop.min(prev / e.max(f64::MIN_POSITIVE));
                checked += 1;
            }
            prev = e;
        }
    }
    let drop_ok = worst_drop >= tol::POLYA_DROP;
    let mut check = within(
        worst,
        tol::POLYA,
        format!("20 sums, 512 nodes; smallest drop per doubling {worst_drop:.1e} over {checked} pre-floor doublings"),
    );
    check.passed &= drop_ok && checked > 0;
    Ok(check)
}

fn composition_and_inversion(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut comp: f64 = 0.0;
    for _ in 0..20 {
        let (phi, _) = gen::entire_symbol(rng);
        let (psi, _) = gen::entire_symbol(rng);
        let f = gen::expsum(rng, 4, 2, 1.0);
        let (a, b) = compose_apply(&phi, &psi, &f)?;
        comp = comp.max(a.relative_distance(&b));
    }
    let phi = SymbolGerm::entire(ExpSum::from_terms([(c(0.0, 0.0), vec![c(2.0, 0.0)]), (c(1.0, 0.0), vec![c(1.0, 0.0)])]));
    let mut inv: f64 = 0.0;
    for _ in 0..20 {
        let f = gen::expsum(rng, 4, 2, 0.2);
        let back = invert_operator(&phi, &apply_operator_exact(&phi, &f)?)?;
        inv = inv.max(back.relative_distance(&f));
    }
    Ok(Check {
        passed: comp <= tol::COMPOSE && inv <= tol::INVERT,
        worst: comp.max(inv),
        tolerance: tol::INVERT,
        detail: format!("composition {comp:.1e} (≤ {:.0e}), inversion {inv:.1e} (≤ {:.0e})", tol::COMPOSE, tol::INVERT),
    })
}

fn quasi_conjugacy(rng: &mut ChaCha8Rng) -> Result<Check> {
    let grid = gen::disk_points(2.0);
    let mut worst = [0.0f64; 3];
    for _ in 0..20 {
        let (phi, _) = gen::entire_symbol(rng);
        let f = gen::expsum(rng, 4, 2, 1.0);
        worst[0] = worst[0].max(conjugacy_residual(ConjugacyCase::Derivative, &phi, None, &f, &grid)?.relative);

        let (phi, _) = gen::zero_free_symbol(rng);
        let f = gen::expsum(rng, 4, 2, 1.0);
        worst[1] = worst[1].max(conjugacy_residual(ConjugacyCase::Translation, &phi, None, &f, &grid)?.relative);

        let (phi, _) = gen::zero_free_symbol(rng);
        let psi = gen::invertible_symbol(rng);
        let f = gen::expsum(rng, 4, 2, 0.3);
        worst[2] = worst[2].max(conjugacy_residual(ConjugacyCase::Psi, &phi, Some(&psi), &f, &grid)?.relative);
    }
    let m = worst.iter().cloned().fold(0.0, f64::max);
    Ok(within(
        m,
        tol::CONJUGACY,
        format!("D {:.1e}, translation {:.1e}, ψ {:.1e} (20 each)", worst[0], worst[1], worst[2]),
    ))
}

fn containment(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (phi, g) = gen::entire_symbol(rng);
        let f = gen::expsum(rng, 4, 2, 1.0);
        let rep = phi_transform_report(&phi, &f)?;
        let images: Vec<C64> = f.frequencies().iter().map(|a| g.evaluate(*a)).collect();
        let hull = minkowski_inflate(&convex_hull(&images), tol::CONTAINMENT)?;
        // Largest violation of a support inequality.
        for t in rep.output.terms() {
            for th in theta_grid(128) {
                let z = C64::from_polar(1.0, th);
                worst = worst.max((z * t.alpha()).re - support_function(&hull, z)?);
            }
        }
        worst = worst.max(-rep.containment_margin);
    }
    Ok(within(worst.max(0.0), 0.0, "100 random (φ, f); excess over inflated hull"))
}

fn interpolation(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (phi, _) = gen::zero_free_symbol(rng);
        let f = gen::expsum(rng, 3, 2, 1.0);
        worst = worst.max(verify_interpolation(&phi, &f, 20)?);
    }
    Ok(within(worst, tol::INTERPOLATION, "20 zero-free φ, n ≤ 20"))
}

fn indicator(rng: &mut ChaCha8Rng) -> Result<Check> {
    let thetas = theta_grid(256);
    let (mut exact_err, mut reg_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let alpha = gen::in_disk(rng, 1.0);
        let (tau, psi) = (alpha.norm(), alpha.arg());
        let f = ExpSum::exponential(alpha);
        let exact = indicator_exact(&f, &thetas);
        let est = indicator_estimate(&f, &thetas, &default_ladder(200.0));
        for (i, t) in thetas.iter().enumerate() {
            let h = tau * (t + psi).cos();
            exact_err = exact_err.max((exact.h_values[i] - h).abs());
            reg_err = reg_err.max((est.h_values[i] - h).abs());
        }
    }
    Ok(Check {
        passed: exact_err <= tol::INDICATOR_EXACT && reg_err <= tol::INDICATOR_REGRESSION,
        worst: reg_err,
        tolerance: tol::INDICATOR_REGRESSION,
        detail: format!("support path {exact_err:.1e} (≤ {:.0e}), regression r ≤ 200", tol::INDICATOR_EXACT),
    })
}

fn cid(rng: &mut ChaCha8Rng) -> Result<Check> {
    let thetas = theta_grid(256);
    let mut worst: f64 = 0.0;
    let mut relaxed = 0;
    for _ in 0..10 {
        let f = gen::expsum(rng, 5, 2, 1.0);
        let est = cid_estimate(&indicator_estimate(&f, &thetas, &default_ladder(200.0)))?;
        relaxed += est.flagged() as usize;
        worst = worst.max(hausdorff_distance(&est.polygon, &f.exact_cid())?);
    }
    Ok(within(
        worst,
        tol::CID,
        format!("10 sums with ≤ 5 frequencies, 256 directions; {relaxed} relaxed profiles"),
    ))
}

fn level_sets() -> Result<Check> {
    let tau = |phi: &SymbolGerm| -> Result<f64> {
        let ls = level_set_trace(phi, Window::default_for(phi), 128)?;
        Ok(ls.tau.unwrap_or(f64::INFINITY))
    };
    let z = tau(&SymbolGerm::identity())?;
    let e1 = tau(&SymbolGerm::entire(ExpSum::exponential(c(1.0, 0.0))))?;
    let e2 = tau(&SymbolGerm::scaled_exponential(c(2.0, 0.0), c(1.0, 0.0)))?;
    let errs = [(z - 1.0).abs(), e1, (e2 - 2f64.ln()).abs()];
    let m = errs.iter().cloned().fold(0.0, f64::max);
    Ok(within(m, tol::LEVEL_SET, format!("τ(z) = {z:.9}, τ(e₁) = {e1:.1e}, τ(2e₁) = {e2:.9}")))
}

fn predicate() -> Result<Check> {
    let e1 = SymbolGerm::entire(ExpSum::exponential(c(1.0, 0.0)));
    let three_e1 = SymbolGerm::entire(ExpSum::from_terms([(c(0.0, 0.0), vec![c(3.0, 0.0)]), (c(1.0, 0.0), vec![c(1.0, 0.0)])]));
    let cases: [(&str, SymbolGerm, ConvexPolygon, Verdict); 4] = [
        ("z on unit square", SymbolGerm::identity(), ConvexPolygon::rectangle(0.0, 1.0, 0.0, 1.0), Verdict::Yes),
        ("e₁ on [-i, i]", e1, ConvexPolygon::segment(c(0.0, -1.0), c(0.0, 1.0)), Verdict::Yes),
        ("z on radius 0.5", SymbolGerm::identity(), ConvexPolygon::regular(c(0.0, 0.0), 0.5, 16), Verdict::No),
        ("3+e₁ near 0", three_e1, ConvexPolygon::regular(c(0.0, 0.0), 0.1, 8), Verdict::No),
    ];
    let mut wrong = 0;
    let mut detail = Vec::new();
    for (name, phi, k, expect) in cases {
        let got = hypercyclicity_predicate(&phi, &k, PREDICATE_TOL)?.verdict;
        if got != expect {
            wrong += 1;
        }
        detail.push(format!("{name}: {got:?}"));
    }
    Ok(within(wrong as f64, 0.0, detail.join(", ")))
}

fn steering() -> Result<Check> {
    let start = Instant::now();
    let e1 = SymbolGerm::entire(ExpSum::exponential(c(1.0, 0.0)));
    let k = ConvexPolygon::rectangle(-1.0, 1.0, -1.0, 1.0);
    let targets = [
        ExpSum::polynomial(vec![c(1.0, 0.0), c(0.0, 1.0)]),
        ExpSum::polynomial(vec![c(0.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)]),
    ];
    let schedule = [10, 20];
    let v = godefroy_shapiro_vector(&e1, &k, &targets, &schedule, 1.0, tol::STEERING)?;
    let run = orbit_run(&e1, &v.f, 20, &targets, 1.0, tol::STEERING)?;
    let hit = run.hits[0].contains(&10) && run.hits[1].contains(&20);
    let dist: f64 = schedule
        .iter()
        .enumerate()
        .map(|(m, &n)| run.records.iter().find(|r| r.n == n).map_or(f64::INFINITY, |r| r.target_distances[m]))
        .fold(0.0, f64::max);
    let fast = start.elapsed() < Duration::from_secs(tol::STEERING_SECONDS);
    let mut check = within(dist, tol::STEERING, format!("{} basis frequencies, hits at 10 and 20", v.report.basis.len()));
    check.passed &= hit && fast;
    Ok(check)
}

fn density() -> Result<Check> {
    let r = 1e4;
    let seq = |f: &dyn Fn(u64) -> f64| -> Vec<f64> { (1..).map(f).take_while(|x| *x <= r).collect() };
    let n = lower_density(&seq(&|k| k as f64), r)?.ldens_proxy;
    let e = lower_density(&seq(&|k| 2.0 * k as f64), r)?.ldens_proxy;
    let s = lower_density(&seq(&|k| (k * k) as f64), r)?.ldens_proxy;
    let m = (n - 1.0).abs().max((e - 0.5).abs()).max(s);
    Ok(within(m, tol::DENSITY, format!("ℕ {n:.4}, 2ℕ {e:.4}, squares {s:.4}")))
}

fn probe(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut dens: f64 = 0.0;
    let mut done = 0;
    while done < 10 {
        let (phi, g) = gen::entire_symbol(rng);
        let lam = gen::in_disk(rng, 1.0);
        if g.evaluate(lam).norm() < 1.0 {
            continue;
        }
        let rep = fhc_obstruction_probe(&phi, lam, &ExpSum::exponential(lam), 40)?;
        worst = worst.max(rep.values.iter().map(|h| (h - c(1.0, 0.0)).norm()).fold(0.0, f64::max));
        dens = dens.max(rep.density.ldens_proxy);
        done += 1;
    }
    // Seeds (1+z)e_λ: h(n) = 1 + n φ'(λ)/φ(λ).
    let mut drift: f64 = 0.0;
    let mut exits = 0;
    let mut drifted = 0;
    while drifted < 10 {
        let (phi, g) = gen::entire_symbol(rng);
        let lam = gen::in_disk(rng, 1.0);
        let q = g.evaluate(lam);
        let dq = g.differentiate().evaluate(lam);
        if q.norm() < 1.0 || dq.norm() < 1e-3 {
            continue;
        }
        let rep = fhc_obstruction_probe(&phi, lam, &ExpSum::monomial(lam, vec![c(1.0, 0.0), c(1.0, 0.0)]), 40)?;
        for (n, h) in rep.values.iter().enumerate() {
            let expect = c(1.0, 0.0) + dq / q * n as f64;
            drift = drift.max((h - expect).norm() / expect.norm().max(1.0));
        }
        exits += rep.sector_exits.len();
        drifted += 1;
    }
    let m = worst.max(drift);
    Ok(Check {
        passed: m <= tol::PROBE && dens == 0.0,
        worst: m,
        tolerance: tol::PROBE,
        detail: format!("eigen density {dens}, drift seeds logged {exits} sector exits"),
    })
}

fn seminorm_isometry(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let f = gen::expsum(rng, 4, 2, 0.5);
        let k = gen::polygon_around(rng, &f, 1.0);
        let alpha = gen::point_in(rng, &k);
        let n = rand::Rng::gen_range(rng, 1..=5u32);
        let a = seminorm(&f, &k, n)?.value;
        let b = seminorm(&f.multiply_by_exponential(-alpha), &k.translate(-alpha), n)?.value;
        worst = worst.max((a - b).abs() / a.max(1.0));
    }
    Ok(within(worst, tol::SEMINORM, "50 random (f, K ∋ α, n ≤ 5)"))
}
