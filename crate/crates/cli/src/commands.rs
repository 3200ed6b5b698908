//! Subcommands. Each one delegates to a single library operation.

use crate::formats::{pair, read_expsum, read_json, read_points, read_reals, read_symbol, ExpSumDto, PolygonDto, SymbolDto};
use crate::output::{num, Artifact, Body, Manifest};
use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use exptype_core::borel_polya::{borel_of_expsum, make_cauchy_cycle, polya_reconstruct};
use exptype_core::convex_geom::hausdorff_distance;
use exptype_core::dynamics::{
    fhc_obstruction_probe, lower_density_window, orbit_run_with, ProbeMode, DEFAULT_WINDOW, SPOT_CHECK_TOL,
};
use exptype_core::growth::{
    cid_estimate, default_ladder, indicator_estimate, indicator_exact, level_set_trace, Window, CROSSING_TOL,
    ZERO_REJECT,
};
use exptype_core::numeric::theta_grid;
use exptype_core::operators::{apply_operator_exact, iterate_operator};
use exptype_core::phi_transform::phi_transform_report;
use exptype_core::{Contour, ExpSum, C64};
use serde::Serialize;
use serde_json::json;

/// Parses `re,im` (or a bare real number).
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    let z = match parts.as_slice() {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err("expected `re,im`".into()),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err("non-finite value".into())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an exponential sum at points (CSV).
    Eval(EvalArgs),
    /// Borel transform: poles as JSON, or values at points as CSV.
    Borel(BorelArgs),
    /// Pólya reconstruction from the Borel transform by contour quadrature (CSV).
    Polya(PolyaArgs),
    /// Apply φ(D), or its n-th power, exactly (JSON).
    Apply(ApplyArgs),
    /// Transform Φ_φ f with containment report (JSON).
    Phi(PhiArgs),
    /// Indicator profile h_f(θ) (CSV).
    Indicator(IndicatorArgs),
    /// Conjugate indicator diagram reconstructed from the profile (JSON).
    Cid(IndicatorArgs),
    /// Level set |φ| = 1 and its distance to the origin (CSV).
    Levelset(LevelsetArgs),
    /// Orbit of f under φ(D) with distances to targets (CSV).
    Orbit(OrbitArgs),
    /// Lower-density proxy of a set of non-negative reals (JSON).
    Density(DensityArgs),
    /// Sign-change probe for a seed with a singleton diagram (JSON).
    Probe(ProbeArgs),
    /// Run the acceptance suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Exponential sum: JSON file, `-` for stdin, or inline JSON.
    #[arg(long)]
    pub f: String,
    /// Points as a JSON array of `[re, im]` pairs.
    #[arg(long)]
    pub at: String,
}

#[derive(Debug, Args)]
pub struct BorelArgs {
    #[arg(long)]
    pub f: String,
    /// Points off the diagram; without them the poles are printed.
    #[arg(long)]
    pub at: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContourKind {
    /// Circle `|ξ - center| = radius`, trapezoid rule.
    Circle,
    /// Polygon around the diagram at distance `clearance`, Gauss–Legendre panels.
    Cycle,
}

#[derive(Debug, Args)]
pub struct PolyaArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub at: String,
    #[arg(long, value_enum, default_value_t = ContourKind::Circle)]
    pub contour: ContourKind,
    #[arg(long, default_value = "0,0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub center: C64,
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.5)]
    pub clearance: f64,
    #[arg(long, default_value_t = 512)]
    pub nodes: usize,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// Symbol: JSON file, `-` for stdin, or inline JSON.
    #[arg(long)]
    pub phi: String,
    #[arg(long)]
    pub f: String,
    /// Number of applications.
    #[arg(long, default_value_t = 1)]
    pub power: u64,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(long)]
    pub phi: String,
    #[arg(long)]
    pub f: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Support function of the exact diagram.
    Exact,
    /// Radial regression of log|f| over a ladder of radii.
    Regression,
}

#[derive(Debug, Args)]
pub struct IndicatorArgs {
    #[arg(long)]
    pub f: String,
    /// Number of equally spaced directions.
    #[arg(long, default_value_t = 256)]
    pub thetas: usize,
    #[arg(long, value_enum, default_value_t = Method::Regression)]
    pub method: Method,
    /// Largest radius of the regression ladder.
    #[arg(long, default_value_t = 200.0)]
    pub r_max: f64,
}

#[derive(Debug, Args)]
pub struct LevelsetArgs {
    #[arg(long)]
    pub phi: String,
    /// Half-width of the square window; defaults to 2 plus the symbol's type.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Grid cells per side.
    #[arg(long, default_value_t = 128)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long)]
    pub phi: String,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub n_max: u64,
    /// Targets as a JSON array of exponential sums.
    #[arg(long)]
    pub targets: Option<String>,
    /// Radius of the disk on which distances are measured.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// A target is hit when the grid distance is at most this.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Keep every k-th row (hits are always kept).
    #[arg(long, default_value_t = 1)]
    pub keep_every: u64,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Sorted non-negative reals: JSON array or one number per line.
    #[arg(long)]
    pub points: String,
    /// Largest radius; defaults to the last point.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Trailing fraction of `[0, r_max]` over which the infimum is taken.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: f64,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub phi: String,
    /// The singleton frequency λ as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: C64,
    /// Seed with diagram {λ}; defaults to e_λ.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long, default_value_t = 200)]
    pub n_max: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all`, or a comma-separated list of criterion numbers.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = exptype_verify::DEFAULT_SEED)]
    pub seed: u64,
}

pub fn run(cmd: &Command) -> Result<Artifact> {
    match cmd {
        Command::Eval(a) => cmd_eval(a),
        Command::Borel(a) => cmd_borel(a),
        Command::Polya(a) => cmd_polya(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Phi(a) => cmd_phi(a),
        Command::Indicator(a) => cmd_indicator(a),
        Command::Cid(a) => cmd_cid(a),
        Command::Levelset(a) => cmd_levelset(a),
        Command::Orbit(a) => cmd_orbit(a),
        Command::Density(a) => cmd_density(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn cells(zs: &[C64]) -> Vec<String> {
    zs.iter().flat_map(|z| [num(z.re), num(z.im)]).collect()
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Artifact> {
    let f = read_expsum(&a.f)?;
    let pts = read_points(&a.at)?;
    let rows = pts.iter().map(|&z| cells(&[z, f.evaluate(z)])).collect();
    let m = Manifest::new("eval")
        .input("f", ExpSumDto::from(&f))
        .input("at", pts.iter().map(|&z| pair(z)).collect::<Vec<_>>());
    Ok(Artifact::csv(m, &["z_re", "z_im", "value_re", "value_im"], rows))
}

pub fn cmd_borel(a: &BorelArgs) -> Result<Artifact> {
    let f = read_expsum(&a.f)?;
    let b = borel_of_expsum(&f);
    let m = Manifest::new("borel").input("f", ExpSumDto::from(&f));
    match &a.at {
        None => {
            let poles: Vec<_> = b
                .poles
                .iter()
                .map(|p| json!({"alpha": pair(p.alpha), "principal": p.principal.iter().map(|&c| pair(c)).collect::<Vec<_>>()}))
                .collect();
            Artifact::json(m, json!({ "poles": poles }))
        }
        Some(at) => {
            let pts = read_points(at)?;
            let mut rows = Vec::with_capacity(pts.len());
            for &xi in &pts {
                rows.push(cells(&[xi, b.try_eval(xi)?]));
            }
            let m = m.input("at", pts.iter().map(|&z| pair(z)).collect::<Vec<_>>());
            Ok(Artifact::csv(m, &["xi_re", "xi_im", "value_re", "value_im"], rows))
        }
    }
}

pub fn cmd_polya(a: &PolyaArgs) -> Result<Artifact> {
    let f = read_expsum(&a.f)?;
    let pts = read_points(&a.at)?;
    let gamma = match a.contour {
        ContourKind::Circle => Contour::circle(a.center, a.radius, a.nodes)?,
        ContourKind::Cycle => make_cauchy_cycle(&f.exact_cid(), a.clearance, a.nodes)?,
    };
    let b = borel_of_expsum(&f);
    let mut rows = Vec::with_capacity(pts.len());
    for &z in &pts {
        let q = polya_reconstruct(&b, &gamma, z)?;
        let exact = f.evaluate(z);
        let mut r = cells(&[z, q.value, exact]);
        r.push(num((q.value - exact).norm()));
        rows.push(r);
    }
    let mut m = Manifest::new("polya")
        .input("f", ExpSumDto::from(&f))
        .input("at", pts.iter().map(|&z| pair(z)).collect::<Vec<_>>())
        .input("contour", a.contour.to_possible_value().map(|v| v.get_name().to_string()))
        .input("nodes", a.nodes);
    m = match a.contour {
        ContourKind::Circle => m.input("center", pair(a.center)).input("radius", a.radius),
        ContourKind::Cycle => m.input("clearance", a.clearance),
    };
    Ok(Artifact::csv(
        m,
        &["z_re", "z_im", "value_re", "value_im", "exact_re", "exact_im", "abs_error"],
        rows,
    ))
}

pub fn cmd_apply(a: &ApplyArgs) -> Result<Artifact> {
    let phi = read_symbol(&a.phi)?;
    let f = read_expsum(&a.f)?;
    let out = match a.power {
        0 => f.clone(),
        1 => apply_operator_exact(&phi, &f)?,
        n => iterate_operator(&phi, &f, n)?.to_expsum()?,
    };
    let m = Manifest::new("apply")
        .input("phi", SymbolDto::from(&phi))
        .input("f", ExpSumDto::from(&f))
        .input("power", a.power);
    Artifact::json(m, ExpSumDto::from(&out))
}

pub fn cmd_phi(a: &PhiArgs) -> Result<Artifact> {
    let phi = read_symbol(&a.phi)?;
    let f = read_expsum(&a.f)?;
    let rep = phi_transform_report(&phi, &f)?;
    let collisions: Vec<_> = rep
        .collisions
        .iter()
        .map(|c| json!({"sources": [pair(c.sources.0), pair(c.sources.1)], "image": pair(c.image)}))
        .collect();
    let m = Manifest::new("phi")
        .input("phi", SymbolDto::from(&phi))
        .input("f", ExpSumDto::from(&f));
    Artifact::json(
        m,
        json!({
            "output": ExpSumDto::from(&rep.output),
            "input_terms": rep.input_terms,
            "input_max_degree": rep.input_max_degree,
            "collisions": collisions,
            "containment_margin": rep.containment_margin,
        }),
    )
}

fn profile_for(a: &IndicatorArgs, f: &ExpSum) -> Result<exptype_core::growth::IndicatorProfile> {
    if a.thetas < 3 {
        bail!("--thetas must be at least 3");
    }
    if !(a.r_max.is_finite() && a.r_max > 0.0) {
        bail!("--r-max must be positive");
    }
    let thetas = theta_grid(a.thetas);
    Ok(match a.method {
        Method::Exact => indicator_exact(f, &thetas),
        Method::Regression => indicator_estimate(f, &thetas, &default_ladder(a.r_max)),
    })
}

fn indicator_manifest(cmd: &str, a: &IndicatorArgs, f: &ExpSum) -> Manifest {
    let m = Manifest::new(cmd)
        .input("f", ExpSumDto::from(f))
        .input("thetas", a.thetas)
        .input("method", a.method);
    match a.method {
        Method::Exact => m,
        Method::Regression => m.input("r_max", a.r_max).tol("zero_reject", ZERO_REJECT),
    }
}

pub fn cmd_indicator(a: &IndicatorArgs) -> Result<Artifact> {
    let f = read_expsum(&a.f)?;
    let p = profile_for(a, &f)?;
    let rows = p
        .thetas
        .iter()
        .zip(&p.h_values)
        .zip(&p.flagged)
        .map(|((&t, &h), &fl)| vec![num(t), num(h), (fl as u8).to_string()])
        .collect();
    Ok(Artifact::csv(indicator_manifest("indicator", a, &f), &["theta_rad", "h", "flagged"], rows))
}

pub fn cmd_cid(a: &IndicatorArgs) -> Result<Artifact> {
    let f = read_expsum(&a.f)?;
    let p = profile_for(a, &f)?;
    let est = cid_estimate(&p)?;
    let exact = f.exact_cid();
    let d = if exact.is_empty() { None } else { Some(hausdorff_distance(&est.polygon, &exact)?) };
    Artifact::json(
        indicator_manifest("cid", a, &f),
        json!({
            "polygon": PolygonDto::from(&est.polygon),
            "relaxation": est.relaxation,
            "flagged": est.flagged(),
            "exact": PolygonDto::from(&exact),
            "hausdorff_to_exact": d,
        }),
    )
}

pub fn cmd_levelset(a: &LevelsetArgs) -> Result<Artifact> {
    let phi = read_symbol(&a.phi)?;
    let window = match a.half_width {
        Some(w) if w.is_finite() && w > 0.0 => Window::square(w),
        Some(_) => bail!("--half-width must be positive"),
        None => Window::default_for(&phi),
    };
    let ls = level_set_trace(&phi, window, a.resolution)?;
    let mut rows = Vec::new();
    for (i, line) in ls.polylines.iter().enumerate() {
        for z in line {
            rows.push(vec![i.to_string(), num(z.re), num(z.im)]);
        }
    }
    let m = Manifest::new("levelset")
        .input("phi", SymbolDto::from(&phi))
        .input("window", [window.x0, window.x1, window.y0, window.y1])
        .input("resolution", a.resolution)
        .tol("crossing", CROSSING_TOL);
    Ok(Artifact::csv(m, &["polyline", "re", "im"], rows)
        .note("tau", ls.tau)
        .note("nearest", ls.nearest.map(pair)))
}

pub fn cmd_orbit(a: &OrbitArgs) -> Result<Artifact> {
    let phi = read_symbol(&a.phi)?;
    let f = read_expsum(&a.f)?;
    let targets: Vec<ExpSum> = match &a.targets {
        None => Vec::new(),
        Some(t) => read_json::<Vec<ExpSumDto>>(t, "targets")?
            .iter()
            .enumerate()
            .map(|(i, d)| d.build().with_context(|| format!("targets[{i}]")))
            .collect::<Result<_>>()?,
    };
    if !(a.radius.is_finite() && a.radius > 0.0) {
        bail!("--radius must be positive");
    }
    if a.keep_every == 0 {
        bail!("--keep-every must be at least 1");
    }
    let opts = exptype_core::dynamics::OrbitOptions {
        grid: exptype_core::dynamics::default_disk_grid(a.radius),
        keep_every: a.keep_every,
    };
    let run = orbit_run_with(&phi, &f, a.n_max, &targets, a.epsilon, &opts)?;
    let mut header = vec!["n".to_string(), "max_exp2".to_string()];
    header.extend((0..targets.len()).map(|m| format!("dist_{m}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = run
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string(), r.state.max_exp2().to_string()];
            row.extend(r.target_distances.iter().map(|&d| num(d)));
            row
        })
        .collect();
    let m = Manifest::new("orbit")
        .input("phi", SymbolDto::from(&phi))
        .input("f", ExpSumDto::from(&f))
        .input("n_max", a.n_max)
        .input("targets", targets.iter().map(ExpSumDto::from).collect::<Vec<_>>())
        .input("radius", a.radius)
        .input("keep_every", a.keep_every)
        .tol("epsilon", a.epsilon)
        .tol("spot_check", SPOT_CHECK_TOL);
    Ok(Artifact::csv(m, &header, rows)
        .note("hits", &run.hits)
        .note("hit_density", run.densities.iter().map(|d| d.ldens_proxy).collect::<Vec<_>>())
        .note("spot_check_max", run.spot_check_max))
}

pub fn cmd_density(a: &DensityArgs) -> Result<Artifact> {
    let pts = read_reals(&a.points)?;
    let r_max = match a.r_max {
        Some(r) => r,
        None => *pts.last().context("the point set is empty; pass --r-max")?,
    };
    let d = lower_density_window(&pts, r_max, a.window)?;
    let m = Manifest::new("density")
        .input("points", &pts)
        .input("r_max", r_max)
        .input("window", a.window);
    Artifact::json(
        m,
        json!({
            "count": pts.len(),
            "r_max": d.r_max,
            "ldens_proxy": d.ldens_proxy,
            "exact_limit": d.exact_limit,
        }),
    )
}

pub fn cmd_probe(a: &ProbeArgs) -> Result<Artifact> {
    let phi = read_symbol(&a.phi)?;
    let f = match &a.f {
        Some(s) => read_expsum(s)?,
        None => ExpSum::exponential(a.lambda),
    };
    let r = fhc_obstruction_probe(&phi, a.lambda, &f, a.n_max)?;
    let m = Manifest::new("probe")
        .input("phi", SymbolDto::from(&phi))
        .input("lambda", pair(a.lambda))
        .input("f", ExpSumDto::from(&f))
        .input("n_max", a.n_max);
    Artifact::json(
        m,
        json!({
            "mode": match r.mode { ProbeMode::Normalized => "normalized", ProbeMode::Decay => "decay" },
            "phi_lambda": pair(r.phi_lambda),
            "values": r.values.iter().map(|&v| pair(v)).collect::<Vec<_>>(),
            "in_sector": r.in_sector,
            "sector_exits": r.sector_exits,
            "sign_changes_re": r.sign_changes_re,
            "sign_changes_im": r.sign_changes_im,
            "sign_change_density": r.density.ldens_proxy,
            "interpolant_used": r.interpolant_used,
            "interpolant_gap": r.interpolant_gap,
        }),
    )
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Artifact> {
    let ids: Vec<u8> = if a.suite.trim() == "all" {
        exptype_verify::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        a.suite
            .split(',')
            .map(|s| {
                let id: u8 = s.trim().parse().with_context(|| format!("--suite: `{s}` is not a criterion number"))?;
                if !exptype_verify::CRITERIA.iter().any(|c| c.0 == id) {
                    bail!("--suite: no criterion {id}");
                }
                Ok(id)
            })
            .collect::<Result<_>>()?
    };
    let outcomes: Vec<_> = ids
        .iter()
        .map(|&id| exptype_verify::run(id, a.seed).expect("criterion ids are validated"))
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut table = exptype_verify::render_table(&outcomes);
    table.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    let mut m = Manifest::new("verify").input("suite", &ids).seed(a.seed);
    for (name, t) in exptype_verify::tol::ALL {
        m = m.tol(name, t);
    }
    Ok(Artifact {
        manifest: m,
        body: Body::Text(table),
        failed: passed < outcomes.len(),
    })
}
