use crate::convex_geom::{minkowski_inflate, ConvexPolygon};
use crate::error::{Error, Result};
use crate::exp_core::{poly_shift, ExpSum};
use crate::numeric::{wrap_angle, C64, ONE, ZERO};
use crate::series::Series;
use std::f64::consts::PI;

/// Samples used by the zero-freeness winding count.
pub const WINDING_SAMPLES: usize = 512;
const WINDING_REFINEMENTS: usize = 4;
/// `|φ'(c)|` must exceed this for a local inverse.
pub const INVERSE_DERIVATIVE_MIN: f64 = 1e-9;

/// Where a germ is declared holomorphic: the whole plane, or a compact
/// convex polygon thickened by `clearance`.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Plane,
    Near { polygon: ConvexPolygon, clearance: f64 },
}

impl Region {
    pub fn near(polygon: ConvexPolygon, clearance: f64) -> Self {
        Region::Near { polygon, clearance }
    }

    /// Disk `|z - center| ≤ radius`.
    pub fn disk(center: C64, radius: f64) -> Self {
        Region::near(ConvexPolygon::point(center), radius)
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Region::Near { .. })
    }

    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Plane => z.re.is_finite() && z.im.is_finite(),
            Region::Near { polygon, clearance } => polygon
                .distance_to(z)
                .map(|d| d <= clearance + 1e-12 * (1.0 + clearance))
                .unwrap_or(false),
        }
    }

    pub fn center(&self) -> Option<C64> {
        match self {
            Region::Plane => None,
            Region::Near { polygon, .. } => polygon.centroid(),
        }
    }

    /// `n` points at equal arclength along the boundary, counter-clockwise.
    pub fn boundary(&self, n: usize) -> Option<Vec<C64>> {
        match self {
            Region::Plane => None,
            Region::Near { polygon, clearance } => {
                let shape = minkowski_inflate(polygon, *clearance).ok()?;
                Some(closed_curve_samples(shape.vertices(), n))
            }
        }
    }

    pub fn translate(&self, by: C64) -> Region {
        match self {
            Region::Plane => Region::Plane,
            Region::Near { polygon, clearance } => Region::Near {
                polygon: polygon.translate(by),
                clearance: *clearance,
            },
        }
    }
}

fn closed_curve_samples(vertices: &[C64], n: usize) -> Vec<C64> {
    let m = vertices.len();
    if m < 2 {
        return vertices.to_vec();
    }
    let lens: Vec<f64> = (0..m).map(|i| (vertices[(i + 1) % m] - vertices[i]).norm()).collect();
    let total: f64 = lens.iter().sum();
    let step = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let (mut edge, mut offset) = (0usize, 0.0f64);
    for k in 0..n {
        let s = k as f64 * step;
        while edge < m - 1 && s > offset + lens[edge] {
            offset += lens[edge];
            edge += 1;
        }
        let t = if lens[edge] > 0.0 { ((s - offset) / lens[edge]).clamp(0.0, 1.0) } else { 0.0 };
        out.push(vertices[edge] + (vertices[(edge + 1) % m] - vertices[edge]) * t);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// An exponential polynomial, holomorphic everywhere.
    Entire(ExpSum),
    /// `1/φ` on a zero-free region.
    Reciprocal(Box<SymbolGerm>),
    /// A logarithm of a zero-free `φ`, fixed by `log φ(branch_point) = branch_value`
    /// and continued along straight segments.
    Logarithm {
        base: Box<SymbolGerm>,
        branch_point: C64,
        branch_value: C64,
    },
    /// Inverse of `φ` near `φ(center)`, mapping back near `center`.
    LocalInverse { base: Box<SymbolGerm>, center: C64 },
    Product(Box<SymbolGerm>, Box<SymbolGerm>),
    /// `outer ∘ inner`.
    Compose {
        outer: Box<SymbolGerm>,
        inner: Box<SymbolGerm>,
    },
    /// `z ↦ φ(z + by)`.
    Shift { base: Box<SymbolGerm>, by: C64 },
}

/// A holomorphic germ with exact derivative evaluation at any point of its
/// validity region.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolGerm {
    kind: SymbolKind,
    validity: Region,
}

impl SymbolGerm {
    pub fn entire(f: ExpSum) -> Self {
        SymbolGerm {
            kind: SymbolKind::Entire(f),
            validity: Region::Plane,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::entire(ExpSum::constant(c))
    }

    /// The symbol `z`, i.e. the operator `D`.
    pub fn identity() -> Self {
        Self::entire(ExpSum::polynomial(vec![ZERO, ONE]))
    }

    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        Self::entire(ExpSum::polynomial(coeffs))
    }

    /// `c e^{βz}`.
    pub fn scaled_exponential(c: C64, beta: C64) -> Self {
        Self::entire(ExpSum::monomial(beta, vec![c]))
    }

    /// `1/base` on `validity`, which must be bounded and free of zeros of `base`.
    pub fn reciprocal(base: SymbolGerm, validity: Region) -> Result<Self> {
        check_zero_free(&base, &validity)?;
        Ok(SymbolGerm {
            kind: SymbolKind::Reciprocal(Box::new(base)),
            validity,
        })
    }

    /// Logarithm of a zero-free `base` on `validity`. Without an explicit
    /// branch the principal logarithm at the region centroid is used.
    pub fn logarithm(base: SymbolGerm, validity: Region, branch: Option<(C64, C64)>) -> Result<Self> {
        check_zero_free(&base, &validity)?;
        let (branch_point, branch_value) = match branch {
            Some((p, v)) => {
                if !validity.contains(p) {
                    return Err(Error::OutsideValidity { point: p });
                }
                let w = base.value(p)?;
                if (v.exp() - w).norm() > 1e-10 * w.norm().max(1e-300) {
                    return Err(Error::Config(format!("branch value {v} is not a logarithm of {w}")));
                }
                (p, v)
            }
            None => {
                let p = validity.center().expect("bounded region has a centroid");
                (p, base.value(p)?.ln())
            }
        };
        Ok(SymbolGerm {
            kind: SymbolKind::Logarithm {
                base: Box::new(base),
                branch_point,
                branch_value,
            },
            validity,
        })
    }

    /// Inverse of `base` near `base(center)`. `validity` lives in the image
    /// plane and must contain `base(center)`.
    pub fn local_inverse(base: SymbolGerm, center: C64, validity: Region) -> Result<Self> {
        let j = base.jet(center, 1)?;
        let d = j.coeffs()[1];
        if d.norm() <= INVERSE_DERIVATIVE_MIN {
            return Err(Error::SingularInverse { center, derivative: d });
        }
        let w0 = j.coeffs()[0];
        if !validity.contains(w0) {
            return Err(Error::OutsideValidity { point: w0 });
        }
        Ok(SymbolGerm {
            kind: SymbolKind::LocalInverse {
                base: Box::new(base),
                center,
            },
            validity,
        })
    }

    pub fn product(a: SymbolGerm, b: SymbolGerm) -> Self {
        let validity = if a.validity.is_bounded() { a.validity.clone() } else { b.validity.clone() };
        SymbolGerm {
            kind: SymbolKind::Product(Box::new(a), Box::new(b)),
            validity,
        }
    }

    pub fn compose(outer: SymbolGerm, inner: SymbolGerm) -> Self {
        let validity = inner.validity.clone();
        SymbolGerm {
            kind: SymbolKind::Compose {
                outer: Box::new(outer),
                inner: Box::new(inner),
            },
            validity,
        }
    }

    /// `φ_α = φ(· + α)`.
    pub fn shift(base: SymbolGerm, by: C64) -> Self {
        let validity = base.validity.translate(-by);
        SymbolGerm {
            kind: SymbolKind::Shift { base: Box::new(base), by },
            validity,
        }
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn validity(&self) -> &Region {
        &self.validity
    }

    /// Exponential polynomial behind an `Entire` symbol.
    pub fn as_entire(&self) -> Option<&ExpSum> {
        match &self.kind {
            SymbolKind::Entire(f) => Some(f),
            _ => None,
        }
    }

    /// Taylor coefficients `φ^{(k)}(α)/k!`, `k ≤ order`.
    pub fn jet(&self, alpha: C64, order: usize) -> Result<Series> {
        match &self.kind {
            SymbolKind::Entire(f) => Ok(entire_jet(f, alpha, order)),
            SymbolKind::Reciprocal(base) => {
                self.require(alpha)?;
                let a = base.jet(alpha, order)?;
                a.recip().ok_or(Error::ZeroOfSymbol { point: alpha })
            }
            SymbolKind::Logarithm {
                base,
                branch_point,
                branch_value,
            } => {
                self.require(alpha)?;
                let a = base.jet(alpha, order)?;
                if a.constant_term() == ZERO {
                    return Err(Error::ZeroOfSymbol { point: alpha });
                }
                let log0 = continue_log(base, *branch_point, *branch_value, alpha)?;
                a.log_with(log0).ok_or(Error::ZeroOfSymbol { point: alpha })
            }
            SymbolKind::LocalInverse { base, center } => {
                self.require(alpha)?;
                let u = invert_point(base, *center, alpha)?;
                let b = base.jet(u, order)?;
                if b.order() >= 1 && b.coeffs()[1].norm() <= INVERSE_DERIVATIVE_MIN {
                    return Err(Error::SingularInverse {
                        center: u,
                        derivative: b.coeffs()[1],
                    });
                }
                let mut t = b.reversion().ok_or(Error::SingularInverse {
                    center: u,
                    derivative: ZERO,
                })?;
                let mut c = t.coeffs().to_vec();
                c[0] = u;
                t = Series::new(c);
                Ok(t)
            }
            SymbolKind::Product(a, b) => {
                let x = a.jet(alpha, order)?;
                let y = b.jet(alpha, order)?;
                Ok(x.mul_trunc(&y, order))
            }
            SymbolKind::Compose { outer, inner } => {
                let a = inner.jet(alpha, order)?;
                let o = outer.jet(a.constant_term(), order)?;
                Ok(a.compose_into(&o))
            }
            SymbolKind::Shift { base, by } => base.jet(alpha + by, order),
        }
    }

    pub fn value(&self, z: C64) -> Result<C64> {
        Ok(self.jet(z, 0)?.constant_term())
    }

    /// `[φ(α), φ'(α), …, φ^{(m)}(α)]`.
    pub fn derivatives(&self, alpha: C64, m: usize) -> Result<Vec<C64>> {
        let j = self.jet(alpha, m)?;
        let mut fact = 1.0;
        Ok(j.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect())
    }

    /// Fails if `z` is outside the validity region of this germ or of any
    /// germ it is built from.
    pub fn check_domain(&self, z: C64) -> Result<()> {
        self.jet(z, 0).map(|_| ())
    }

    fn require(&self, z: C64) -> Result<()> {
        if self.validity.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideValidity { point: z })
        }
    }

    /// Rough exponential-type scale of the symbol (largest frequency modulus
    /// of any exponential polynomial inside it).
    pub fn type_estimate(&self) -> f64 {
        match &self.kind {
            SymbolKind::Entire(f) => f.exponential_type(),
            SymbolKind::Reciprocal(b) | SymbolKind::Shift { base: b, .. } => b.type_estimate(),
            SymbolKind::Logarithm { base, .. } | SymbolKind::LocalInverse { base, .. } => base.type_estimate(),
            SymbolKind::Product(a, b) => a.type_estimate() + b.type_estimate(),
            SymbolKind::Compose { outer, inner } => outer.type_estimate().max(inner.type_estimate()),
        }
    }
}

/// Jet of `Σ p(z) e^{βz}` at `α`: `e^{βα} p(α + t) e^{βt}` per term.
fn entire_jet(f: &ExpSum, alpha: C64, order: usize) -> Series {
    let mut acc = Series::zero(order);
    for t in f.terms() {
        let mut shifted = poly_shift(t.poly(), alpha);
        shifted.resize(order + 1, ZERO);
        shifted.truncate(order + 1);
        let p = Series::new(shifted);
        let e = Series::exp_linear(t.alpha(), order).scale((t.alpha() * alpha).exp());
        acc = acc + p.mul_trunc(&e, order);
    }
    acc
}

/// `log φ(α)` continued from `log φ(start) = start_value` along the segment.
fn continue_log(base: &SymbolGerm, start: C64, start_value: C64, alpha: C64) -> Result<C64> {
    if start == alpha {
        return Ok(start_value);
    }
    let mut samples = 64usize;
    loop {
        let mut arg_change = 0.0;
        let mut prev = base.value(start)?;
        let mut smooth = true;
        for k in 1..=samples {
            let z = start + (alpha - start) * (k as f64 / samples as f64);
            let w = base.value(z)?;
            if w == ZERO {
                return Err(Error::ZeroOfSymbol { point: z });
            }
            let d = wrap_angle(w.arg() - prev.arg());
            if d.abs() > PI / 4.0 {
                smooth = false;
            }
            arg_change += d;
            prev = w;
        }
        if smooth || samples >= 1 << 16 {
            return Ok(C64::new(prev.norm().ln(), start_value.im + arg_change));
        }
        samples *= 4;
    }
}

/// Solves `base(u) = w` for `u` on the branch through `center`, by Newton
/// continuation along the segment from `base(center)` to `w`.
fn invert_point(base: &SymbolGerm, center: C64, w: C64) -> Result<C64> {
    let w0 = base.value(center)?;
    let steps = ((w - w0).norm() / 0.05).ceil().max(1.0) as usize;
    let mut u = center;
    for s in 1..=steps {
        let target = w0 + (w - w0) * (s as f64 / steps as f64);
        let mut converged = false;
        for _ in 0..50 {
            let j = base.jet(u, 1)?;
            let (f, d) = (j.coeffs()[0] - target, j.coeffs()[1]);
            if d == ZERO {
                return Err(Error::SingularInverse { center: u, derivative: d });
            }
            let du = f / d;
            u -= du;
            if du.norm() <= 1e-15 * (1.0 + u.norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            let r = (base.value(u)? - target).norm();
            if r > 1e-12 * (1.0 + target.norm()) {
                return Err(Error::InverseNoConvergence { point: w });
            }
        }
    }
    Ok(u)
}

/// Winding number of `φ` along the boundary of `region` around 0, by the
/// sampled argument principle (512 samples, refined ×4 when a step turns
/// by more than π/2).
pub fn image_winding(phi: &SymbolGerm, region: &Region) -> Result<i64> {
    let mut n = WINDING_SAMPLES;
    for pass in 0..=WINDING_REFINEMENTS {
        let boundary = region
            .boundary(n)
            .ok_or_else(|| Error::Config("zero-freeness needs a bounded validity region".into()))?;
        let values: Vec<C64> = boundary.iter().map(|&z| phi.value(z)).collect::<Result<_>>()?;
        if let Some(k) = values.iter().position(|w| *w == ZERO) {
            return Err(Error::ZeroOfSymbol { point: boundary[k] });
        }
        let mut total = 0.0;
        let mut max_step: f64 = 0.0;
        for k in 0..values.len() {
            let d = wrap_angle(values[(k + 1) % values.len()].arg() - values[k].arg());
            max_step = max_step.max(d.abs());
            total += d;
        }
        if max_step <= PI / 2.0 || pass == WINDING_REFINEMENTS {
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        n *= 4;
    }
    unreachable!()
}

fn check_zero_free(base: &SymbolGerm, region: &Region) -> Result<()> {
    let w = image_winding(base, region)?;
    if w != 0 {
        return Err(Error::NotZeroFree { winding: w });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn e1() -> SymbolGerm {
        SymbolGerm::entire(ExpSum::exponential(ONE))
    }

    #[test]
    fn entire_derivatives() {
        assert!(close(&e1().derivatives(ZERO, 3).unwrap(), &[ONE; 4], 1e-15));
        let p = SymbolGerm::polynomial(vec![ONE, c(2.0, 0.0), c(3.0, 0.0)]);
        // 1 + 2z + 3z^2 at z = 2: 17, 14, 6
        let d = p.derivatives(c(2.0, 0.0), 3).unwrap();
        assert!(close(&d, &[c(17.0, 0.0), c(14.0, 0.0), c(6.0, 0.0), ZERO], 1e-13));
    }

    #[test]
    fn reciprocal_derivatives() {
        let r = SymbolGerm::reciprocal(e1(), Region::disk(ZERO, 1.0)).unwrap();
        let d = r.derivatives(ZERO, 2).unwrap();
        assert!(close(&d, &[ONE, -ONE, ONE], 1e-15));
        assert!(matches!(r.derivatives(c(3.0, 0.0), 1), Err(Error::OutsideValidity { .. })));
    }

    #[test]
    fn logarithm_derivatives() {
        let l = SymbolGerm::logarithm(e1(), Region::disk(ONE, 1.0), Some((ZERO, ZERO))).unwrap();
        let d = l.derivatives(ONE, 2).unwrap();
        assert!(close(&d, &[ONE, ONE, ZERO], 1e-13), "{d:?}");
    }

    #[test]
    fn logarithm_continues_branch_across_cut() {
        // log e^z = z on a tall disk crossing arg = π.
        let region = Region::disk(c(0.0, 3.0), 1.0);
        let l = SymbolGerm::logarithm(e1(), region, Some((c(0.0, 3.0), c(0.0, 3.0)))).unwrap();
        let z = c(0.2, 3.9);
        assert!((l.value(z).unwrap() - z).norm() < 1e-12);
    }

    #[test]
    fn zero_detected_by_winding() {
        let p = SymbolGerm::identity();
        assert!(matches!(
            SymbolGerm::reciprocal(p.clone(), Region::disk(ZERO, 1.0)),
            Err(Error::NotZeroFree { winding: 1 })
        ));
        let shifted = SymbolGerm::reciprocal(p, Region::disk(c(3.0, 0.0), 1.0));
        assert!(shifted.is_ok());
    }

    #[test]
    fn local_inverse_of_exponential_is_log() {
        let inv = SymbolGerm::local_inverse(e1(), ZERO, Region::disk(ONE, 0.5)).unwrap();
        let w = c(1.2, 0.3);
        let d = inv.derivatives(w, 3).unwrap();
        let expect = [w.ln(), ONE / w, -ONE / (w * w), c(2.0, 0.0) / (w * w * w)];
        assert!(close(&d, &expect, 1e-12), "{d:?}");
    }

    #[test]
    fn local_inverse_rejects_critical_point() {
        let sq = SymbolGerm::polynomial(vec![ZERO, ZERO, ONE]);
        assert!(matches!(
            SymbolGerm::local_inverse(sq, ZERO, Region::disk(ZERO, 1.0)),
            Err(Error::SingularInverse { .. })
        ));
    }

    #[test]
    fn compose_inverse_gives_linear_map() {
        // ψ = e1, φ = e2: ψ^{-1} ∘ φ = 2z near 0
        let inv = SymbolGerm::local_inverse(e1(), ZERO, Region::disk(ONE, 0.9)).unwrap();
        let phi = SymbolGerm::entire(ExpSum::exponential(c(2.0, 0.0)));
        let chi = SymbolGerm::compose(inv, phi);
        let a = c(0.1, -0.05);
        let d = chi.derivatives(a, 3).unwrap();
        assert!(close(&d, &[2.0 * a, c(2.0, 0.0), ZERO, ZERO], 1e-12), "{d:?}");
    }

    #[test]
    fn product_and_shift() {
        let z = SymbolGerm::identity();
        let sq = SymbolGerm::product(z.clone(), z);
        let d = sq.derivatives(c(1.5, 0.0), 2).unwrap();
        assert!(close(&d, &[c(2.25, 0.0), c(3.0, 0.0), c(2.0, 0.0)], 1e-14));
        let s = SymbolGerm::shift(e1(), ONE);
        let v = s.value(ZERO).unwrap();
        assert!((v - C64::new(std::f64::consts::E, 0.0)).norm() < 1e-15);
    }
}
