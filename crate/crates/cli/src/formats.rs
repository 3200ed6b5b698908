//! JSON schema for the exact objects: complex numbers as `[re, im]`.

use anyhow::{bail, Context, Result};
use exptype_core::operators::SymbolKind;
use exptype_core::{ConvexPolygon, ExpSum, Region, SymbolGerm, C64};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::path::Path;

pub type Pair = [f64; 2];

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    pub alpha: Pair,
    pub poly: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpSumDto {
    pub terms: Vec<TermDto>,
}

impl From<&ExpSum> for ExpSumDto {
    fn from(f: &ExpSum) -> Self {
        ExpSumDto {
            terms: f
                .terms()
                .iter()
                .map(|t| TermDto {
                    alpha: pair(t.alpha()),
                    poly: t.poly().iter().map(|&c| pair(c)).collect(),
                })
                .collect(),
        }
    }
}

impl ExpSumDto {
    pub fn build(&self) -> Result<ExpSum> {
        for (i, t) in self.terms.iter().enumerate() {
            if t.alpha.iter().chain(t.poly.iter().flatten()).any(|x| !x.is_finite()) {
                bail!("terms[{i}]: non-finite number");
            }
        }
        Ok(ExpSum::from_terms(
            self.terms
                .iter()
                .map(|t| (complex(t.alpha), t.poly.iter().map(|&c| complex(c)).collect())),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonDto {
    pub vertices: Vec<Pair>,
}

impl From<&ConvexPolygon> for PolygonDto {
    fn from(k: &ConvexPolygon) -> Self {
        PolygonDto {
            vertices: k.vertices().iter().map(|&v| pair(v)).collect(),
        }
    }
}

impl PolygonDto {
    /// Vertices are normalised through the convex hull.
    pub fn build(&self) -> Result<ConvexPolygon> {
        if self.vertices.iter().flatten().any(|x| !x.is_finite()) {
            bail!("vertices: non-finite number");
        }
        Ok(ConvexPolygon::from_vertices(self.vertices.iter().map(|&v| complex(v)).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionDto {
    Plane,
    Near { polygon: PolygonDto, clearance: f64 },
}

impl From<&Region> for RegionDto {
    fn from(r: &Region) -> Self {
        match r {
            Region::Plane => RegionDto::Plane,
            Region::Near { polygon, clearance } => RegionDto::Near {
                polygon: polygon.into(),
                clearance: *clearance,
            },
        }
    }
}

impl RegionDto {
    pub fn build(&self) -> Result<Region> {
        Ok(match self {
            RegionDto::Plane => Region::Plane,
            RegionDto::Near { polygon, clearance } => {
                if !(clearance.is_finite() && *clearance >= 0.0) {
                    bail!("validity.clearance must be finite and non-negative");
                }
                Region::near(polygon.build()?, *clearance)
            }
        })
    }
}

/// A symbol germ. `validity` is checked on input: for derived kinds it must
/// equal the region implied by the operands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolDto {
    Entire {
        base: ExpSumDto,
        validity: RegionDto,
    },
    Reciprocal {
        base: Box<SymbolDto>,
        validity: RegionDto,
    },
    Logarithm {
        base: Box<SymbolDto>,
        validity: RegionDto,
        branch_point: Pair,
        branch_value: Pair,
    },
    LocalInverse {
        base: Box<SymbolDto>,
        validity: RegionDto,
        center: Pair,
    },
    Product {
        base: Box<SymbolDto>,
        factor: Box<SymbolDto>,
        validity: RegionDto,
    },
    Compose {
        base: Box<SymbolDto>,
        inner: Box<SymbolDto>,
        validity: RegionDto,
    },
    Shift {
        base: Box<SymbolDto>,
        by: Pair,
        validity: RegionDto,
    },
}

impl From<&SymbolGerm> for SymbolDto {
    fn from(s: &SymbolGerm) -> Self {
        let validity = RegionDto::from(s.validity());
        let sym = |g: &SymbolGerm| Box::new(SymbolDto::from(g));
        match s.kind() {
            SymbolKind::Entire(f) => SymbolDto::Entire { base: f.into(), validity },
            SymbolKind::Reciprocal(b) => SymbolDto::Reciprocal { base: sym(b), validity },
            SymbolKind::Logarithm {
                base,
                branch_point,
                branch_value,
            } => SymbolDto::Logarithm {
                base: sym(base),
                validity,
                branch_point: pair(*branch_point),
                branch_value: pair(*branch_value),
            },
            SymbolKind::LocalInverse { base, center } => SymbolDto::LocalInverse {
                base: sym(base),
                validity,
                center: pair(*center),
            },
            SymbolKind::Product(a, b) => SymbolDto::Product {
                base: sym(a),
                factor: sym(b),
                validity,
            },
            SymbolKind::Compose { outer, inner } => SymbolDto::Compose {
                base: sym(outer),
                inner: sym(inner),
                validity,
            },
            SymbolKind::Shift { base, by } => SymbolDto::Shift {
                base: sym(base),
                by: pair(*by),
                validity,
            },
        }
    }
}

impl SymbolDto {
    pub fn build(&self) -> Result<SymbolGerm> {
        let derived = |g: SymbolGerm, validity: &RegionDto, kind: &str| -> Result<SymbolGerm> {
            if validity.build()? != *g.validity() {
                bail!("{kind}: validity does not match the region implied by the operands");
            }
            Ok(g)
        };
        Ok(match self {
            SymbolDto::Entire { base, validity } => {
                if *validity != RegionDto::Plane {
                    bail!("entire: validity must be the plane");
                }
                SymbolGerm::entire(base.build().context("entire.base")?)
            }
            SymbolDto::Reciprocal { base, validity } => {
                SymbolGerm::reciprocal(base.build().context("reciprocal.base")?, validity.build()?)?
            }
            SymbolDto::Logarithm {
                base,
                validity,
                branch_point,
                branch_value,
            } => SymbolGerm::logarithm(
                base.build().context("logarithm.base")?,
                validity.build()?,
                Some((complex(*branch_point), complex(*branch_value))),
            )?,
            SymbolDto::LocalInverse { base, validity, center } => {
                SymbolGerm::local_inverse(base.build().context("local_inverse.base")?, complex(*center), validity.build()?)?
            }
            SymbolDto::Product { base, factor, validity } => derived(
                SymbolGerm::product(base.build().context("product.base")?, factor.build().context("product.factor")?),
                validity,
                "product",
            )?,
            SymbolDto::Compose { base, inner, validity } => derived(
                SymbolGerm::compose(base.build().context("compose.base")?, inner.build().context("compose.inner")?),
                validity,
                "compose",
            )?,
            SymbolDto::Shift { base, by, validity } => derived(
                SymbolGerm::shift(base.build().context("shift.base")?, complex(*by)),
                validity,
                "shift",
            )?,
        })
    }
}

/// Reads JSON from a file, from stdin (`-`), or inline when the argument
/// starts with `{` or `[`.
pub fn read_json<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        (arg.to_string(), "inline argument".to_string())
    } else if arg == "-" {
        let text = std::io::read_to_string(std::io::stdin()).context("reading stdin")?;
        (text, "stdin".to_string())
    } else {
        let text = std::fs::read_to_string(Path::new(arg)).with_context(|| format!("reading {what} from {arg}"))?;
        (text, arg.to_string())
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what} ({origin})"))
}

pub fn read_expsum(arg: &str) -> Result<ExpSum> {
    read_json::<ExpSumDto>(arg, "exponential sum")?.build()
}

pub fn read_symbol(arg: &str) -> Result<SymbolGerm> {
    read_json::<SymbolDto>(arg, "symbol")?.build()
}

pub fn read_polygon(arg: &str) -> Result<ConvexPolygon> {
    read_json::<PolygonDto>(arg, "polygon")?.build()
}

pub fn read_points(arg: &str) -> Result<Vec<C64>> {
    let pts: Vec<Pair> = read_json(arg, "points")?;
    if pts.iter().flatten().any(|x| !x.is_finite()) {
        bail!("points: non-finite number");
    }
    Ok(pts.into_iter().map(complex).collect())
}

/// Real sample points: a JSON array, or whitespace/comma separated numbers
/// (one file line per point is the usual layout).
pub fn read_reals(arg: &str) -> Result<Vec<f64>> {
    if arg.trim_start().starts_with('[') {
        return read_json(arg, "points");
    }
    let text = if arg == "-" {
        std::io::read_to_string(std::io::stdin()).context("reading stdin")?
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading points from {arg}"))?
    };
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).with_context(|| format!("parsing points ({arg})"));
    }
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for field in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let x: f64 = field
                .parse()
                .with_context(|| format!("{arg}: line {}: `{field}` is not a number", ln + 1))?;
            out.push(x);
        }
    }
    Ok(out)
}
