//! Output artifacts. Each one embeds a manifest: JSON as a top-level
//! `manifest` field, CSV and text as a leading `# manifest:` comment line.

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            inputs: Map::new(),
            version: VERSION,
            seed: None,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("input values serialize");
        self.inputs.insert(key.to_string(), v);
        self
    }

    pub fn tol(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

pub enum Body {
    Json(Value),
    /// Header columns, extra `# key: value` comment lines, rows.
    Csv {
        header: Vec<String>,
        notes: Vec<(String, Value)>,
        rows: Vec<Vec<String>>,
    },
    Text(String),
}

pub struct Artifact {
    pub manifest: Manifest,
    pub body: Body,
    /// Set when the artifact records a failed verification run.
    pub failed: bool,
}

impl Artifact {
    pub fn json(manifest: Manifest, result: impl Serialize) -> Result<Self> {
        Ok(Artifact {
            manifest,
            body: Body::Json(serde_json::to_value(result)?),
            failed: false,
        })
    }

    pub fn csv(manifest: Manifest, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Artifact {
            manifest,
            body: Body::Csv {
                header: header.iter().map(|s| s.to_string()).collect(),
                notes: Vec::new(),
                rows,
            },
            failed: false,
        }
    }

    pub fn note(mut self, key: &str, value: impl Serialize) -> Self {
        if let Body::Csv { notes, .. } = &mut self.body {
            notes.push((key.to_string(), serde_json::to_value(value).expect("notes serialize")));
        }
        self
    }

    pub fn render(&self) -> Result<String> {
        let manifest_line = || -> Result<String> { Ok(format!("# manifest: {}\n", serde_json::to_string(&self.manifest)?)) };
        Ok(match &self.body {
            Body::Json(v) => {
                let mut doc = Map::new();
                doc.insert("manifest".into(), serde_json::to_value(&self.manifest)?);
                doc.insert("result".into(), v.clone());
                let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
                s.push('\n');
                s
            }
            Body::Csv { header, notes, rows } => {
                let mut s = manifest_line()?;
                for (k, v) in notes {
                    writeln!(s, "# {k}: {}", serde_json::to_string(v)?)?;
                }
                writeln!(s, "{}", header.join(","))?;
                for r in rows {
                    writeln!(s, "{}", r.join(","))?;
                }
                s
            }
            Body::Text(t) => manifest_line()? + t,
        })
    }

    /// Writes the whole artifact in one go, to `out` or standard output.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        let text = self.render()?;
        match out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).context("writing standard output")
            }
        }
    }
}

/// CSV cell for a float: shortest representation that round-trips.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let s = format!("{x}");
        if s.contains('.') {
            s
        } else {
            s + ".0"
        }
    }
}

/// Exit status for an error chain: 3 for numeric failures, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<exptype_core::Error>() {
            return if e.is_numeric() { 3 } else { 2 };
        }
    }
    2
}

/// Module-qualified code of the first library error in the chain.
pub fn error_code(err: &anyhow::Error) -> &'static str {
    err.chain()
        .find_map(|c| c.downcast_ref::<exptype_core::Error>().map(|e| e.code()))
        .unwrap_or("cli.input")
}
