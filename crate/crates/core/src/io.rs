//! JSON model files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "facets": [
//!     {"charvec": [1, 0], "name": "F1"},
//!     {"charvec": [0, 1], "name": "F2", "normal": ["0", "1"]}
//!   ],
//!   "format_version": "1",
//!   "vertices": [
//!     ["F1", "F2"]
//!   ]
//! }
//! ```
//!
//! Integers are JSON numbers of any size; rationals are `"p/q"` strings.
//! Normals are optional but must be given for all facets or none.
//! [`write_model`] emits the canonical layout, with keys sorted.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::linalg::Rational;
use crate::model::{CharacteristicModel, ModelError};
use crate::polytope::CombinatorialPolytope;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0:?} (expected {FORMAT_VERSION:?})")]
    Version(String),
    #[error("facet {facet}: {value:?} is not an integer")]
    BadInteger { facet: String, value: String },
    #[error("facet {facet}: {value:?} is not a rational of the form p/q")]
    BadRational { facet: String, value: String },
    #[error("vertex {vertex} names unknown facet {name:?}")]
    UnknownFacet { vertex: usize, name: String },
    #[error("normals must be given for every facet or for none")]
    PartialNormals,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetRecord {
    pub name: String,
    pub charvec: Vec<serde_json::Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: String,
    pub dimension: usize,
    pub facets: Vec<FacetRecord>,
    pub vertices: Vec<Vec<String>>,
}

impl ModelFile {
    pub fn from_model(model: &CharacteristicModel) -> Self {
        let p = model.polytope();
        let facets = (0..p.num_facets())
            .map(|i| FacetRecord {
                name: p.facet_name(i).to_string(),
                charvec: model
                    .charvec(i)
                    .iter()
                    .map(|x| serde_json::Number::from_str(&x.to_string()).expect("integers are JSON numbers"))
                    .collect(),
                normal: model
                    .normals()
                    .map(|ns| ns[i].iter().map(ToString::to_string).collect()),
            })
            .collect();
        let vertices = p
            .vertices()
            .iter()
            .map(|v| v.iter().map(|&i| p.facet_name(i).to_string()).collect())
            .collect();
        Self {
            format_version: FORMAT_VERSION.to_string(),
            dimension: model.dim(),
            facets,
            vertices,
        }
    }

    pub fn to_model(&self) -> Result<CharacteristicModel, IoError> {
        if self.format_version != FORMAT_VERSION {
            return Err(IoError::Version(self.format_version.clone()));
        }
        let names: Vec<String> = self.facets.iter().map(|f| f.name.clone()).collect();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (vi, v) in self.vertices.iter().enumerate() {
            let mut idx = Vec::with_capacity(v.len());
            for name in v {
                let i = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| IoError::UnknownFacet {
                        vertex: vi,
                        name: name.clone(),
                    })?;
                idx.push(i);
            }
            vertices.push(idx);
        }
        let polytope = CombinatorialPolytope::new(self.dimension, names, vertices);

        let mut charvecs = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let v = f
                .charvec
                .iter()
                .map(|x| {
                    BigInt::from_str(&x.to_string()).map_err(|_| IoError::BadInteger {
                        facet: f.name.clone(),
                        value: x.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            charvecs.push(v);
        }

        let with_normals = self.facets.iter().filter(|f| f.normal.is_some()).count();
        let normals = if with_normals == 0 {
            None
        } else if with_normals < self.facets.len() {
            return Err(IoError::PartialNormals);
        } else {
            let mut ns = Vec::with_capacity(self.facets.len());
            for f in &self.facets {
                let v = f
                    .normal
                    .as_ref()
                    .expect("checked above")
                    .iter()
                    .map(|s| parse_rational(s).ok_or_else(|| IoError::BadRational {
                        facet: f.name.clone(),
                        value: s.clone(),
                    }))
                    .collect::<Result<Vec<_>, _>>()?;
                ns.push(v);
            }
            Some(ns)
        };
        Ok(CharacteristicModel::new(polytope, charvecs, normals)?)
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            (q != BigInt::from(0)).then(|| Rational::new(p, q))
        }
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
    }
}

pub fn parse_model(text: &str) -> Result<CharacteristicModel, IoError> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.to_model()
}

pub fn load_model(path: &Path) -> Result<CharacteristicModel, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}

/// Directory holding the shipped fixtures: `$QTORB_FIXTURES` if set,
/// otherwise `fixtures/` at the workspace root.
pub fn fixtures_dir() -> PathBuf {
    match std::env::var_os("QTORB_FIXTURES") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    }
}

pub fn load_fixture(name: &str) -> Result<CharacteristicModel, IoError> {
    load_model(&fixtures_dir().join(name))
}

/// Canonical text of a model file: one facet record and one vertex per line.
pub fn write_model(model: &CharacteristicModel) -> String {
    let file = ModelFile::from_model(model);
    let facets: Vec<String> = file
        .facets
        .iter()
        .map(|f| format!("    {}", inline(&serde_json::to_value(f).expect("serializable"))))
        .collect();
    let vertices: Vec<String> = file
        .vertices
        .iter()
        .map(|v| format!("    {}", inline(&serde_json::to_value(v).expect("serializable"))))
        .collect();
    format!(
        "{{\n  \"dimension\": {},\n  \"facets\": [\n{}\n  ],\n  \"format_version\": {},\n  \"vertices\": [\n{}\n  ]\n}}\n",
        file.dimension,
        facets.join(",\n"),
        inline(&Value::String(file.format_version.clone())),
        vertices.join(",\n"),
    )
}

/// Single-line JSON with `", "` and `": "` separators; object keys sorted.
pub fn inline(v: &Value) -> String {
    match v {
        Value::Array(xs) => format!("[{}]", xs.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let body: Vec<String> = keys
                .into_iter()
                .map(|k| format!("{}: {}", Value::String(k.clone()), inline(&m[k])))
                .collect();
            format!("{{{}}}", body.join(", "))
        }
        other => other.to_string(),
    }
}
