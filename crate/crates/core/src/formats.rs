//! JSON file formats for matrices, states, algebras, operations and verdicts.
//!
//! A matrix is `{"rows": r, "cols": c, "data": [[re, im], ...]}` in
//! row-major order. Every other document embeds matrices in that form.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{generate_algebra, OperatorAlgebra};
use crate::entanglement::SeparabilityVerdict;
use crate::error::{Error, Result};
use crate::numerics::{c64, ComplexMatrix, Dims};
use crate::operations::KrausOperation;
use crate::states::StateFunctional;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixJson { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = String;

    fn try_from(j: MatrixJson) -> std::result::Result<Self, String> {
        if j.data.len() != j.rows * j.cols {
            return Err(format!(
                "data has {} entries, expected rows*cols = {}",
                j.data.len(),
                j.rows * j.cols
            ));
        }
        if let Some(k) = j.data.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(format!("non-finite entry at index {k}"));
        }
        Ok(ComplexMatrix::from_fn(j.rows, j.cols, |r, c| {
            let [re, im] = j.data[r * j.cols + c];
            c64(re, im)
        }))
    }
}

/// `#[serde(with = "matrix_serde")]` for a [`ComplexMatrix`] field.
pub mod matrix_serde {
    use super::*;

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Same as [`matrix_serde`] for `Vec<ComplexMatrix>`.
pub mod matrix_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[ComplexMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        let js: Vec<MatrixJson> = v.iter().map(MatrixJson::from).collect();
        js.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<ComplexMatrix>, D::Error> {
        Vec::<MatrixJson>::deserialize(d)?
            .into_iter()
            .enumerate()
            .map(|(k, j)| {
                ComplexMatrix::try_from(j).map_err(|e| serde::de::Error::custom(format!("[{k}]: {e}")))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    #[serde(with = "matrix_serde")]
    pub density: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Dims>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StateDocument {
    pub fn from_state(s: &StateFunctional) -> Self {
        StateDocument {
            density: s.density().clone(),
            dims: s.dims(),
            label: s.label().map(str::to_owned),
        }
    }

    pub fn into_state(self) -> Result<StateFunctional> {
        let mut s = StateFunctional::new(self.density)?;
        if let Some(d) = self.dims {
            s = s.with_dims(d)?;
        }
        if let Some(l) = self.label {
            s = s.with_label(l);
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub ambient_dim: usize,
    #[serde(with = "matrix_vec_serde")]
    pub generators: Vec<ComplexMatrix>,
}

impl AlgebraDocument {
    pub fn from_algebra(a: &OperatorAlgebra) -> Self {
        AlgebraDocument { ambient_dim: a.ambient_dim(), generators: a.generators().to_vec() }
    }

    /// The basis is regenerated from the generators.
    pub fn into_algebra(self) -> Result<OperatorAlgebra> {
        generate_algebra(&self.generators, self.ambient_dim)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDocument {
    pub ambient_dim: usize,
    #[serde(with = "matrix_vec_serde")]
    pub kraus: Vec<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl OperationDocument {
    pub fn from_operation(t: &KrausOperation) -> Self {
        OperationDocument {
            ambient_dim: t.ambient_dim(),
            kraus: t.kraus().to_vec(),
            label: t.label().map(str::to_owned),
        }
    }

    pub fn into_operation(self) -> Result<KrausOperation> {
        if let Some(k) = self.kraus.first() {
            if k.nrows() != self.ambient_dim {
                return Err(Error::dims(self.ambient_dim, k.nrows()));
            }
        }
        let t = KrausOperation::new(self.kraus)?;
        Ok(match self.label {
            Some(l) => t.with_label(l),
            None => t,
        })
    }
}

/// A verdict together with the state it was reached for, so that the
/// certificate or witness can be checked independently.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDocument {
    pub dims: Dims,
    #[serde(with = "matrix_serde")]
    pub density: ComplexMatrix,
    pub verdict: SeparabilityVerdict,
}

/// Any of the documents above.
#[derive(Clone, Debug)]
pub enum Document {
    Matrix(ComplexMatrix),
    State(StateDocument),
    Algebra(AlgebraDocument),
    Operation(OperationDocument),
    Verdict(VerdictDocument),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Matrix(_) => "matrix",
            Document::State(_) => "state",
            Document::Algebra(_) => "algebra",
            Document::Operation(_) => "operation",
            Document::Verdict(_) => "verdict",
        }
    }
}

#[derive(Deserialize)]
struct Probe {
    rows: Option<serde::de::IgnoredAny>,
    density: Option<serde::de::IgnoredAny>,
    generators: Option<serde::de::IgnoredAny>,
    kraus: Option<serde::de::IgnoredAny>,
    verdict: Option<serde::de::IgnoredAny>,
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_owned(), message: message.into() }
}

fn decode<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        parse_err(
            origin,
            format!("line {} column {}, at `{field}`: {}", inner.line(), inner.column(), bare_message(&inner)),
        )
    })
}

/// serde_json appends its own position; drop it since ours leads the message.
fn bare_message(e: &serde_json::Error) -> String {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    full.strip_suffix(&suffix).unwrap_or(&full).to_string()
}

/// Parse a document, deciding its kind from the top-level keys.
pub fn parse_document(text: &str, origin: &str) -> Result<Document> {
    let probe: Probe = serde_json::from_str(text).map_err(|e| {
        parse_err(origin, format!("line {} column {}: {}", e.line(), e.column(), bare_message(&e)))
    })?;
    if probe.verdict.is_some() {
        Ok(Document::Verdict(decode(text, origin)?))
    } else if probe.kraus.is_some() {
        Ok(Document::Operation(decode(text, origin)?))
    } else if probe.generators.is_some() {
        Ok(Document::Algebra(decode(text, origin)?))
    } else if probe.density.is_some() {
        Ok(Document::State(decode(text, origin)?))
    } else if probe.rows.is_some() {
        let j: MatrixJson = decode(text, origin)?;
        Ok(Document::Matrix(ComplexMatrix::try_from(j).map_err(|m| parse_err(origin, m))?))
    } else {
        Err(parse_err(
            origin,
            "unrecognized document: expected one of `rows`, `density`, `generators`, `kraus`, `verdict`",
        ))
    }
}

pub fn read_document(path: &Path) -> Result<Document> {
    let origin = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| parse_err(&origin, e.to_string()))?;
    parse_document(&text, &origin)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("document types serialize infallibly")
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    to_json(&MatrixJson::from(m))
}

pub fn state_to_json(s: &StateFunctional) -> String {
    to_json(&StateDocument::from_state(s))
}

pub fn operation_to_json(t: &KrausOperation) -> String {
    to_json(&OperationDocument::from_operation(t))
}

pub fn algebra_to_json(a: &OperatorAlgebra) -> String {
    to_json(&AlgebraDocument::from_algebra(a))
}
