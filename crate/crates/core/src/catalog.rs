//! JSON model documents and the built-in catalog.
//!
//! Scalars travel as strings ("p/q", "r/s i", "p/q+r/s i"); floats are
//! rejected. Forms are maps from comma-separated increasing 1-based
//! multi-indices to scalar strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{validate_complex_structure, ComplexError, ComplexStructure};
use crate::exterior::{ExteriorError, Form, LieAlgebraModel, MultiIndex};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, ScalarParseError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("invalid model document at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("{location}: {source}")]
    Scalar { location: String, source: ScalarParseError },
    #[error("{location}: complex structure entries must be real rationals, got {literal:?}")]
    NonRationalEntry { location: String, literal: String },
    #[error("form {form:?}: bad multi-index {key:?}")]
    BadKey { form: String, key: String },
    #[error("form {form:?}: key {key:?} does not have degree {degree}")]
    KeyDegree { form: String, key: String, degree: usize },
    #[error("invalid model: {0}")]
    Model(#[from] ExteriorError),
    #[error("invalid complex structure: {0}")]
    Complex(#[from] ComplexError),
    #[error("complex structure does not square to −id")]
    NotComplex,
    #[error("complex structure is not integrable")]
    NotIntegrable,
    #[error("unknown catalog model {0:?}")]
    UnknownModel(String),
    #[error("model {model:?} has no form named {form:?}")]
    UnknownForm { model: String, form: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDocument {
    pub degree: usize,
    pub coeffs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub dim: usize,
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    pub complex_structure: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, FormDocument>,
}

/// A parsed and validated document.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub document: ModelDocument,
    pub model: LieAlgebraModel,
    pub complex_structure: ComplexStructure,
    pub forms: BTreeMap<String, Form>,
}

impl LoadedModel {
    pub fn form(&self, name: &str) -> Result<&Form, CatalogError> {
        self.forms
            .get(name)
            .ok_or_else(|| CatalogError::UnknownForm { model: self.document.name.clone(), form: name.into() })
    }
}

pub fn form_to_document(form: &Form) -> FormDocument {
    FormDocument {
        degree: form.degree(),
        coeffs: form.terms().map(|(idx, c)| (idx.to_key(), c.to_string())).collect(),
    }
}

pub fn form_from_document(name: &str, dim: usize, doc: &FormDocument) -> Result<Form, CatalogError> {
    let mut terms = Vec::with_capacity(doc.coeffs.len());
    for (key, value) in &doc.coeffs {
        let idx = MultiIndex::parse_key(key)
            .filter(|i| i.max_index() <= dim)
            .ok_or_else(|| CatalogError::BadKey { form: name.into(), key: key.clone() })?;
        if idx.len() != doc.degree {
            return Err(CatalogError::KeyDegree { form: name.into(), key: key.clone(), degree: doc.degree });
        }
        let c: Scalar = value
            .parse()
            .map_err(|source| CatalogError::Scalar { location: format!("form {name:?}, key {key:?}"), source })?;
        terms.push((idx, c));
    }
    Ok(Form::from_terms(dim, doc.degree, terms)?)
}

impl ModelDocument {
    pub fn new(
        name: &str,
        description: &str,
        model: &LieAlgebraModel,
        j: &ComplexStructure,
        forms: &[(&str, Form)],
    ) -> Self {
        let m = j.matrix();
        ModelDocument {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            description: description.into(),
            dim: model.dim(),
            structure_constants: model
                .structure_constants()
                .map(|((i, j, k), c)| (i, j, k, c.to_string()))
                .collect(),
            complex_structure: (0..m.rows()).map(|r| m.row(r).iter().map(Scalar::to_string).collect()).collect(),
            forms: forms.iter().map(|(n, f)| (n.to_string(), form_to_document(f))).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        serde_json::from_str(text).map_err(|e| CatalogError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Pretty JSON with a trailing newline; stable for equal documents.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses scalars, builds the model (Jacobi check), and validates J.
    pub fn load(&self) -> Result<LoadedModel, CatalogError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CatalogError::SchemaVersion { found: self.schema_version });
        }
        let mut entries = Vec::with_capacity(self.structure_constants.len());
        for (i, j, k, s) in &self.structure_constants {
            let c: Scalar = s.parse().map_err(|source| CatalogError::Scalar {
                location: format!("structure constant ({i},{j},{k})"),
                source,
            })?;
            entries.push((*i, *j, *k, c));
        }
        let model = LieAlgebraModel::new(self.name.clone(), self.dim, entries)?;
        let mut rows = Vec::with_capacity(self.complex_structure.len());
        for (r, row) in self.complex_structure.iter().enumerate() {
            let mut parsed = Vec::with_capacity(row.len());
            for (c, s) in row.iter().enumerate() {
                let location = format!("complex_structure[{r}][{c}]");
                let x: Scalar = s.parse().map_err(|source| CatalogError::Scalar { location: location.clone(), source })?;
                if !x.is_real() {
                    return Err(CatalogError::NonRationalEntry { location, literal: s.clone() });
                }
                parsed.push(x);
            }
            if parsed.len() != self.dim {
                return Err(ComplexError::Shape { rows: self.complex_structure.len(), cols: parsed.len(), expected: self.dim }.into());
            }
            rows.push(parsed);
        }
        if rows.len() != self.dim {
            return Err(ComplexError::Shape { rows: rows.len(), cols: self.dim, expected: self.dim }.into());
        }
        let j = ComplexStructure::new(Matrix::from_rows(rows))?;
        let report = validate_complex_structure(&model, &j)?;
        if !report.squares_to_minus_identity {
            return Err(CatalogError::NotComplex);
        }
        if !report.passes() {
            return Err(CatalogError::NotIntegrable);
        }
        let forms = self
            .forms
            .iter()
            .map(|(n, f)| form_from_document(n, self.dim, f).map(|x| (n.clone(), x)))
            .collect::<Result<_, _>>()?;
        Ok(LoadedModel { document: self.clone(), model, complex_structure: j, forms })
    }
}

/// Parses and validates a JSON model document.
pub fn load_model(text: &str) -> Result<LoadedModel, CatalogError> {
    ModelDocument::parse(text)?.load()
}

fn sum(forms: &[Form]) -> Form {
    forms.iter().skip(1).fold(forms[0].clone(), |acc, f| acc.add(f).expect("same space"))
}

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn standard_kahler(dim: usize) -> Form {
    sum(&(1..=dim / 2).map(|a| Form::e(dim, &[2 * a - 1, 2 * a])).collect::<Vec<_>>())
}

fn torus6() -> ModelDocument {
    let m = LieAlgebraModel::abelian("torus6", 6).expect("valid");
    ModelDocument::new(
        "torus6",
        "abelian R^6 with the standard complex structure and Kähler form",
        &m,
        &ComplexStructure::standard(6),
        &[("omega", standard_kahler(6))],
    )
}

/// Unimodular change of basis used for the rotated torus.
pub fn rotation_matrix() -> Matrix {
    Matrix::from_int_rows(&[
        &[1, 1, 0, 0, 0, 0],
        &[0, 1, 1, 0, 0, 0],
        &[0, 0, 1, 1, 0, 0],
        &[0, 0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1, 1],
        &[0, 0, 0, 0, 0, 1],
    ])
}

fn torus6_rot() -> ModelDocument {
    let m = LieAlgebraModel::abelian("torus6_rot", 6).expect("valid");
    let p = rotation_matrix();
    let p_inv = p.inverse().expect("unimodular");
    let j = ComplexStructure::standard(6).conjugated_by(&p).expect("invertible");
    let w0 = crate::hermitian::two_form_matrix(&standard_kahler(6));
    let w = p_inv.transpose().mul(&w0).mul(&p_inv);
    let mut terms = Vec::new();
    for a in 1..=6 {
        for b in a + 1..=6 {
            terms.push((MultiIndex::from_sorted(&[a, b]).expect("sorted"), w[(a - 1, b - 1)].clone()));
        }
    }
    let omega = Form::from_terms(6, 2, terms).expect("2-form");
    ModelDocument::new(
        "torus6_rot",
        "abelian R^6 with the standard structure transported by a unimodular integer matrix",
        &m,
        &j,
        &[("omega", omega)],
    )
}

fn iwasawa() -> ModelDocument {
    let m = LieAlgebraModel::new(
        "iwasawa",
        6,
        [(1, 3, 5, int(1)), (2, 4, 5, int(-1)), (1, 4, 6, int(1)), (2, 3, 6, int(1))],
    )
    .expect("valid");
    ModelDocument::new(
        "iwasawa",
        "complex Heisenberg group: dθ³ = −θ¹∧θ² with θ^a = e^{2a−1} + i e^{2a}",
        &m,
        &ComplexStructure::standard(6),
        &[],
    )
}

fn kt_x_t2() -> ModelDocument {
    let m = LieAlgebraModel::new("kt_x_t2", 6, [(1, 2, 3, int(1))]).expect("valid");
    let symplectic = sum(&[Form::e(6, &[1, 4]), Form::e(6, &[2, 3]), Form::e(6, &[5, 6])]);
    ModelDocument::new(
        "kt_x_t2",
        "3-dimensional Heisenberg algebra plus R^3 (Kodaira–Thurston times a 2-torus)",
        &m,
        &ComplexStructure::standard(6),
        &[("symplectic", symplectic)],
    )
}

fn h5_x_r() -> ModelDocument {
    let m = LieAlgebraModel::new("h5_x_r", 6, [(1, 2, 5, int(1)), (3, 4, 5, int(1))]).expect("valid");
    ModelDocument::new(
        "h5_x_r",
        "5-dimensional Heisenberg algebra plus R",
        &m,
        &ComplexStructure::standard(6),
        &[],
    )
}

fn e2_x_r3() -> ModelDocument {
    let m = LieAlgebraModel::new("e2_x_r3", 6, [(1, 2, 3, int(1)), (1, 3, 2, int(-1))]).expect("valid");
    let mut j = Matrix::zeros(6, 6);
    for (a, b) in [(1, 4), (2, 3), (5, 6)] {
        j[(b - 1, a - 1)] = int(1);
        j[(a - 1, b - 1)] = int(-1);
    }
    let j = ComplexStructure::new(j).expect("square");
    let omega = sum(&[Form::e(6, &[1, 4]), Form::e(6, &[2, 3]), Form::e(6, &[5, 6])]);
    ModelDocument::new(
        "e2_x_r3",
        "Euclidean motion algebra e(2) plus R^3: a flat Kähler solvmanifold model with Δ ≠ 0",
        &m,
        &j,
        &[("omega", omega), ("exact_sample", Form::e(6, &[1, 3]))],
    )
}

/// The built-in model documents.
pub fn catalog() -> Vec<ModelDocument> {
    vec![torus6(), torus6_rot(), iwasawa(), kt_x_t2(), h5_x_r(), e2_x_r3()]
}

pub fn catalog_entry(name: &str) -> Result<ModelDocument, CatalogError> {
    catalog()
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| CatalogError::UnknownModel(name.into()))
}
