//! Complex structures on a model: the complex frame, bidegree splitting of
//! forms, the action of `I` on forms, and the operators `d^c`, `∂`, `∂̄`.
//!
//! A covector `α` has type (1,0) when `Jᵀα = iα`, where `Jᵀ` is the dual
//! action `(Jᵀα)(X) = α(JX)`; in coordinates this is the transpose matrix.
//! The complex frame is a canonical basis `θ¹…θⁿ` of (1,0)-covectors
//! followed by the conjugates `θ̄¹…θ̄ⁿ`. Frame monomials of degree `k` carry
//! an exact bidegree, so projectors and `I = i^{p−q}` are diagonal there.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exterior::{basis, ExteriorError, Form, GradedOperator, LieAlgebraModel, MultiIndex};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub type Bidegree = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("complex structure must be {expected}x{expected}, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize, expected: usize },
    #[error("complex structure entries must be rational")]
    NonRational,
    #[error("J² ≠ −id")]
    NotComplex,
    #[error("complex structure is not integrable: (0,2)-part of d on {} frame covector(s) is nonzero", residuals.len())]
    NotIntegrable { residuals: Vec<(usize, Form)> },
    #[error("d has a component of bidegree ({p},{q}) on ({p0},{q0})-forms")]
    ForbiddenComponent { p0: usize, q0: usize, p: usize, q: usize },
    #[error("structure constants must be real")]
    NonRealModel,
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// An endomorphism `J` of the Lie algebra; columns are the images `J e_j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexStructure {
    j: Matrix,
}

impl ComplexStructure {
    pub fn new(j: Matrix) -> Result<Self, ComplexError> {
        if !j.is_square() {
            return Err(ComplexError::Shape { rows: j.rows(), cols: j.cols(), expected: j.rows() });
        }
        if !j.is_real() {
            return Err(ComplexError::NonRational);
        }
        Ok(ComplexStructure { j })
    }

    /// `J e_{2a−1} = e_{2a}`, `J e_{2a} = −e_{2a−1}`.
    pub fn standard(dim: usize) -> Self {
        let mut j = Matrix::zeros(dim, dim);
        for a in (0..dim).step_by(2) {
            j[(a + 1, a)] = Scalar::one();
            j[(a, a + 1)] = Scalar::from_int(-1);
        }
        ComplexStructure { j }
    }

    /// `P J P⁻¹` for an invertible `P`.
    pub fn conjugated_by(&self, p: &Matrix) -> Option<Self> {
        let inv = p.inverse()?;
        Some(ComplexStructure { j: p.mul(&self.j).mul(&inv) })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.j
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn squares_to_minus_identity(&self) -> bool {
        self.j.mul(&self.j).add(&Matrix::identity(self.dim())).is_zero()
    }
}

/// Outcome of checking `J² = −id` and integrability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexValidation {
    pub squares_to_minus_identity: bool,
    /// `(a, (0,2)-part of dθ^a)` for each frame covector with a nonzero residual;
    /// `None` when `J² ≠ −id` and no frame exists.
    pub integrability_residuals: Option<Vec<(usize, Form)>>,
}

impl ComplexValidation {
    pub fn passes(&self) -> bool {
        self.squares_to_minus_identity
            && self.integrability_residuals.as_ref().is_some_and(Vec::is_empty)
    }
}

/// `k`-th compound of a covector change of basis: column `S` holds the
/// wedge of the columns indexed by `S`.
pub fn compound(m: &Matrix, k: usize) -> Matrix {
    let dim = m.rows();
    let columns: Vec<Form> = (0..m.cols())
        .map(|j| Form::from_vector(dim, 1, &m.column(j)))
        .collect();
    let cols: Vec<Vec<Scalar>> = basis(m.cols(), k)
        .into_iter()
        .map(|s| {
            s.indices()
                .iter()
                .fold(Form::constant(dim, Scalar::one()), |acc, &c| {
                    acc.wedge(&columns[c - 1]).expect("same dimension")
                })
                .to_vector()
        })
        .collect();
    Matrix::from_columns(crate::exterior::binomial(dim, k), &cols)
}

/// The complex frame and the per-degree change of basis to frame monomials.
#[derive(Clone, Debug)]
pub struct Bigrading {
    n: usize,
    frame: Matrix,
    from_frame: Vec<Matrix>,
    to_frame: Vec<Matrix>,
    labels: Vec<Vec<Bidegree>>,
}

impl Bigrading {
    pub fn new(j: &ComplexStructure) -> Result<Self, ComplexError> {
        if !j.squares_to_minus_identity() {
            return Err(ComplexError::NotComplex);
        }
        let dim = j.dim();
        let n = dim / 2;
        let shifted = j.matrix().transpose().sub(&Matrix::identity(dim).scale(&Scalar::i()));
        let kernel = shifted.kernel();
        if kernel.cols() != n {
            return Err(ComplexError::NotComplex);
        }
        let normalized: Vec<Vec<Scalar>> = kernel
            .columns()
            .into_iter()
            .map(|c| {
                let lead = c.iter().find(|x| !x.is_zero()).expect("kernel vector").inv().expect("nonzero");
                c.iter().map(|x| x * &lead).collect()
            })
            .collect();
        let holo = Matrix::from_columns(dim, &normalized);
        let frame = holo.hstack(&holo.conj());
        let inv = frame.inverse().ok_or(ComplexError::NotComplex)?;
        let mut from_frame = Vec::with_capacity(dim + 1);
        let mut to_frame = Vec::with_capacity(dim + 1);
        let mut labels = Vec::with_capacity(dim + 1);
        for k in 0..=dim {
            from_frame.push(compound(&frame, k));
            to_frame.push(compound(&inv, k));
            labels.push(
                basis(dim, k)
                    .into_iter()
                    .map(|s| {
                        let p = s.indices().iter().filter(|&&a| a <= n).count();
                        (p, k - p)
                    })
                    .collect(),
            );
        }
        Ok(Bigrading { n, frame, from_frame, to_frame, labels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Columns `θ¹…θⁿ, θ̄¹…θ̄ⁿ` in the standard coordinates.
    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    /// The (1,0)-covector `θ^a` (1-based) as a form.
    pub fn holomorphic_covector(&self, a: usize) -> Form {
        Form::from_vector(self.dim(), 1, &self.frame.column(a - 1))
    }

    pub fn from_frame(&self, k: usize) -> &Matrix {
        &self.from_frame[k]
    }

    pub fn to_frame(&self, k: usize) -> &Matrix {
        &self.to_frame[k]
    }

    pub fn labels(&self, k: usize) -> &[Bidegree] {
        &self.labels[k]
    }

    /// Positions of the (p,q) frame monomials among degree-(p+q) frame monomials.
    pub fn positions(&self, p: usize, q: usize) -> Vec<usize> {
        let k = p + q;
        if k > self.dim() {
            return Vec::new();
        }
        self.labels[k].iter().enumerate().filter(|(_, &l)| l == (p, q)).map(|(i, _)| i).collect()
    }

    /// Basis of `A^{p,q}` as columns in standard coordinates.
    pub fn bidegree_basis(&self, p: usize, q: usize) -> Matrix {
        let k = p + q;
        if p > self.n || q > self.n {
            return Matrix::zeros(crate::exterior::binomial(self.dim(), k.min(self.dim())), 0);
        }
        self.from_frame[k].select_cols(&self.positions(p, q))
    }

    /// The bidegree projector `Π^{p,q}` on `(p+q)`-forms.
    pub fn projector(&self, p: usize, q: usize) -> Matrix {
        let k = p + q;
        let pos = self.positions(p, q);
        self.from_frame[k].select_cols(&pos).mul(&self.to_frame[k].select_rows(&pos))
    }

    /// `from · diag(f(p,q)) · to` on `k`-forms.
    pub fn diagonal_operator(&self, k: usize, f: impl Fn(Bidegree) -> Scalar) -> Matrix {
        let mut scaled = self.from_frame[k].clone();
        for (c, &l) in self.labels[k].iter().enumerate() {
            let s = f(l);
            for r in 0..scaled.rows() {
                let v = &scaled[(r, c)] * &s;
                scaled[(r, c)] = v;
            }
        }
        scaled.mul(&self.to_frame[k])
    }

    pub fn frame_coordinates(&self, form: &Form) -> Vec<Scalar> {
        self.to_frame[form.degree()].mul_vec(&form.to_vector())
    }

    pub fn from_frame_coordinates(&self, k: usize, v: &[Scalar]) -> Form {
        Form::from_vector(self.dim(), k, &self.from_frame[k].mul_vec(v))
    }

    /// Frame-coordinate matrix of a homogeneous operator on `k`-forms.
    pub fn to_frame_operator(&self, op: &GradedOperator, k: usize) -> Matrix {
        let m = op.matrix(k);
        let t = k as i32 + op.shift().unwrap_or(0);
        if m.rows() == 0 || t < 0 {
            return m;
        }
        self.to_frame[t as usize].mul(&m).mul(&self.from_frame[k])
    }

    pub fn bidegree_decompose(&self, a: &Form) -> BigradedForm {
        let k = a.degree();
        let coords = self.frame_coordinates(a);
        let mut components: BTreeMap<Bidegree, Vec<Scalar>> = BTreeMap::new();
        for p in 0..=k.min(self.n) {
            if k - p <= self.n {
                components.insert((p, k - p), vec![Scalar::zero(); coords.len()]);
            }
        }
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                components.get_mut(&self.labels[k][i]).expect("label")[i] = c.clone();
            }
        }
        BigradedForm {
            degree: k,
            components: components
                .into_iter()
                .map(|(l, v)| (l, self.from_frame_coordinates(k, &v)))
                .collect(),
        }
    }
}

/// A form split into its (p,q)-components, `p + q = degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedForm {
    degree: usize,
    components: BTreeMap<Bidegree, Form>,
}

impl BigradedForm {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The (p,q)-component; zero when `p + q` is not the degree or out of range.
    pub fn component(&self, p: usize, q: usize) -> Option<&Form> {
        self.components.get(&(p, q))
    }

    pub fn components(&self) -> impl Iterator<Item = (Bidegree, &Form)> {
        self.components.iter().map(|(k, v)| (*k, v))
    }

    pub fn reconstruct(&self, dim: usize) -> Form {
        self.components
            .values()
            .fold(Form::zero(dim, self.degree), |acc, f| acc.add(f).expect("same space"))
    }

    /// Bidegrees with nonzero components.
    pub fn support(&self) -> Vec<Bidegree> {
        self.components.iter().filter(|(_, f)| !f.is_zero()).map(|(k, _)| *k).collect()
    }
}

/// Checks `J² = −id` and the vanishing of the (0,2)-part of `dθ` for every
/// (1,0)-frame covector.
pub fn validate_complex_structure(
    model: &LieAlgebraModel,
    j: &ComplexStructure,
) -> Result<ComplexValidation, ComplexError> {
    let dim = model.dim();
    if j.dim() != dim {
        return Err(ComplexError::Shape { rows: j.matrix().rows(), cols: j.matrix().cols(), expected: dim });
    }
    if !j.squares_to_minus_identity() {
        return Ok(ComplexValidation { squares_to_minus_identity: false, integrability_residuals: None });
    }
    let bigrading = Bigrading::new(j)?;
    let d = model.ce_differential();
    Ok(ComplexValidation {
        squares_to_minus_identity: true,
        integrability_residuals: Some(integrability_residuals(&bigrading, &d)?),
    })
}

fn integrability_residuals(b: &Bigrading, d: &GradedOperator) -> Result<Vec<(usize, Form)>, ComplexError> {
    let proj = b.projector(0, 2);
    let mut out = Vec::new();
    for a in 1..=b.n() {
        let dtheta = d.apply(&b.holomorphic_covector(a))?;
        let residual = Form::from_vector(b.dim(), 2, &proj.mul_vec(&dtheta.to_vector()));
        if !residual.is_zero() {
            out.push((a, residual));
        }
    }
    Ok(out)
}

/// A model with a validated integrable complex structure and its bigraded
/// differentials, all in standard coordinates.
#[derive(Clone, Debug)]
pub struct ComplexModel {
    model: LieAlgebraModel,
    j: ComplexStructure,
    bigrading: Bigrading,
    d: GradedOperator,
    dc: GradedOperator,
    del: GradedOperator,
    delbar: GradedOperator,
}

impl ComplexModel {
    pub fn new(model: LieAlgebraModel, j: ComplexStructure) -> Result<Self, ComplexError> {
        let dim = model.dim();
        if j.dim() != dim {
            return Err(ComplexError::Shape { rows: j.matrix().rows(), cols: j.matrix().cols(), expected: dim });
        }
        if !model.is_real() {
            return Err(ComplexError::NonRealModel);
        }
        let bigrading = Bigrading::new(&j)?;
        let d = model.ce_differential();
        let residuals = integrability_residuals(&bigrading, &d)?;
        if !residuals.is_empty() {
            return Err(ComplexError::NotIntegrable { residuals });
        }
        let (del, delbar) = split_differential(&bigrading, &d)?;
        let dc = twisted_differential(&bigrading, &d);
        Ok(ComplexModel { model, j, bigrading, d, dc, del, delbar })
    }

    pub fn model(&self) -> &LieAlgebraModel {
        &self.model
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn bigrading(&self) -> &Bigrading {
        &self.bigrading
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn n(&self) -> usize {
        self.bigrading.n()
    }

    pub fn d(&self) -> &GradedOperator {
        &self.d
    }

    pub fn d_c(&self) -> &GradedOperator {
        &self.dc
    }

    pub fn del(&self) -> &GradedOperator {
        &self.del
    }

    pub fn delbar(&self) -> &GradedOperator {
        &self.delbar
    }

    pub fn del_delbar(&self) -> (&GradedOperator, &GradedOperator) {
        (&self.del, &self.delbar)
    }

    pub fn bidegree_decompose(&self, a: &Form) -> BigradedForm {
        self.bigrading.bidegree_decompose(a)
    }

    pub fn i_action(&self, a: &Form) -> Form {
        i_action(&self.bigrading, a)
    }

    /// `I` as an operator: multiplication by `i^{p−q}` on (p,q)-forms.
    pub fn i_operator(&self) -> GradedOperator {
        i_operator(&self.bigrading, 1)
    }

    /// `I⁻¹`, i.e. `i^{q−p}` on (p,q)-forms.
    pub fn i_inverse(&self) -> GradedOperator {
        i_operator(&self.bigrading, -1)
    }

    /// `Π^{p,q} a` as a form.
    pub fn project(&self, a: &Form, p: usize, q: usize) -> Form {
        if p + q != a.degree() || p > self.n() || q > self.n() {
            return Form::zero(a.dim(), a.degree());
        }
        Form::from_vector(a.dim(), a.degree(), &self.bigrading.projector(p, q).mul_vec(&a.to_vector()))
    }

    pub fn is_of_type(&self, a: &Form, p: usize, q: usize) -> bool {
        p + q == a.degree() && self.project(a, p, q) == *a
    }
}

fn i_operator(b: &Bigrading, sign: i64) -> GradedOperator {
    GradedOperator::from_fn(b.dim(), 0, |k| {
        b.diagonal_operator(k, |(p, q)| Scalar::i_pow(sign * (p as i64 - q as i64)))
    })
}

/// Multiplies each (p,q)-component by `i^{p−q}`.
pub fn i_action(b: &Bigrading, a: &Form) -> Form {
    let k = a.degree();
    let m = b.diagonal_operator(k, |(p, q)| Scalar::i_pow(p as i64 - q as i64));
    Form::from_vector(a.dim(), k, &m.mul_vec(&a.to_vector()))
}

/// `d^c = I d I⁻¹`.
fn twisted_differential(b: &Bigrading, d: &GradedOperator) -> GradedOperator {
    let i = i_operator(b, 1);
    let i_inv = i_operator(b, -1);
    i.compose(d).and_then(|x| x.compose(&i_inv)).expect("same dimension")
}

/// Splits `d` into its (1,0) and (0,1) parts, rejecting any other component.
fn split_differential(
    b: &Bigrading,
    d: &GradedOperator,
) -> Result<(GradedOperator, GradedOperator), ComplexError> {
    let dim = b.dim();
    let mut del_blocks = Vec::with_capacity(dim);
    let mut delbar_blocks = Vec::with_capacity(dim);
    for k in 0..dim {
        let frame_d = b.to_frame_operator(d, k);
        let src = b.labels(k);
        let dst = b.labels(k + 1);
        let mut del = Matrix::zeros(frame_d.rows(), frame_d.cols());
        let mut delbar = Matrix::zeros(frame_d.rows(), frame_d.cols());
        for (c, &(p0, q0)) in src.iter().enumerate() {
            for (r, &(p, q)) in dst.iter().enumerate() {
                let x = &frame_d[(r, c)];
                if x.is_zero() {
                    continue;
                }
                if (p, q) == (p0 + 1, q0) {
                    del[(r, c)] = x.clone();
                } else if (p, q) == (p0, q0 + 1) {
                    delbar[(r, c)] = x.clone();
                } else {
                    return Err(ComplexError::ForbiddenComponent { p0, q0, p, q });
                }
            }
        }
        del_blocks.push(b.from_frame(k + 1).mul(&del).mul(b.to_frame(k)));
        delbar_blocks.push(b.from_frame(k + 1).mul(&delbar).mul(b.to_frame(k)));
    }
    Ok((
        GradedOperator::from_fn(dim, 1, |k| del_blocks[k].clone()),
        GradedOperator::from_fn(dim, 1, |k| delbar_blocks[k].clone()),
    ))
}

/// `d^c` of a model with a complex structure.
pub fn d_c(cm: &ComplexModel) -> &GradedOperator {
    cm.d_c()
}

/// `(∂, ∂̄)` of a model with a complex structure.
pub fn del_delbar(cm: &ComplexModel) -> (&GradedOperator, &GradedOperator) {
    cm.del_delbar()
}

/// Multi-index helper: frame monomial labels are indexed like standard ones.
pub fn frame_monomial(n: usize, holo: &[usize], antiholo: &[usize]) -> Option<MultiIndex> {
    let mut idx: Vec<usize> = holo.to_vec();
    idx.extend(antiholo.iter().map(|a| a + n));
    MultiIndex::from_sorted(&idx)
}
