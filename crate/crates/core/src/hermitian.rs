//! Hermitian symplectic data and the operators it induces: the metric, Gram
//! matrices, Lefschetz operators and adjoints, the Hodge star and the
//! Laplacian `Δ = {d, {d^c, Λ¹¹}}`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::complex::{compound, ComplexError, ComplexModel, ComplexStructure};
use crate::exterior::{basis, binomial, graded_commutator, integrate, ExteriorError, Form, GradedOperator, LieAlgebraModel};
use crate::linalg::{span_basis, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HermitianError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("ω must be a 2-form, got degree {degree}")]
    NotTwoForm { degree: usize },
    #[error("ω must be real")]
    NotReal,
    #[error("ω is not closed: dω = {witness:?}")]
    NotClosed { witness: Form },
    #[error("metric is not positive definite: leading minor of size {size} is {minor}")]
    NotPositive { size: usize, minor: Scalar },
    #[error("form is not of type ({p},{q})")]
    NotOfType { p: usize, q: usize },
    #[error("form is not primitive: Λ applied to it gives {witness:?}")]
    NotPrimitive { witness: Form },
    #[error("degree {degree} exceeds the complex dimension {n}")]
    DegreeAboveMiddle { degree: usize, n: usize },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Which 2-form the Lefschetz pair is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `L = ω ∧ ·`
    Omega,
    /// `L = ω¹¹ ∧ ·`
    Omega11,
}

/// `L`, `Λ`, `L¹¹`, `Λ¹¹`; the adjoints are taken with respect to the Gram
/// inner product of the metric.
#[derive(Clone, Debug)]
pub struct Lefschetz {
    pub l: GradedOperator,
    pub lambda: GradedOperator,
    pub l11: GradedOperator,
    pub lambda11: GradedOperator,
}

impl Lefschetz {
    pub fn pair(&self, flavor: Flavor) -> (&GradedOperator, &GradedOperator) {
        match flavor {
            Flavor::Omega => (&self.l, &self.lambda),
            Flavor::Omega11 => (&self.l11, &self.lambda11),
        }
    }
}

/// A validated triple (model, J, ω) with the derived metric data.
#[derive(Clone, Debug)]
pub struct HermitianSymplecticData {
    cm: ComplexModel,
    omega: Form,
    omega11: Form,
    alpha: Form,
    h: Matrix,
    gram: Vec<Matrix>,
    vol: Form,
    lefschetz: OnceLock<Lefschetz>,
    star: OnceLock<GradedOperator>,
    laplacian: OnceLock<GradedOperator>,
}

/// Matrix `W[a][b] = ω(e_a, e_b)` of a 2-form.
pub fn two_form_matrix(w: &Form) -> Matrix {
    let dim = w.dim();
    let mut m = Matrix::zeros(dim, dim);
    for (idx, c) in w.terms() {
        let ix = idx.indices();
        let (a, b) = (ix[0] - 1, ix[1] - 1);
        m[(a, b)] = c.clone();
        m[(b, a)] = -c;
    }
    m
}

/// `H = W J`, i.e. `h(X, Y) = ω¹¹(X, JY)`.
pub fn metric_matrix(omega11: &Form, j: &ComplexStructure) -> Matrix {
    two_form_matrix(omega11).mul(j.matrix())
}

/// First leading principal minor that is not a positive real, as `(size, minor)`.
pub fn first_nonpositive_minor(h: &Matrix) -> Option<(usize, Scalar)> {
    h.leading_minors()
        .into_iter()
        .enumerate()
        .find(|(_, m)| !m.is_positive_real())
        .map(|(i, m)| (i + 1, m))
}

fn factorial(n: usize) -> Scalar {
    (1..=n as i64).fold(Scalar::one(), |acc, k| &acc * &Scalar::from_int(k))
}

/// Validates closedness and positivity of ω with respect to J and builds
/// the metric data.
pub fn validate_hs(
    model: &LieAlgebraModel,
    j: &ComplexStructure,
    omega: &Form,
) -> Result<HermitianSymplecticData, HermitianError> {
    let cm = ComplexModel::new(model.clone(), j.clone())?;
    HermitianSymplecticData::new(cm, omega.clone())
}

impl HermitianSymplecticData {
    pub fn new(cm: ComplexModel, omega: Form) -> Result<Self, HermitianError> {
        if omega.dim() != cm.dim() {
            return Err(ExteriorError::DimensionMismatch { left: cm.dim(), right: omega.dim() }.into());
        }
        if omega.degree() != 2 {
            return Err(HermitianError::NotTwoForm { degree: omega.degree() });
        }
        if !omega.is_real() {
            return Err(HermitianError::NotReal);
        }
        let d_omega = cm.d().apply(&omega)?;
        if !d_omega.is_zero() {
            return Err(HermitianError::NotClosed { witness: d_omega });
        }
        let omega11 = cm.project(&omega, 1, 1);
        let alpha = omega.sub(&omega11)?;
        let h = metric_matrix(&omega11, cm.complex_structure());
        if !h.is_symmetric() || !h.is_real() {
            return Err(HermitianError::Internal("ω¹¹(·, J·) is not real symmetric".into()));
        }
        if let Some((size, minor)) = first_nonpositive_minor(&h) {
            return Err(HermitianError::NotPositive { size, minor });
        }
        let n = cm.n();
        let vol = omega11.wedge_power(n).scale(&factorial(n).inv().expect("nonzero"));
        if vol.is_zero() || omega.wedge_power(n).is_zero() {
            return Err(HermitianError::Internal("degenerate volume".into()));
        }
        let h_inv = h.inverse().ok_or_else(|| HermitianError::Internal("singular metric".into()))?;
        let gram = (0..=cm.dim()).map(|k| compound(&h_inv, k)).collect();
        Ok(HermitianSymplecticData {
            cm,
            omega,
            omega11,
            alpha,
            h,
            gram,
            vol,
            lefschetz: OnceLock::new(),
            star: OnceLock::new(),
            laplacian: OnceLock::new(),
        })
    }

    pub fn complex_model(&self) -> &ComplexModel {
        &self.cm
    }

    pub fn model(&self) -> &LieAlgebraModel {
        self.cm.model()
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        self.cm.complex_structure()
    }

    pub fn dim(&self) -> usize {
        self.cm.dim()
    }

    pub fn n(&self) -> usize {
        self.cm.n()
    }

    pub fn omega(&self) -> &Form {
        &self.omega
    }

    pub fn omega11(&self) -> &Form {
        &self.omega11
    }

    /// The (2,0)+(0,2) part of ω.
    pub fn alpha(&self) -> &Form {
        &self.alpha
    }

    /// The metric matrix `h(e_a, e_b)`.
    pub fn h(&self) -> &Matrix {
        &self.h
    }

    /// Gram matrix on `k`-forms: `⟨e^I, e^K⟩ = det(h⁻¹)[I, K]`.
    pub fn gram(&self, k: usize) -> &Matrix {
        &self.gram[k]
    }

    pub fn vol(&self) -> &Form {
        &self.vol
    }

    /// `⟨a, b⟩`, complex-linear in `a` and conjugate-linear in `b`.
    pub fn inner(&self, a: &Form, b: &Form) -> Result<Scalar, HermitianError> {
        if a.degree() != b.degree() {
            return Err(ExteriorError::DegreeMismatch { expected: a.degree(), found: b.degree() }.into());
        }
        let gb = self.gram[b.degree()].mul_vec(&b.conj().to_vector());
        Ok(a.to_vector().iter().zip(&gb).map(|(x, y)| x * y).sum())
    }

    pub fn lefschetz(&self) -> &Lefschetz {
        self.lefschetz.get_or_init(|| {
            let l = GradedOperator::left_multiplication(&self.omega);
            let l11 = GradedOperator::left_multiplication(&self.omega11);
            let lambda = self.adjoint_of_wedge(&l);
            let lambda11 = self.adjoint_of_wedge(&l11);
            Lefschetz { l, lambda, l11, lambda11 }
        })
    }

    /// `Λ_k = G_k⁻¹ L_kᴴ G_{k+2}` for the degree +2 operator `L`.
    fn adjoint_of_wedge(&self, l: &GradedOperator) -> GradedOperator {
        GradedOperator::from_fn(self.dim(), -2, |k| {
            let src = k - 2;
            let g_inv = self.gram[src].inverse().expect("Gram matrix is invertible");
            g_inv.mul(&l.matrix(src).transpose().conj()).mul(&self.gram[k]).conj()
        })
    }

    /// Complex-linear star with `a ∧ *conj(b) = ⟨a, b⟩ vol`.
    pub fn hodge_star(&self) -> &GradedOperator {
        self.star.get_or_init(|| {
            let dim = self.dim();
            let mut blocks = BTreeMap::new();
            for k in 0..=dim {
                let dual = basis(dim, dim - k);
                let mut pairing = Matrix::zeros(binomial(dim, k), binomial(dim, dim - k));
                for (r, i) in basis(dim, k).into_iter().enumerate() {
                    for (c, kk) in dual.iter().enumerate() {
                        if let Some((idx, neg)) = i.wedge(*kk) {
                            let top = Form::from_terms(dim, dim, [(idx, Scalar::one())]).expect("top form");
                            let v = integrate(&top, &self.vol).expect("nonzero volume");
                            pairing[(r, c)] = if neg { -&v } else { v };
                        }
                    }
                }
                let s = pairing.inverse().expect("wedge pairing is perfect").mul(&self.gram[k]);
                blocks.insert((k, dim - k), s);
            }
            GradedOperator::from_blocks(dim, 0, blocks)
        })
    }

    pub fn star(&self, a: &Form) -> Form {
        self.hodge_star().apply(a).expect("star has one block per degree")
    }

    /// `Δ = {d, {d^c, Λ¹¹}}`.
    pub fn laplacian(&self) -> &GradedOperator {
        self.laplacian.get_or_init(|| {
            let inner = graded_commutator(self.cm.d_c(), &self.lefschetz().lambda11).expect("same model");
            graded_commutator(self.cm.d(), &inner).expect("same model")
        })
    }

    /// `{d^c, {d, Λ¹¹}}`.
    pub fn laplacian_swapped(&self) -> GradedOperator {
        let inner = graded_commutator(self.cm.d(), &self.lefschetz().lambda11).expect("same model");
        graded_commutator(self.cm.d_c(), &inner).expect("same model")
    }

    pub fn lambda(&self, flavor: Flavor) -> &GradedOperator {
        self.lefschetz().pair(flavor).1
    }

    pub fn is_primitive(&self, a: &Form, flavor: Flavor) -> bool {
        self.lambda(flavor).apply(a).map(|x| x.is_zero()).unwrap_or(true)
    }
}

/// `∂∂̄ω¹¹`; zero for every valid datum.
pub fn skt_check(data: &HermitianSymplecticData) -> Result<Form, HermitianError> {
    let (del, delbar) = data.cm.del_delbar();
    let residual = del.apply(&delbar.apply(&data.omega11)?)?;
    if !residual.is_zero() {
        return Err(HermitianError::Internal(format!("∂∂̄ω¹¹ = {residual:?}")));
    }
    Ok(residual)
}

pub fn lefschetz_ops(data: &HermitianSymplecticData) -> &Lefschetz {
    data.lefschetz()
}

pub fn hodge_star(data: &HermitianSymplecticData) -> &GradedOperator {
    data.hodge_star()
}

pub fn hs_laplacian(data: &HermitianSymplecticData) -> &GradedOperator {
    data.laplacian()
}

/// Coefficient `(−1)^{r(r+1)/2} i^{p−q} / (n−r)!` of the Weil identity.
pub fn weil_coefficient(n: usize, p: usize, q: usize) -> Scalar {
    let r = p + q;
    let sign = if (r * (r + 1) / 2) % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
    &(&sign * &Scalar::i_pow(p as i64 - q as i64)) * &factorial(n - r).inv().expect("nonzero")
}

/// `*B − (−1)^{r(r+1)/2} i^{p−q} (ω¹¹)^{n−r} ∧ B / (n−r)!` for a
/// Λ¹¹-primitive (p,q)-form `B`.
pub fn weil_identity_check(
    data: &HermitianSymplecticData,
    b: &Form,
    p: usize,
    q: usize,
) -> Result<Form, HermitianError> {
    let n = data.n();
    if !data.cm.is_of_type(b, p, q) {
        return Err(HermitianError::NotOfType { p, q });
    }
    let r = p + q;
    if r > n {
        return Err(HermitianError::DegreeAboveMiddle { degree: r, n });
    }
    if r >= 2 {
        let lb = data.lefschetz().lambda11.apply(b)?;
        if !lb.is_zero() {
            return Err(HermitianError::NotPrimitive { witness: lb });
        }
    }
    let rhs = data.omega11.wedge_power(n - r).wedge(b)?.scale(&weil_coefficient(n, p, q));
    Ok(data.star(b).sub(&rhs)?)
}

/// Basis (columns, standard coordinates) of the Λ-primitive (p,q)-forms.
pub fn primitive_basis(data: &HermitianSymplecticData, p: usize, q: usize, flavor: Flavor) -> Matrix {
    let b = data.cm.bigrading().bidegree_basis(p, q);
    let k = p + q;
    if k < 2 || b.cols() == 0 {
        return b;
    }
    let lam = data.lambda(flavor).matrix(k);
    span_basis(&b.mul(&lam.mul(&b).kernel()))
}

/// Lefschetz decomposition `a = Σ_s L^s B_s` with `Λ B_s = 0`; returns the
/// nonzero terms `(s, B_s)` in increasing `s`.
pub fn primitive_decompose(
    data: &HermitianSymplecticData,
    a: &Form,
    flavor: Flavor,
) -> Result<Vec<(usize, Form)>, HermitianError> {
    let k = a.degree();
    let n = data.n();
    if k > n {
        return Err(HermitianError::DegreeAboveMiddle { degree: k, n });
    }
    let (l, lambda) = data.lefschetz().pair(flavor);
    let mut out = Vec::new();
    let mut rest = a.clone();
    let mut s = 0;
    loop {
        let deg = rest.degree();
        let prim = if deg >= 2 { lambda.matrix(deg).kernel() } else { Matrix::identity(binomial(data.dim(), deg)) };
        if deg < 2 {
            if !rest.is_zero() {
                out.push((s, rest));
            }
            break;
        }
        let lower = l.matrix(deg - 2);
        let system = prim.hstack(&lower);
        let x = system
            .solve(&rest.to_vector())
            .ok_or_else(|| HermitianError::Internal("Lefschetz decomposition has no solution".into()))?;
        let (xp, xl) = x.split_at(prim.cols());
        let b = Form::from_vector(data.dim(), deg, &prim.mul_vec(xp));
        if !b.is_zero() {
            out.push((s, b));
        }
        rest = Form::from_vector(data.dim(), deg - 2, xl);
        s += 1;
        if rest.is_zero() {
            break;
        }
    }
    Ok(out)
}

/// `Σ_i i_{e_{2i}} ∘ i_{e_{2i−1}}`, the contraction with the standard
/// symplectic bivector; equals the Gram adjoint of `ω ∧` when
/// `ω = Σ e^{2i−1,2i}` and `h` is the identity.
pub fn darboux_lambda(dim: usize) -> GradedOperator {
    GradedOperator::from_monomial_action(dim, -2, |m| {
        (1..=dim / 2).fold(Form::zero(dim, m.degree() - 2), |acc, i| {
            let t = m.contract(2 * i - 1).and_then(|x| x.contract(2 * i)).expect("in range");
            acc.add(&t).expect("same space")
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus_data() -> HermitianSymplecticData {
        let m = LieAlgebraModel::abelian("t6", 6).unwrap();
        let w = Form::e(6, &[1, 2]).add(&Form::e(6, &[3, 4])).unwrap().add(&Form::e(6, &[5, 6])).unwrap();
        validate_hs(&m, &ComplexStructure::standard(6), &w).unwrap()
    }

    #[test]
    fn torus_metric_is_identity() {
        let d = torus_data();
        assert_eq!(d.h(), &Matrix::identity(6));
        assert_eq!(d.vol(), &Form::e(6, &[1, 2, 3, 4, 5, 6]));
        assert!(d.alpha().is_zero());
    }

    #[test]
    fn negative_form_rejected() {
        let m = LieAlgebraModel::abelian("t6", 6).unwrap();
        let w = Form::e(6, &[1, 2]).add(&Form::e(6, &[3, 4])).unwrap().add(&Form::e(6, &[5, 6])).unwrap().neg();
        match validate_hs(&m, &ComplexStructure::standard(6), &w) {
            Err(HermitianError::NotPositive { size, minor }) => {
                assert_eq!(size, 1);
                assert_eq!(minor, Scalar::from_int(-1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lambda_of_omega_is_n() {
        let d = torus_data();
        let lw = d.lefschetz().lambda.apply(d.omega()).unwrap();
        assert_eq!(lw, Form::constant(6, Scalar::from_int(3)));
        assert_eq!(darboux_lambda(6).apply(d.omega()).unwrap(), lw);
        assert_eq!(darboux_lambda(6), d.lefschetz().lambda);
    }

    #[test]
    fn star_of_one_and_vol() {
        let d = torus_data();
        assert_eq!(d.star(&Form::constant(6, Scalar::one())), *d.vol());
        assert_eq!(d.star(d.vol()), Form::constant(6, Scalar::one()));
    }

    #[test]
    fn weil_on_torus_11() {
        let d = torus_data();
        let b = Form::e(6, &[1, 2]).sub(&Form::e(6, &[3, 4])).unwrap();
        assert!(weil_identity_check(&d, &b, 1, 1).unwrap().is_zero());
        assert_eq!(d.star(&b), d.omega11().wedge(&b).unwrap().neg());
    }

    #[test]
    fn decompose_omega() {
        let d = torus_data();
        let parts = primitive_decompose(&d, d.omega(), Flavor::Omega).unwrap();
        assert_eq!(parts, vec![(1, Form::constant(6, Scalar::one()))]);
    }
}
