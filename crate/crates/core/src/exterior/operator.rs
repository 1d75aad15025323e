use std::collections::BTreeMap;

use crate::exterior::form::{basis, binomial, Form};
use crate::exterior::ExteriorError;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A linear map on the full form space `⊕_k Λ^k`, stored as exact blocks
/// `(source degree, target degree) → matrix` in the canonical bases.
///
/// Most operators are homogeneous (one constant shift); the Hodge star and
/// commutators involving it are not, so the block map is general. Each
/// operator carries a parity, used as its degree in graded commutators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedOperator {
    dim: usize,
    parity: u8,
    blocks: BTreeMap<(usize, usize), Matrix>,
}

impl GradedOperator {
    /// Homogeneous operator of degree `shift`, block per source degree.
    pub fn from_fn(dim: usize, shift: i32, mut block: impl FnMut(usize) -> Matrix) -> Self {
        let mut blocks = BTreeMap::new();
        for k in 0..=dim {
            let t = k as i32 + shift;
            if t < 0 || t > dim as i32 {
                continue;
            }
            let m = block(k);
            assert_eq!(
                (m.rows(), m.cols()),
                (binomial(dim, t as usize), binomial(dim, k)),
                "block shape for source degree {k}"
            );
            blocks.insert((k, t as usize), m);
        }
        GradedOperator { dim, parity: shift.rem_euclid(2) as u8, blocks }
    }

    /// Homogeneous operator defined by its action on basis monomials.
    pub fn from_monomial_action(
        dim: usize,
        shift: i32,
        mut action: impl FnMut(&Form) -> Form,
    ) -> Self {
        GradedOperator::from_fn(dim, shift, |k| {
            let t = (k as i32 + shift) as usize;
            let columns: Vec<Vec<Scalar>> = basis(dim, k)
                .into_iter()
                .map(|idx| {
                    let image = action(&Form::from_terms(dim, k, [(idx, Scalar::one())]).expect("basis"));
                    assert_eq!(image.degree(), t, "action changed degree inconsistently");
                    image.to_vector()
                })
                .collect();
            Matrix::from_columns(binomial(dim, t), &columns)
        })
    }

    /// General operator from explicit blocks; every block must shift degree
    /// by an amount of the given parity.
    pub fn from_blocks(dim: usize, parity: u8, blocks: BTreeMap<(usize, usize), Matrix>) -> Self {
        for (&(s, t), m) in &blocks {
            assert_eq!((m.rows(), m.cols()), (binomial(dim, t), binomial(dim, s)));
            assert_eq!((t + s) % 2, parity as usize % 2, "block ({s},{t}) breaks parity");
        }
        GradedOperator { dim, parity: parity % 2, blocks }
    }

    pub fn identity(dim: usize) -> Self {
        GradedOperator::from_fn(dim, 0, |k| Matrix::identity(binomial(dim, k)))
    }

    pub fn zero(dim: usize, shift: i32) -> Self {
        GradedOperator::from_fn(dim, shift, |k| {
            Matrix::zeros(binomial(dim, (k as i32 + shift) as usize), binomial(dim, k))
        })
    }

    /// Wedge on the left by a fixed homogeneous form.
    pub fn left_multiplication(form: &Form) -> Self {
        let f = form.clone();
        GradedOperator::from_monomial_action(form.dim(), form.degree() as i32, move |m| {
            f.wedge(m).expect("same dimension")
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    /// The common degree shift, if every block has the same one.
    pub fn shift(&self) -> Option<i32> {
        let mut shifts = self.blocks.keys().map(|&(s, t)| t as i32 - s as i32);
        let first = shifts.next()?;
        shifts.all(|x| x == first).then_some(first)
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &Matrix)> {
        self.blocks.iter().map(|(k, v)| (*k, v))
    }

    pub fn block(&self, source: usize, target: usize) -> Option<&Matrix> {
        self.blocks.get(&(source, target))
    }

    /// The matrix acting on `source`-forms, for operators with a single
    /// block per source degree; a zero block when the source has no block.
    pub fn block_from(&self, source: usize) -> Option<(usize, &Matrix)> {
        let mut it = self.blocks.range((source, 0)..=(source, self.dim));
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some((first.0 .1, first.1))
    }

    /// Matrix of the homogeneous block starting at `source`, zero-filled if absent.
    pub fn matrix(&self, source: usize) -> Matrix {
        match (self.block_from(source), self.shift()) {
            (Some((_, m)), _) => m.clone(),
            (None, Some(s)) => {
                let t = source as i32 + s;
                let rows = if t < 0 || t > self.dim as i32 { 0 } else { binomial(self.dim, t as usize) };
                Matrix::zeros(rows, binomial(self.dim, source))
            }
            (None, None) => Matrix::zeros(0, binomial(self.dim, source)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.blocks.values().all(Matrix::is_real)
    }

    fn combine(&self, other: &Self, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> Result<Self, ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.parity != other.parity {
            return Err(ExteriorError::ParityMismatch);
        }
        let mut blocks = BTreeMap::new();
        for key in self.blocks.keys().chain(other.blocks.keys()) {
            if blocks.contains_key(key) {
                continue;
            }
            let (s, t) = *key;
            let zero = Matrix::zeros(binomial(self.dim, t), binomial(self.dim, s));
            let a = self.blocks.get(key).unwrap_or(&zero);
            let b = other.blocks.get(key).unwrap_or(&zero);
            blocks.insert(*key, f(a, b));
        }
        Ok(GradedOperator { dim: self.dim, parity: self.parity, blocks })
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.combine(other, Matrix::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.combine(other, Matrix::sub)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        GradedOperator {
            dim: self.dim,
            parity: self.parity,
            blocks: self.blocks.iter().map(|(k, m)| (*k, m.scale(c))).collect(),
        }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self, ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut blocks: BTreeMap<(usize, usize), Matrix> = BTreeMap::new();
        for (&(s, t), b) in &other.blocks {
            for (&(_, u), a) in self.blocks.range((t, 0)..=(t, self.dim)) {
                let prod = a.mul(b);
                match blocks.get_mut(&(s, u)) {
                    Some(acc) => *acc = acc.add(&prod),
                    None => {
                        blocks.insert((s, u), prod);
                    }
                }
            }
        }
        Ok(GradedOperator { dim: self.dim, parity: (self.parity + other.parity) % 2, blocks })
    }

    /// Applies the operator to a homogeneous form with a single target block.
    pub fn apply(&self, form: &Form) -> Result<Form, ExteriorError> {
        if form.dim() != self.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: form.dim() });
        }
        match self.block_from(form.degree()) {
            Some((t, m)) => Ok(Form::from_vector(self.dim, t, &m.mul_vec(&form.to_vector()))),
            None if self.blocks.range((form.degree(), 0)..=(form.degree(), self.dim)).next().is_none() => {
                let t = self.shift().map_or(form.degree() as i32, |s| form.degree() as i32 + s);
                if t < 0 || t > self.dim as i32 {
                    return Err(ExteriorError::DegreeOutOfRange { degree: t });
                }
                Ok(Form::zero(self.dim, t as usize))
            }
            None => Err(ExteriorError::NotHomogeneous),
        }
    }

    /// Entrywise complex conjugate (the operator `ᾱ ↦ conj(A α)`).
    pub fn conj(&self) -> Self {
        GradedOperator {
            dim: self.dim,
            parity: self.parity,
            blocks: self.blocks.iter().map(|(k, m)| (*k, m.conj())).collect(),
        }
    }
}

/// Graded commutator `{A, B} = AB − (−1)^{|A||B|} BA`.
pub fn graded_commutator(a: &GradedOperator, b: &GradedOperator) -> Result<GradedOperator, ExteriorError> {
    let ab = a.compose(b)?;
    let ba = b.compose(a)?;
    if a.parity() * b.parity() == 1 {
        ab.add(&ba)
    } else {
        ab.sub(&ba)
    }
}

/// `{a,{b,c}} − {{a,b},c} − (−1)^{|a||b|} {b,{a,c}}`, zero by the graded Jacobi identity.
pub fn graded_jacobi_defect(
    a: &GradedOperator,
    b: &GradedOperator,
    c: &GradedOperator,
) -> Result<GradedOperator, ExteriorError> {
    let lhs = graded_commutator(a, &graded_commutator(b, c)?)?;
    let first = graded_commutator(&graded_commutator(a, b)?, c)?;
    let second = graded_commutator(b, &graded_commutator(a, c)?)?;
    let rest = if a.parity() * b.parity() == 1 { first.sub(&second)? } else { first.add(&second)? };
    lhs.sub(&rest)
}
