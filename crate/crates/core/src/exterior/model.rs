use std::collections::BTreeMap;

use crate::exterior::form::{Form, MAX_DIM};
use crate::exterior::operator::GradedOperator;
use crate::exterior::ExteriorError;
use crate::scalar::Scalar;

/// A real Lie algebra given by structure constants `[e_i, e_j] = Σ_k c^k_{ij} e_k`
/// with `i < j` (1-based). Its Chevalley–Eilenberg complex is the complex of
/// invariant forms on any compact quotient of the corresponding group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieAlgebraModel {
    name: String,
    dim: usize,
    constants: BTreeMap<(usize, usize, usize), Scalar>,
}

impl LieAlgebraModel {
    /// Validates indices and the Jacobi identity eagerly.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
    ) -> Result<Self, ExteriorError> {
        if dim == 0 || dim % 2 != 0 || dim > MAX_DIM {
            return Err(ExteriorError::BadDimension { dim });
        }
        let mut constants = BTreeMap::new();
        for (i, j, k, c) in entries {
            for idx in [i, j, k] {
                if idx == 0 || idx > dim {
                    return Err(ExteriorError::IndexOutOfRange { index: idx, dim });
                }
            }
            if i >= j {
                return Err(ExteriorError::UnorderedBracket { i, j });
            }
            if constants.contains_key(&(i, j, k)) {
                return Err(ExteriorError::DuplicateConstant { i, j, k });
            }
            if !c.is_zero() {
                constants.insert((i, j, k), c);
            }
        }
        let model = LieAlgebraModel { name: name.into(), dim, constants };
        if let Some((i, j, l, k)) = model.jacobi_violation() {
            return Err(ExteriorError::JacobiViolation { i, j, l, component: k });
        }
        Ok(model)
    }

    /// The abelian algebra `ℝ^dim`.
    pub fn abelian(name: impl Into<String>, dim: usize) -> Result<Self, ExteriorError> {
        LieAlgebraModel::new(name, dim, [])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Complex dimension `n` of a complex structure on the model.
    pub fn complex_dim(&self) -> usize {
        self.dim / 2
    }

    pub fn structure_constants(&self) -> impl Iterator<Item = ((usize, usize, usize), &Scalar)> {
        self.constants.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_real(&self) -> bool {
        self.constants.values().all(Scalar::is_real)
    }

    /// Coordinates of `[e_i, e_j]` for any `i, j` (antisymmetry applied).
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim];
        if i == j {
            return out;
        }
        let (a, b, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
        for ((_, _, k), c) in self.constants.range((a, b, 1)..=(a, b, self.dim)) {
            out[k - 1] = if sign < 0 { -c } else { c.clone() };
        }
        out
    }

    fn bracket_vec(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let w = xi * yj;
                for (o, b) in out.iter_mut().zip(self.bracket(i + 1, j + 1)) {
                    if !b.is_zero() {
                        *o += &(&w * &b);
                    }
                }
            }
        }
        out
    }

    /// First triple `(i, j, l)` and component `k` where
    /// `[[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]` is nonzero.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let unit = |i: usize| {
            let mut v = vec![Scalar::zero(); self.dim];
            v[i - 1] = Scalar::one();
            v
        };
        for i in 1..=self.dim {
            for j in i + 1..=self.dim {
                for l in j + 1..=self.dim {
                    let t1 = self.bracket_vec(&self.bracket(i, j), &unit(l));
                    let t2 = self.bracket_vec(&self.bracket(j, l), &unit(i));
                    let t3 = self.bracket_vec(&self.bracket(l, i), &unit(j));
                    for k in 0..self.dim {
                        if !(&(&t1[k] + &t2[k]) + &t3[k]).is_zero() {
                            return Some((i, j, l, k + 1));
                        }
                    }
                }
            }
        }
        None
    }

    /// `d e^k = −Σ_{i<j} c^k_{ij} e^i ∧ e^j`.
    pub fn differential_of_covector(&self, k: usize) -> Form {
        let mut f = Form::zero(self.dim, 2);
        for (&(i, j, kk), c) in &self.constants {
            if kk == k {
                f = f.add(&Form::monomial(self.dim, &[i, j], -c).expect("in range")).expect("same space");
            }
        }
        f
    }

    /// The Chevalley–Eilenberg differential as a degree +1 operator.
    pub fn ce_differential(&self) -> GradedOperator {
        ce_differential(self)
    }
}

/// Chevalley–Eilenberg differential, extended from covectors as a graded derivation.
pub fn ce_differential(model: &LieAlgebraModel) -> GradedOperator {
    let dim = model.dim();
    let de: Vec<Form> = (1..=dim).map(|k| model.differential_of_covector(k)).collect();
    GradedOperator::from_monomial_action(dim, 1, |mono| {
        let (idx, c) = mono.terms().next().expect("unit monomial");
        let indices = idx.indices();
        let mut out = Form::zero(dim, mono.degree() + 1);
        // d(e^{a1} ∧ … ∧ e^{ak}) = Σ_t (−1)^{t} e^{a1..a(t-1)} ∧ de^{at} ∧ e^{a(t+1)..ak}
        for (t, &a) in indices.iter().enumerate() {
            let before = Form::e(dim, &indices[..t]);
            let after = Form::e(dim, &indices[t + 1..]);
            let term = before
                .wedge(&de[a - 1])
                .and_then(|x| x.wedge(&after))
                .expect("same dimension");
            let term = if t % 2 == 1 { term.neg() } else { term };
            out = out.add(&term).expect("same space");
        }
        out.scale(c)
    })
}
