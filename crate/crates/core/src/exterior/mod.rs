//! Exterior algebra over the complexified dual of a Lie algebra, with the
//! Chevalley–Eilenberg differential and graded operators.

mod form;
mod model;
mod operator;

use thiserror::Error;

pub use form::{basis, basis_position, binomial, contraction, integrate, wedge, Form, MultiIndex, MAX_DIM};
pub use model::{ce_differential, LieAlgebraModel};
pub use operator::{graded_commutator, graded_jacobi_defect, GradedOperator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("model mismatch: dimension {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("degree {degree} out of range")]
    DegreeOutOfRange { degree: i32 },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("model dimension must be a positive even number at most {max}, got {dim}", max = MAX_DIM)]
    BadDimension { dim: usize },
    #[error("structure constant ({i},{j},·) must have i < j")]
    UnorderedBracket { i: usize, j: usize },
    #[error("duplicate structure constant ({i},{j},{k})")]
    DuplicateConstant { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails for (e{i}, e{j}, e{l}) in component e{component}")]
    JacobiViolation { i: usize, j: usize, l: usize, component: usize },
    #[error("volume form is zero")]
    ZeroVolume,
    #[error("operators of different parity cannot be added")]
    ParityMismatch,
    #[error("operator has several target degrees on this form")]
    NotHomogeneous,
}
