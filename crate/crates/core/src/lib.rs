//! Exact operator calculus of Hermitian symplectic geometry on invariant
//! forms of Lie-algebra models.
//!
//! The crate builds, over the Gaussian rationals, the differentials `d`,
//! `d^c`, `∂`, `∂̄`, the Lefschetz operators and their adjoints, the Hodge
//! star and the Laplacian `Δ = {d, {d^c, Λ¹¹}}` on the Chevalley–Eilenberg
//! complex of a Lie algebra with a complex structure, and uses them to check
//! cohomological statements (dd^c-lemmas, Frölicher degeneration, `b¹ = 2h^{0,1}`)
//! by exact rank computations. A floating-point search looks for Hermitian
//! symplectic forms and hands candidates back to the exact validator.
//!
//! All cohomology is computed on the invariant complex. For nilmanifolds this
//! is the de Rham cohomology of the manifold (Nomizu); for the complex
//! structures in the catalog the invariant Dolbeault groups are likewise the
//! expected ones, but no such comparison theorem is checked here.

pub mod catalog;
pub mod cohomology;
pub mod complex;
pub mod exterior;
pub mod hermitian;
pub mod linalg;
pub mod scalar;
pub mod search;
pub mod spectral;

pub use complex::{ComplexModel, ComplexStructure};
pub use exterior::{Form, GradedOperator, LieAlgebraModel, MultiIndex};
pub use hermitian::HermitianSymplecticData;
pub use linalg::Matrix;
pub use scalar::Scalar;
