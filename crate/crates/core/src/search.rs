//! Floating-point search for Hermitian symplectic forms with exact
//! certification of any candidate it finds.
//!
//! A `found` status is a proof (the rational candidate passed `validate_hs`);
//! `not_found` is only evidence.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{ComplexError, ComplexModel, ComplexStructure};
use crate::exterior::{Form, LieAlgebraModel};
use crate::hermitian::{metric_matrix, HermitianError, HermitianSymplecticData};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Canonical basis of the closed real 2-forms.
pub fn closed_two_form_space(model: &LieAlgebraModel) -> Vec<Form> {
    let dim = model.dim();
    model
        .ce_differential()
        .matrix(2)
        .kernel()
        .columns()
        .iter()
        .map(|c| Form::from_vector(dim, 2, c))
        .collect()
}

/// The closed 2-forms of a model together with the linear map
/// `x ↦ H(x) = ω_x¹¹(·, J·)`.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    cm: ComplexModel,
    closed_basis: Vec<Form>,
    positivity_map: Vec<Matrix>,
    float_map: Vec<DMatrix<f64>>,
}

impl FeasibilityProblem {
    pub fn new(model: &LieAlgebraModel, j: &ComplexStructure) -> Result<Self, ComplexError> {
        let cm = ComplexModel::new(model.clone(), j.clone())?;
        let closed_basis = closed_two_form_space(model);
        let dim = model.dim();
        let positivity_map: Vec<Matrix> = closed_basis
            .iter()
            .map(|w| metric_matrix(&cm.project(w, 1, 1), j))
            .collect();
        let float_map = positivity_map
            .iter()
            .map(|h| DMatrix::from_fn(dim, dim, |r, c| h[(r, c)].re_f64()))
            .collect();
        Ok(FeasibilityProblem { cm, closed_basis, positivity_map, float_map })
    }

    pub fn complex_model(&self) -> &ComplexModel {
        &self.cm
    }

    pub fn closed_basis(&self) -> &[Form] {
        &self.closed_basis
    }

    /// Exact `H_i` for each closed basis form.
    pub fn positivity_map(&self) -> &[Matrix] {
        &self.positivity_map
    }

    pub fn form_of(&self, x: &[Scalar]) -> Form {
        let dim = self.cm.dim();
        self.closed_basis
            .iter()
            .zip(x)
            .fold(Form::zero(dim, 2), |acc, (b, c)| acc.add(&b.scale(c)).expect("same space"))
    }

    pub fn metric_of(&self, x: &[Scalar]) -> Matrix {
        let dim = self.cm.dim();
        self.positivity_map
            .iter()
            .zip(x)
            .fold(Matrix::zeros(dim, dim), |acc, (h, c)| acc.add(&h.scale(c)))
    }

    /// Runs `validate_hs` on `ω_x`.
    pub fn certify(&self, x: &[Scalar]) -> Result<HermitianSymplecticData, HermitianError> {
        HermitianSymplecticData::new(self.cm.clone(), self.form_of(x))
    }

    /// A standard basis vector `e_a` (1-based) with `H_i(e_a, e_a) = 0` for
    /// every `i`; its existence forces `λ_min(H(x)) ≤ 0` for all `x`.
    pub fn common_isotropic_direction(&self) -> Option<usize> {
        (0..self.cm.dim())
            .find(|&a| self.positivity_map.iter().all(|h| h[(a, a)].is_zero()))
            .map(|a| a + 1)
    }

    fn float_metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let dim = self.cm.dim();
        self.float_map.iter().zip(x.iter()).fold(DMatrix::zeros(dim, dim), |acc, (h, c)| acc + h * *c)
    }

    /// `(λ_min, eigenvector)` of `H(x)`.
    fn min_eigen(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let eig = SymmetricEigen::new(self.float_metric(x));
        let (i, &lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        (lambda, eig.eigenvectors.column(i).into_owned())
    }
}

/// Runs `validate_hs` on `Σ x_i b_i` with `b` the canonical closed 2-form basis.
pub fn certify_candidate(
    model: &LieAlgebraModel,
    j: &ComplexStructure,
    x: &[Scalar],
) -> Result<HermitianSymplecticData, HermitianError> {
    FeasibilityProblem::new(model, j)?.certify(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub restarts: usize,
    pub max_iters: usize,
    pub step: f64,
    pub tol: f64,
    pub seed: u64,
    /// Largest denominator tried when rounding; bounds double from 2.
    pub max_denominator: i64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { restarts: 64, max_iters: 300, step: 0.5, tol: 1e-6, seed: 0, max_denominator: 1 << 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Found,
    NotFound,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Found => "found",
            SearchStatus::NotFound => "not_found",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchReport {
    pub status: SearchStatus,
    pub candidate: Option<Vec<Scalar>>,
    pub certified: bool,
    pub best_min_eigenvalue: f64,
    pub restarts_used: usize,
    pub seed: u64,
    /// Reserved for an infeasibility certificate; never filled in.
    pub dual_certificate: Option<String>,
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued-fraction convergents.
pub fn rational_approximation(x: f64, max_den: i64) -> BigRational {
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if !a.is_finite() || a.abs() > 1e18 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return BigRational::from_integer(BigInt::from(x.round() as i64));
    }
    BigRational::new(BigInt::from(h1), BigInt::from(k1))
}

fn round_vector(x: &DVector<f64>, max_den: i64) -> Vec<Scalar> {
    let scale = x.amax().max(f64::MIN_POSITIVE);
    x.iter().map(|v| Scalar::real(rational_approximation(v / scale, max_den))).collect()
}

/// Maximizes `λ_min(H(x))` over the unit sphere by projected subgradient
/// ascent with restarts; certifies any candidate above `tol` exactly.
pub fn feasibility_search(problem: &FeasibilityProblem, params: &SearchParams) -> SearchReport {
    let m = problem.closed_basis.len();
    let mut report = SearchReport {
        status: SearchStatus::NotFound,
        candidate: None,
        certified: false,
        best_min_eigenvalue: f64::NEG_INFINITY,
        restarts_used: 0,
        seed: params.seed,
        dual_certificate: None,
    };
    if m == 0 {
        return report;
    }
    for restart in 0..params.restarts {
        report.restarts_used = restart + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(restart as u64);
        let mut x = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        if x.norm() == 0.0 {
            x[0] = 1.0;
        }
        x /= x.norm();
        let (mut best_lambda, _) = problem.min_eigen(&x);
        let mut best_x = x.clone();
        for t in 0..params.max_iters {
            let (_, v) = problem.min_eigen(&x);
            let g = DVector::from_fn(m, |i, _| (v.transpose() * &problem.float_map[i] * &v)[(0, 0)]);
            x += g * (params.step / ((t + 1) as f64).sqrt());
            let norm = x.norm();
            if norm == 0.0 {
                break;
            }
            x /= norm;
            let (lambda, _) = problem.min_eigen(&x);
            if lambda > best_lambda {
                best_lambda = lambda;
                best_x = x.clone();
            }
        }
        if best_lambda > report.best_min_eigenvalue {
            report.best_min_eigenvalue = best_lambda;
        }
        if best_lambda <= params.tol {
            continue;
        }
        let mut den = 2;
        while den <= params.max_denominator {
            let candidate = round_vector(&best_x, den);
            if problem.certify(&candidate).is_ok() {
                report.status = SearchStatus::Found;
                report.candidate = Some(candidate);
                report.certified = true;
                return report;
            }
            den *= 2;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continued_fraction_rounding() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(rational_approximation(0.5, 10), q(1, 2));
        assert_eq!(rational_approximation(std::f64::consts::PI, 10), q(22, 7));
        assert_eq!(rational_approximation(std::f64::consts::PI, 200), q(355, 113));
        assert_eq!(rational_approximation(-0.75, 8), q(-3, 4));
        assert_eq!(rational_approximation(3.0, 1), q(3, 1));
    }

    #[test]
    fn torus_closed_space_is_everything() {
        let m = LieAlgebraModel::abelian("t6", 6).unwrap();
        assert_eq!(closed_two_form_space(&m).len(), 15);
    }
}
