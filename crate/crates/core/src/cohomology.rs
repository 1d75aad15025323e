//! Cohomology of the invariant complex as exact rank computations, and the
//! dd^c-type inclusion checks with witnesses.

use crate::complex::ComplexModel;
use crate::exterior::{binomial, integrate, Form, GradedOperator};
use crate::hermitian::HermitianSymplecticData;
use crate::linalg::{coordinate_subspace, span_basis, subspace_contains, subspace_contains_all, subspace_intersection, subspace_sum, Matrix};
use crate::scalar::Scalar;

/// Matrix of `op` on `k`-forms, with zero rows when the target is out of range.
fn block(op: &GradedOperator, k: usize) -> Matrix {
    op.matrix(k)
}

/// `{x ∈ span(domain) : A x = 0}` in ambient coordinates.
fn kernel_within(a: &Matrix, domain: &Matrix) -> Matrix {
    if domain.cols() == 0 {
        return domain.clone();
    }
    span_basis(&domain.mul(&a.mul(domain).kernel()))
}

/// `A · span(domain)`.
fn image_of(a: &Matrix, domain: &Matrix) -> Matrix {
    span_basis(&a.mul(domain))
}

fn rank_of(a: &Matrix, domain: &Matrix) -> usize {
    if domain.cols() == 0 || a.rows() == 0 {
        return 0;
    }
    a.mul(domain).rank()
}

fn forms_of(dim: usize, k: usize, m: &Matrix) -> Vec<Form> {
    m.columns().iter().map(|c| Form::from_vector(dim, k, c)).collect()
}

/// Betti, Dolbeault, Bott–Chern and Aeppli numbers plus the Frölicher pages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    pub betti: Vec<usize>,
    /// `hodge[p][q]`
    pub hodge: Vec<Vec<usize>>,
    pub bott_chern: Vec<Vec<usize>>,
    pub aeppli: Vec<Vec<usize>>,
    /// `frolicher_pages[r - 1][p][q]` is `dim E_r^{p,q}`.
    pub frolicher_pages: Vec<Vec<Vec<usize>>>,
}

impl CohomologyReport {
    /// `Σ_{p+q=k} E_r^{p,q}` for each `k`.
    pub fn page_sums(&self, r: usize) -> Vec<usize> {
        let page = &self.frolicher_pages[r - 1];
        let n = page.len() - 1;
        (0..=2 * n)
            .map(|k| (0..=n).filter(|&p| k >= p && k - p <= n).map(|p| page[p][k - p]).sum())
            .collect()
    }
}

pub fn betti_numbers(cm: &ComplexModel) -> Vec<usize> {
    let dim = cm.dim();
    let d = cm.d();
    (0..=dim)
        .map(|k| {
            let full = Matrix::identity(binomial(dim, k));
            let kernel = binomial(dim, k) - rank_of(&block(d, k), &full);
            let image = if k == 0 { 0 } else { block(d, k - 1).rank() };
            kernel - image
        })
        .collect()
}

fn bidegree_table(n: usize, mut f: impl FnMut(usize, usize) -> usize) -> Vec<Vec<usize>> {
    (0..=n).map(|p| (0..=n).map(|q| f(p, q)).collect()).collect()
}

fn a_pq(cm: &ComplexModel, p: isize, q: isize) -> Option<Matrix> {
    let n = cm.n() as isize;
    if p < 0 || q < 0 || p > n || q > n {
        return None;
    }
    Some(cm.bigrading().bidegree_basis(p as usize, q as usize))
}

/// `h^{p,q} = dim ker(∂̄ on A^{p,q}) − rank(∂̄ : A^{p,q−1} → A^{p,q})`.
pub fn dolbeault_numbers(cm: &ComplexModel) -> Vec<Vec<usize>> {
    let delbar = cm.delbar();
    bidegree_table(cm.n(), |p, q| {
        let here = a_pq(cm, p as isize, q as isize).expect("in range");
        let k = p + q;
        let kernel = here.cols() - rank_of(&block(delbar, k), &here);
        let image = a_pq(cm, p as isize, q as isize - 1).map_or(0, |b| rank_of(&block(delbar, k - 1), &b));
        kernel - image
    })
}

/// `(ker ∂ ∩ ker ∂̄) / im ∂∂̄` in bidegree (p,q).
pub fn bott_chern_numbers(cm: &ComplexModel) -> Vec<Vec<usize>> {
    let (del, delbar) = cm.del_delbar();
    let d = cm.d();
    bidegree_table(cm.n(), |p, q| {
        let here = a_pq(cm, p as isize, q as isize).expect("in range");
        let k = p + q;
        let kernel = here.cols() - rank_of(&block(d, k), &here);
        let image = a_pq(cm, p as isize - 1, q as isize - 1).map_or(0, |b| {
            rank_of(&block(del, k - 1).mul(&block(delbar, k - 2)), &b)
        });
        kernel - image
    })
}

/// `ker ∂∂̄ / (im ∂ + im ∂̄)` in bidegree (p,q).
pub fn aeppli_numbers(cm: &ComplexModel) -> Vec<Vec<usize>> {
    let (del, delbar) = cm.del_delbar();
    let dim = cm.dim();
    bidegree_table(cm.n(), |p, q| {
        let here = a_pq(cm, p as isize, q as isize).expect("in range");
        let k = p + q;
        let ddbar = if k + 2 <= dim {
            block(del, k + 1).mul(&block(delbar, k))
        } else {
            Matrix::zeros(0, here.rows())
        };
        let kernel = here.cols() - rank_of(&ddbar, &here);
        let mut image = Matrix::zeros(here.rows(), 0);
        if let Some(b) = a_pq(cm, p as isize - 1, q as isize) {
            image = image.hstack(&block(del, k - 1).mul(&b));
        }
        if let Some(b) = a_pq(cm, p as isize, q as isize - 1) {
            image = image.hstack(&block(delbar, k - 1).mul(&b));
        }
        kernel - image.rank()
    })
}

/// Frame-coordinate filtration `F^p` of `k`-forms as a column basis.
fn filtration(cm: &ComplexModel, k: usize, p: isize) -> Matrix {
    let labels = cm.bigrading().labels(k);
    let idx: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, &(pp, _))| pp as isize >= p)
        .map(|(i, _)| i)
        .collect();
    coordinate_subspace(labels.len(), &idx)
}

/// `Z_r^p = {x ∈ F^p A^k : dx ∈ F^{p+r} A^{k+1}}`, with `Z_r^p = F^p` for `r ≤ 0`.
fn z_space(cm: &ComplexModel, frame_d: &[Matrix], k: usize, p: isize, r: isize) -> Matrix {
    let fp = filtration(cm, k, p);
    if r <= 0 || k == cm.dim() {
        return fp;
    }
    let labels = cm.bigrading().labels(k + 1);
    let outside: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, &(pp, _))| (pp as isize) < p + r)
        .map(|(i, _)| i)
        .collect();
    kernel_within(&frame_d[k].select_rows(&outside), &fp)
}

/// Dimensions of the Frölicher pages `E_r`, `r = 1..=n+2`, from the
/// filtered complex: `E_r^p = Z_r^p / (Z_{r−1}^{p+1} + d Z_{r−1}^{p−r+1})`.
pub fn frolicher_pages(cm: &ComplexModel) -> Vec<Vec<Vec<usize>>> {
    let n = cm.n();
    let dim = cm.dim();
    let b = cm.bigrading();
    let frame_d: Vec<Matrix> = (0..=dim).map(|k| b.to_frame_operator(cm.d(), k)).collect();
    (1..=n as isize + 2)
        .map(|r| {
            bidegree_table(n, |p, q| {
                let k = p + q;
                let (pi, ki) = (p as isize, k as isize);
                let num = z_space(cm, &frame_d, k, pi, r);
                let mut den = z_space(cm, &frame_d, k, pi + 1, r - 1);
                if ki >= 1 {
                    let src = z_space(cm, &frame_d, k - 1, pi - r + 1, r - 1);
                    den = subspace_sum(&den, &image_of(&frame_d[k - 1], &src));
                }
                num.rank() - den.rank()
            })
        })
        .collect()
}

pub fn cohomology_report(cm: &ComplexModel) -> CohomologyReport {
    CohomologyReport {
        betti: betti_numbers(cm),
        hodge: dolbeault_numbers(cm),
        bott_chern: bott_chern_numbers(cm),
        aeppli: aeppli_numbers(cm),
        frolicher_pages: frolicher_pages(cm),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrolicherReport {
    pub betti: Vec<usize>,
    /// `Σ_{p+q=k} E_1^{p,q}`
    pub e1_sums: Vec<usize>,
    pub degenerates_at_e1: bool,
    /// Least `r` with `Σ_{p+q=k} E_r^{p,q} = b_k` for all `k`.
    pub degeneration_page: usize,
}

pub fn frolicher_check(cm: &ComplexModel) -> FrolicherReport {
    frolicher_from_report(&cohomology_report(cm))
}

pub fn frolicher_from_report(report: &CohomologyReport) -> FrolicherReport {
    let e1_sums = report.page_sums(1);
    let degeneration_page = (1..=report.frolicher_pages.len())
        .find(|&r| report.page_sums(r) == report.betti)
        .unwrap_or(report.frolicher_pages.len() + 1);
    FrolicherReport {
        betti: report.betti.clone(),
        degenerates_at_e1: e1_sums == report.betti,
        e1_sums,
        degeneration_page,
    }
}

/// Outcome of `S ⊆ T` with `S = ker d ∩ im d^c ∩ A^{p,q}` and `T = im dd^c ∩ A^{p,q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdcVerdict {
    pub p: usize,
    pub q: usize,
    pub holds: bool,
    pub s_dim: usize,
    pub t_dim: usize,
    /// First canonical basis element of `S` outside `T`.
    pub witness: Option<Form>,
    /// Some `x` with `d^c x = witness`.
    pub witness_preimage: Option<Form>,
    /// Same test with `d` and `d^c` exchanged: `ker d^c ∩ im d ∩ A^{p,q} ⊆ T`.
    pub swapped_holds: bool,
    pub swapped_witness: Option<Form>,
}

fn first_outside(space: &Matrix, target: &Matrix) -> Option<Vec<Scalar>> {
    space.columns().into_iter().find(|c| !subspace_contains(target, c))
}

/// Checks whether every d-closed, d^c-exact (p,q)-form is dd^c-exact.
pub fn ddc_lemma_check(cm: &ComplexModel, p: usize, q: usize) -> DdcVerdict {
    let dim = cm.dim();
    let k = p + q;
    let here = a_pq(cm, p as isize, q as isize).unwrap_or_else(|| Matrix::zeros(binomial(dim, k.min(dim)), 0));
    let rows = here.rows();
    let empty = Matrix::zeros(rows, 0);
    let (d, dc) = (cm.d(), cm.d_c());
    let closed = kernel_within(&block(d, k), &here);
    let dc_closed = kernel_within(&block(dc, k), &here);
    let im_dc = if k >= 1 { image_of(&block(dc, k - 1), &Matrix::identity(binomial(dim, k - 1))) } else { empty.clone() };
    let im_d = if k >= 1 { image_of(&block(d, k - 1), &Matrix::identity(binomial(dim, k - 1))) } else { empty.clone() };
    let im_ddc = if k >= 2 {
        image_of(&block(d, k - 1).mul(&block(dc, k - 2)), &Matrix::identity(binomial(dim, k - 2)))
    } else {
        empty.clone()
    };
    let s = subspace_intersection(&closed, &im_dc);
    let t = subspace_intersection(&here, &im_ddc);
    let s_swapped = subspace_intersection(&dc_closed, &im_d);
    let witness = first_outside(&s, &t);
    let witness_preimage = witness.as_ref().map(|w| {
        let x = block(dc, k - 1).solve(w).expect("witness lies in im d^c");
        Form::from_vector(dim, k - 1, &x)
    });
    let swapped_witness = first_outside(&s_swapped, &t);
    DdcVerdict {
        p,
        q,
        holds: witness.is_none(),
        s_dim: s.cols(),
        t_dim: t.cols(),
        witness: witness.map(|w| Form::from_vector(dim, k, &w)),
        witness_preimage,
        swapped_holds: swapped_witness.is_none(),
        swapped_witness: swapped_witness.map(|w| Form::from_vector(dim, k, &w)),
    }
}

/// Basis of `S = ker d ∩ im d^c ∩ A^{p,q}` as forms.
pub fn closed_dc_exact_space(cm: &ComplexModel, p: usize, q: usize) -> Vec<Form> {
    let dim = cm.dim();
    let k = p + q;
    let Some(here) = a_pq(cm, p as isize, q as isize) else { return Vec::new() };
    if k == 0 {
        return Vec::new();
    }
    let closed = kernel_within(&block(cm.d(), k), &here);
    let im_dc = image_of(&block(cm.d_c(), k - 1), &Matrix::identity(binomial(dim, k - 1)));
    forms_of(dim, k, &subspace_intersection(&closed, &im_dc))
}

/// In degree 1: `im d ∩ ker d^c = 0` and `im d^c ∩ ker d = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ddc1FormVerdict {
    pub holds: bool,
    pub exact_dc_closed: Vec<Form>,
    pub dc_exact_closed: Vec<Form>,
}

pub fn ddc_1form_check(cm: &ComplexModel) -> Ddc1FormVerdict {
    let dim = cm.dim();
    let all0 = Matrix::identity(1);
    let all1 = Matrix::identity(dim);
    let im_d = image_of(&block(cm.d(), 0), &all0);
    let im_dc = image_of(&block(cm.d_c(), 0), &all0);
    let ker_d = kernel_within(&block(cm.d(), 1), &all1);
    let ker_dc = kernel_within(&block(cm.d_c(), 1), &all1);
    let a = forms_of(dim, 1, &subspace_intersection(&im_d, &ker_dc));
    let b = forms_of(dim, 1, &subspace_intersection(&im_dc, &ker_d));
    Ddc1FormVerdict { holds: a.is_empty() && b.is_empty(), exact_dc_closed: a, dc_exact_closed: b }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GauduchonReport {
    pub b1: usize,
    pub h10: usize,
    pub h01: usize,
    pub b1_eq_2h01: bool,
    pub b1_eq_2h10: bool,
    pub ddc11: bool,
    /// `b¹ = 2h^{0,1}` and the (1,1) dd^c verdict agree.
    pub consistent: bool,
}

pub fn gauduchon_equality(cm: &ComplexModel) -> GauduchonReport {
    let betti = betti_numbers(cm);
    let hodge = dolbeault_numbers(cm);
    let (b1, h10, h01) = (betti[1], hodge[1][0], hodge[0][1]);
    let ddc11 = ddc_lemma_check(cm, 1, 1).holds;
    let b1_eq_2h01 = b1 == 2 * h01;
    GauduchonReport {
        b1,
        h10,
        h01,
        b1_eq_2h01,
        b1_eq_2h10: b1 == 2 * h10,
        ddc11,
        consistent: b1_eq_2h01 == ddc11,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolomorphicClosedness {
    pub p: usize,
    pub holds: bool,
    /// Dimension of `ker ∂̄ ∩ A^{p,0}`.
    pub holomorphic_dim: usize,
    /// First canonical basis element of `ker ∂̄ ∩ A^{p,0}` that is not closed.
    pub witness: Option<Form>,
    /// For HS data and `p = n − 2`: `∫ ∂a ∧ conj(∂a) ∧ ω¹¹` over the
    /// holomorphic basis; each value must vanish.
    pub norm_values: Option<Vec<Scalar>>,
}

impl HolomorphicClosedness {
    pub fn norm_argument_holds(&self) -> Option<bool> {
        self.norm_values.as_ref().map(|v| v.iter().all(Scalar::is_zero))
    }
}

/// Whether every ∂̄-closed (p,0)-form is d-closed.
pub fn holomorphic_closedness(
    cm: &ComplexModel,
    p: usize,
    data: Option<&HermitianSymplecticData>,
) -> HolomorphicClosedness {
    let dim = cm.dim();
    let here = a_pq(cm, p as isize, 0).unwrap_or_else(|| Matrix::zeros(binomial(dim, p.min(dim)), 0));
    let holo = kernel_within(&block(cm.delbar(), p), &here);
    let closed = kernel_within(&block(cm.d(), p), &holo);
    let witness = if subspace_contains_all(&closed, &holo) {
        None
    } else {
        first_outside(&holo, &closed).map(|w| Form::from_vector(dim, p, &w))
    };
    let norm_values = data.filter(|d| d.n() >= 2 && p == d.n() - 2).map(|d| {
        forms_of(dim, p, &holo)
            .iter()
            .map(|a| {
                let da = cm.del().apply(a).expect("same model");
                let top = da.wedge(&da.conj()).and_then(|x| x.wedge(d.omega11())).expect("same model");
                integrate(&top, d.vol()).expect("top degree")
            })
            .collect()
    });
    HolomorphicClosedness { p, holds: witness.is_none(), holomorphic_dim: holo.cols(), witness, norm_values }
}
