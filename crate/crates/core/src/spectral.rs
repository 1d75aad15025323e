//! Fitting decomposition of Δ per degree, exactness of closed forms in the
//! nonzero part, and the stepwise dd^c-argument for (1,1)-forms.

use thiserror::Error;

use crate::cohomology::{closed_dc_exact_space, ddc_lemma_check};
use crate::exterior::{binomial, integrate, Form, GradedOperator};
use crate::hermitian::{HermitianError, HermitianSymplecticData};
use crate::linalg::{span_basis, subspace_contains, subspace_contains_all, subspace_intersection, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
    #[error("form is not closed: d of it is {witness:?}")]
    NotClosed { witness: Form },
    #[error("form does not lie in the nonzero part of Δ")]
    NotInNonzeroPart,
    #[error("a 0-form has no primitive")]
    DegreeZero,
    #[error("this argument needs complex dimension 3, got {n}")]
    NotThreefold { n: usize },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Fitting splitting of one degree: `ker Δ^m ⊕ im Δ^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreePart {
    pub degree: usize,
    pub stabilization_index: u32,
    pub zero_part: Matrix,
    pub nonzero_part: Matrix,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub parts: Vec<DegreePart>,
}

/// Exact checks of the decomposition's claims.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralChecks {
    pub spans_whole: bool,
    pub trivial_intersection: bool,
    pub rank_stable: bool,
    pub restricted_invertible: bool,
    pub d_equivariant: bool,
    pub dc_equivariant: bool,
}

impl SpectralChecks {
    pub fn all(&self) -> bool {
        self.spans_whole
            && self.trivial_intersection
            && self.rank_stable
            && self.restricted_invertible
            && self.d_equivariant
            && self.dc_equivariant
    }
}

pub fn fitting_decompose(data: &HermitianSymplecticData) -> SpectralDecomposition {
    let lap = data.laplacian();
    let parts = (0..=data.dim())
        .map(|k| {
            let delta = lap.matrix(k);
            let mut m = 1;
            let mut power = delta.clone();
            loop {
                let next = power.mul(&delta);
                if next.rank() == power.rank() {
                    break;
                }
                power = next;
                m += 1;
            }
            DegreePart { degree: k, stabilization_index: m, zero_part: power.kernel(), nonzero_part: span_basis(&power) }
        })
        .collect();
    SpectralDecomposition { parts }
}

impl SpectralDecomposition {
    pub fn part(&self, k: usize) -> &DegreePart {
        &self.parts[k]
    }

    /// Matrix of Δ restricted to the nonzero part of degree `k`, in its basis.
    pub fn restricted(&self, lap: &GradedOperator, k: usize) -> Matrix {
        let b = &self.parts[k].nonzero_part;
        b.solve_matrix(&lap.matrix(k).mul(b)).expect("nonzero part is Δ-invariant")
    }

    pub fn verify(&self, data: &HermitianSymplecticData) -> SpectralChecks {
        let lap = data.laplacian();
        let cm = data.complex_model();
        let dim = data.dim();
        let mut checks = SpectralChecks {
            spans_whole: true,
            trivial_intersection: true,
            rank_stable: true,
            restricted_invertible: true,
            d_equivariant: true,
            dc_equivariant: true,
        };
        for part in &self.parts {
            let k = part.degree;
            let (z, nz) = (&part.zero_part, &part.nonzero_part);
            checks.spans_whole &= z.hstack(nz).rank() == binomial(dim, k);
            checks.trivial_intersection &= z.cols() + nz.cols() == binomial(dim, k)
                && subspace_intersection(z, nz).cols() == 0;
            let delta = lap.matrix(k);
            let pm = delta.pow(part.stabilization_index);
            let r = pm.rank();
            checks.rank_stable &= pm.mul(&delta).rank() == r && pm.mul(&delta).mul(&delta).rank() == r;
            if nz.cols() > 0 {
                checks.restricted_invertible &= !self.restricted(lap, k).determinant().is_zero();
            }
            if k < dim {
                let next = &self.parts[k + 1];
                for (op, flag) in [(cm.d(), &mut checks.d_equivariant), (cm.d_c(), &mut checks.dc_equivariant)] {
                    let m = op.matrix(k);
                    *flag &= subspace_contains_all(&next.zero_part, &m.mul(z))
                        && subspace_contains_all(&next.nonzero_part, &m.mul(nz));
                }
            }
        }
        checks
    }
}

/// `β = {d^c, Λ¹¹} Δ⁻¹ a` with `dβ = a`, and a directly solved `β'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessCertificate {
    pub beta: Form,
    pub beta_direct: Form,
}

/// `Δ⁻¹ a` for `a` in the nonzero part, by an exact solve.
pub fn delta_inverse(
    data: &HermitianSymplecticData,
    decomposition: &SpectralDecomposition,
    a: &Form,
) -> Result<Form, SpectralError> {
    let k = a.degree();
    let b = &decomposition.part(k).nonzero_part;
    if !subspace_contains(b, &a.to_vector()) {
        return Err(SpectralError::NotInNonzeroPart);
    }
    let system = data.laplacian().matrix(k).mul(b);
    let y = system.solve(&a.to_vector()).ok_or(SpectralError::NotInNonzeroPart)?;
    Ok(Form::from_vector(data.dim(), k, &b.mul_vec(&y)))
}

/// Shows that a closed form in the nonzero part is exact.
pub fn nonzero_closed_is_exact(
    data: &HermitianSymplecticData,
    decomposition: &SpectralDecomposition,
    a: &Form,
) -> Result<ExactnessCertificate, SpectralError> {
    let cm = data.complex_model();
    let da = cm.d().apply(a).map_err(HermitianError::from)?;
    if !da.is_zero() {
        return Err(SpectralError::NotClosed { witness: da });
    }
    let k = a.degree();
    if k == 0 {
        return Err(SpectralError::DegreeZero);
    }
    let gamma = delta_inverse(data, decomposition, a)?;
    let lambda11 = &data.lefschetz().lambda11;
    let dc = cm.d_c();
    let apply = |op: &GradedOperator, f: &Form| op.apply(f).map_err(HermitianError::from);
    let beta = apply(dc, &apply(lambda11, &gamma)?)?.sub(&apply(lambda11, &apply(dc, &gamma)?)?).map_err(HermitianError::from)?;
    if apply(cm.d(), &beta)? != *a {
        return Err(SpectralError::Internal("d{d^c, Λ¹¹}Δ⁻¹a ≠ a".into()));
    }
    let x = cm
        .d()
        .matrix(k - 1)
        .solve(&a.to_vector())
        .ok_or_else(|| SpectralError::Internal("closed form in the nonzero part is not exact".into()))?;
    Ok(ExactnessCertificate { beta, beta_direct: Form::from_vector(data.dim(), k - 1, &x) })
}

/// Step results for one basis element `a` of `ker d ∩ im d^c ∩ A^{1,1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ddc11Element {
    pub form: Form,
    pub zero_part: Form,
    pub nonzero_part: Form,
    /// Both parts are d-closed and d^c-exact.
    pub split_ok: bool,
    /// `f = Λ¹¹ Δ⁻¹ a_{≠0}` with `dd^c f = a_{≠0}`.
    pub potential: Form,
    pub potential_ok: bool,
    /// Least `N` with `Δ^N a_0 = 0`.
    pub nilpotency_index: u32,
    pub descent_ok: bool,
    pub zero_part_primitive: bool,
    pub zero_part_self_pairing_zero: bool,
    pub zero_part_vanishes: bool,
}

impl Ddc11Element {
    pub fn passes(&self) -> bool {
        self.split_ok
            && self.potential_ok
            && self.descent_ok
            && self.zero_part_primitive
            && self.zero_part_self_pairing_zero
            && self.zero_part_vanishes
    }

    /// First failing step and its witness form.
    pub fn failure(&self) -> Option<(&'static str, Form)> {
        if !self.split_ok {
            Some(("split", self.form.clone()))
        } else if !self.potential_ok {
            Some(("potential", self.nonzero_part.clone()))
        } else if !self.descent_ok {
            Some(("descent", self.zero_part.clone()))
        } else if !self.zero_part_primitive {
            Some(("primitivity", self.zero_part.clone()))
        } else if !self.zero_part_self_pairing_zero || !self.zero_part_vanishes {
            Some(("vanishing", self.zero_part.clone()))
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ddc11Report {
    pub s_dim: usize,
    pub elements: Vec<Ddc11Element>,
    /// Number of basis elements of `ker d ∩ im d^c ∩ (nonzero part)`, over all
    /// degrees, on which `dd^c Λ¹¹ Δ⁻¹` was checked to be the identity.
    pub nonzero_identity_checked: usize,
    pub nonzero_identity_holds: bool,
    pub passes: bool,
    pub rank_check: bool,
}

impl Ddc11Report {
    pub fn agrees_with_rank_check(&self) -> bool {
        self.passes == self.rank_check
    }

    pub fn failure(&self) -> Option<(&'static str, Form)> {
        if !self.nonzero_identity_holds {
            return Some(("nonzero-identity", Form::zero(0, 0)));
        }
        self.elements.iter().find_map(Ddc11Element::failure)
    }
}

/// Replays the (1,1) dd^c argument on the invariant complex of a threefold.
pub fn ddc11_pipeline(data: &HermitianSymplecticData) -> Result<Ddc11Report, SpectralError> {
    if data.n() != 3 {
        return Err(SpectralError::NotThreefold { n: data.n() });
    }
    let cm = data.complex_model();
    let dim = data.dim();
    let dec = fitting_decompose(data);
    let lap = data.laplacian();
    let lef = data.lefschetz();
    let (d, dc) = (cm.d(), cm.d_c());
    let apply = |op: &GradedOperator, f: &Form| op.apply(f).map_err(HermitianError::from);
    let dc_exact = |f: &Form| subspace_contains(&span_basis(&dc.matrix(1)), &f.to_vector());
    let closed = |f: &Form| apply(d, f).map(|x| x.is_zero());
    let potential_of = |a1: &Form| -> Result<(Form, bool), SpectralError> {
        let gamma = delta_inverse(data, &dec, a1)?;
        let f = apply(&lef.lambda11, &gamma)?;
        let ok = apply(d, &apply(dc, &f)?)? == *a1;
        Ok((f, ok))
    };

    let part = dec.part(2);
    let split_basis = part.zero_part.hstack(&part.nonzero_part);
    let mut elements = Vec::new();
    for a in closed_dc_exact_space(cm, 1, 1) {
        let x = split_basis.solve(&a.to_vector()).ok_or_else(|| SpectralError::Internal("Fitting parts do not span".into()))?;
        let (xz, xn) = x.split_at(part.zero_part.cols());
        let a0 = Form::from_vector(dim, 2, &part.zero_part.mul_vec(xz));
        let a1 = Form::from_vector(dim, 2, &part.nonzero_part.mul_vec(xn));
        let split_ok = closed(&a0)? && closed(&a1)? && dc_exact(&a0) && dc_exact(&a1);
        let (potential, potential_ok) = if a1.is_zero() { (Form::zero(dim, 0), true) } else { potential_of(&a1)? };
        let mut nilpotency_index = 0;
        let mut power = a0.clone();
        while !power.is_zero() {
            power = apply(lap, &power)?;
            nilpotency_index += 1;
        }
        let descent_ok = nilpotency_index <= 1;
        let zero_part_primitive = apply(&lef.lambda11, &a0)?.is_zero() && apply(&lef.lambda, &a0)?.is_zero();
        let top = a0.wedge(&a0).and_then(|x| x.wedge(data.omega11())).map_err(HermitianError::from)?;
        let zero_part_self_pairing_zero = integrate(&top, data.vol()).map_err(HermitianError::from)?.is_zero();
        elements.push(Ddc11Element {
            zero_part_vanishes: a0.is_zero(),
            form: a,
            zero_part: a0,
            nonzero_part: a1,
            split_ok,
            potential,
            potential_ok,
            nilpotency_index,
            descent_ok,
            zero_part_primitive,
            zero_part_self_pairing_zero,
        });
    }

    let mut nonzero_identity_checked = 0;
    let mut nonzero_identity_holds = true;
    for k in 2..=dim {
        let im_dc = span_basis(&dc.matrix(k - 1));
        let closed_k = d.matrix(k).kernel();
        let general = subspace_intersection(&subspace_intersection(&closed_k, &im_dc), &dec.part(k).nonzero_part);
        for c in general.columns() {
            nonzero_identity_holds &= potential_of(&Form::from_vector(dim, k, &c))?.1;
            nonzero_identity_checked += 1;
        }
    }

    let passes = nonzero_identity_holds && elements.iter().all(Ddc11Element::passes);
    Ok(Ddc11Report {
        s_dim: elements.len(),
        elements,
        nonzero_identity_checked,
        nonzero_identity_holds,
        passes,
        rank_check: ddc_lemma_check(cm, 1, 1).holds,
    })
}
