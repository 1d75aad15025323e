use hsgeom::catalog::catalog_entry;
use hsgeom::cohomology::cohomology_report;
use hsgeom::complex::{ComplexModel, ComplexStructure};
use hsgeom::exterior::{
    binomial, graded_commutator, graded_jacobi_defect, integrate, Form, GradedOperator, LieAlgebraModel, MultiIndex,
};
use hsgeom::hermitian::{primitive_basis, primitive_decompose, skt_check, weil_identity_check, Flavor, HermitianSymplecticData};
use hsgeom::linalg::Matrix;
use hsgeom::scalar::Scalar;
use hsgeom::search::rational_approximation;
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn gaussian() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| Scalar::complex((a, 1), (b, 1)))
}

fn form(dim: usize, degree: usize) -> impl Strategy<Value = Form> {
    prop::collection::vec(gaussian(), binomial(dim, degree)).prop_map(move |v| Form::from_vector(dim, degree, &v))
}

fn real_form(dim: usize, degree: usize) -> impl Strategy<Value = Form> {
    prop::collection::vec(-3i64..=3, binomial(dim, degree))
        .prop_map(move |v| Form::from_vector(dim, degree, &v.into_iter().map(Scalar::from_int).collect::<Vec<_>>()))
}

fn any_form(dim: usize) -> impl Strategy<Value = Form> {
    (0..=dim).prop_flat_map(move |k| form(dim, k))
}

fn sign(k: usize) -> Scalar {
    if k % 2 == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

fn catalog_hs(name: &str) -> HermitianSymplecticData {
    let m = catalog_entry(name).unwrap().load().unwrap();
    hsgeom::hermitian::validate_hs(&m.model, &m.complex_structure, m.form("omega").unwrap()).unwrap()
}

fn two_form_from_matrix(w: &Matrix) -> Form {
    let dim = w.rows();
    let terms = (1..=dim)
        .flat_map(|a| (a + 1..=dim).map(move |b| (a, b)))
        .map(|(a, b)| (MultiIndex::from_sorted(&[a, b]).unwrap(), w[(a - 1, b - 1)].clone()));
    Form::from_terms(dim, 2, terms).unwrap()
}

/// The flat torus with the standard structure transported by a unipotent
/// integer matrix.
fn transported_torus(upper: &[i64]) -> HermitianSymplecticData {
    let mut p = Matrix::identity(6);
    let mut it = upper.iter();
    for r in 0..6 {
        for c in r + 1..6 {
            p[(r, c)] = Scalar::from_int(*it.next().unwrap());
        }
    }
    let p_inv = p.inverse().unwrap();
    let j = ComplexStructure::standard(6).conjugated_by(&p).unwrap();
    let w0 = hsgeom::hermitian::two_form_matrix(&(1..=3).fold(Form::zero(6, 2), |acc, i| {
        acc.add(&Form::e(6, &[2 * i - 1, 2 * i])).unwrap()
    }));
    let omega = two_form_from_matrix(&p_inv.transpose().mul(&w0).mul(&p_inv));
    let cm = ComplexModel::new(LieAlgebraModel::abelian("t", 6).unwrap(), j).unwrap();
    HermitianSymplecticData::new(cm, omega).unwrap()
}

fn operator(dim: usize, shift: i32, entries: &[i64]) -> GradedOperator {
    let mut it = entries.iter().cycle();
    GradedOperator::from_fn(dim, shift, |k| {
        let t = (k as i32 + shift) as usize;
        let mut m = Matrix::zeros(binomial(dim, t), binomial(dim, k));
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                m[(r, c)] = Scalar::from_int(*it.next().unwrap());
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn wedge_graded_commutative(a in any_form(6), b in any_form(6)) {
        let s = sign(a.degree() * b.degree());
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&s));
    }

    #[test]
    fn wedge_associative(a in form(6, 1), b in form(6, 2), c in form(6, 2)) {
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());
    }

    #[test]
    fn integrate_is_linear(a in form(6, 6), b in form(6, 6), c in gaussian()) {
        let vol = Form::e(6, &[1, 2, 3, 4, 5, 6]);
        let lhs = integrate(&a.add(&b.scale(&c)).unwrap(), &vol).unwrap();
        let rhs = integrate(&a, &vol).unwrap() + c * integrate(&b, &vol).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rational_approximation_respects_bound(x in -100.0f64..100.0, bits in 1u32..20) {
        let den = 1i64 << bits;
        let q = rational_approximation(x, den);
        prop_assert!(q.denom() <= &den.into());
        let approx = q.numer().to_string().parse::<f64>().unwrap() / q.denom().to_string().parse::<f64>().unwrap();
        prop_assert!((approx - x).abs() <= 1.0 / den as f64);
    }

    #[test]
    fn scalar_text_round_trips(s in gaussian(), d in 1i64..9) {
        let v = s * Scalar::ratio(1, d);
        prop_assert_eq!(v.to_string().parse::<Scalar>().unwrap(), v);
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn graded_jacobi_on_random_operators(
        shifts in (-1i32..=2, -1i32..=2, -1i32..=2),
        entries in prop::collection::vec(-2i64..=2, 3 * 40),
    ) {
        let a = operator(4, shifts.0, &entries[0..40]);
        let b = operator(4, shifts.1, &entries[40..80]);
        let c = operator(4, shifts.2, &entries[80..120]);
        prop_assert!(graded_jacobi_defect(&a, &b, &c).unwrap().is_zero());
    }

    #[test]
    fn graded_commutator_antisymmetry(
        shifts in (-1i32..=2, -1i32..=2),
        entries in prop::collection::vec(-2i64..=2, 80),
    ) {
        let a = operator(4, shifts.0, &entries[0..40]);
        let b = operator(4, shifts.1, &entries[40..80]);
        let ab = graded_commutator(&a, &b).unwrap();
        let ba = graded_commutator(&b, &a).unwrap();
        let s = sign((a.parity() * b.parity()) as usize + 1);
        prop_assert_eq!(ab, ba.scale(&s));
    }
}

fn structure_operators(data: &HermitianSymplecticData) -> Vec<GradedOperator> {
    let cm = data.complex_model();
    let lef = data.lefschetz();
    vec![cm.d().clone(), cm.d_c().clone(), lef.l11.clone(), lef.lambda11.clone(), data.hodge_star().clone()]
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn graded_jacobi_on_structure_operators(i in 0usize..5, j in 0usize..5, k in 0usize..5) {
        let data = catalog_hs("e2_x_r3");
        let ops = structure_operators(&data);
        prop_assert!(graded_jacobi_defect(&ops[i], &ops[j], &ops[k]).unwrap().is_zero());
    }

    #[test]
    fn lambda_is_adjoint_of_l(
        (a, b) in (0usize..=4).prop_flat_map(|k| (form(6, k), form(6, k + 2))),
        seed in any::<u64>(),
        flavor in prop::bool::ANY,
    ) {
        let data = catalog_hs(if seed % 2 == 0 { "e2_x_r3" } else { "torus6_rot" });
        let flavor = if flavor { Flavor::Omega } else { Flavor::Omega11 };
        let (l, lambda) = data.lefschetz().pair(flavor);
        prop_assert_eq!(data.inner(&l.apply(&a).unwrap(), &b).unwrap(), data.inner(&a, &lambda.apply(&b).unwrap()).unwrap());
    }

    #[test]
    fn lefschetz_decomposition_reconstructs(a in (0usize..=3).prop_flat_map(|k| form(6, k))) {
        let data = catalog_hs("e2_x_r3");
        let terms = primitive_decompose(&data, &a, Flavor::Omega11).unwrap();
        let l = &data.lefschetz().l11;
        let mut sum = Form::zero(6, a.degree());
        for (s, b) in terms {
            prop_assert!(b.degree() < 2 || data.is_primitive(&b, Flavor::Omega11));
            let mut term = b;
            for _ in 0..s {
                term = l.apply(&term).unwrap();
            }
            sum = sum.add(&term).unwrap();
        }
        prop_assert_eq!(sum, a);
    }

    #[test]
    fn weil_on_primitive_combinations(
        (p, q) in (0usize..=3, 0usize..=3).prop_filter("p+q ≤ 3", |(p, q)| p + q <= 3),
        coeffs in prop::collection::vec(gaussian(), 20),
        model in prop::sample::select(vec!["torus6", "torus6_rot", "e2_x_r3"]),
    ) {
        let data = catalog_hs(model);
        let basis = primitive_basis(&data, p, q, Flavor::Omega11);
        let v: Vec<Scalar> = (0..basis.cols()).map(|c| coeffs[c % coeffs.len()].clone()).collect();
        let b = Form::from_vector(6, p + q, &basis.mul_vec(&v));
        prop_assert!(weil_identity_check(&data, &b, p, q).unwrap().is_zero());
    }

    #[test]
    fn conjugation_swaps_bidegrees(a in any_form(6), model in prop::sample::select(vec!["iwasawa", "kt_x_t2", "e2_x_r3"])) {
        let m = catalog_entry(model).unwrap().load().unwrap();
        let cm = ComplexModel::new(m.model, m.complex_structure).unwrap();
        let k = a.degree();
        for p in 0..=k.min(3) {
            let q = k - p;
            if q > 3 {
                continue;
            }
            prop_assert_eq!(cm.project(&a.conj(), p, q), cm.project(&a, q, p).conj());
        }
        prop_assert_eq!(cm.bidegree_decompose(&a).reconstruct(6), a);
    }

    #[test]
    fn d_splits_by_bidegree(a in real_form(6, 2), model in prop::sample::select(vec!["iwasawa", "h5_x_r", "e2_x_r3"])) {
        let m = catalog_entry(model).unwrap().load().unwrap();
        let cm = ComplexModel::new(m.model, m.complex_structure).unwrap();
        let da = cm.d().apply(&a).unwrap();
        let split = cm.del().apply(&a).unwrap().add(&cm.delbar().apply(&a).unwrap()).unwrap();
        prop_assert_eq!(da, split);
        prop_assert!(cm.d_c().apply(&a).unwrap().is_real());
    }
}

proptest! {
    #![proptest_config(cfg(6))]

    #[test]
    fn transported_torus_identities(upper in prop::collection::vec(-1i64..=1, 15)) {
        let data = transported_torus(&upper);
        prop_assert!(skt_check(&data).is_ok());
        prop_assert!(data.laplacian().is_zero());
        for (p, q) in [(1, 1), (2, 0), (0, 0), (2, 1)] {
            let basis = primitive_basis(&data, p, q, Flavor::Omega11);
            for c in basis.columns() {
                let b = Form::from_vector(6, p + q, &c);
                prop_assert!(weil_identity_check(&data, &b, p, q).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn cohomology_symmetries_on_catalog() {
    for doc in hsgeom::catalog::catalog() {
        let m = doc.load().unwrap();
        let cm = ComplexModel::new(m.model, m.complex_structure).unwrap();
        let r = cohomology_report(&cm);
        let n = cm.n();
        for p in 0..=n {
            for q in 0..=n {
                assert_eq!(r.bott_chern[p][q], r.bott_chern[q][p], "{}", doc.name);
                assert_eq!(r.aeppli[p][q], r.aeppli[q][p], "{}", doc.name);
                assert_eq!(r.bott_chern[p][q], r.aeppli[n - p][n - q], "{}", doc.name);
            }
        }
        let e1 = r.page_sums(1);
        for (k, b) in r.betti.iter().enumerate() {
            assert!(*b <= e1[k], "{}: degree {k}", doc.name);
        }
        for page in 1..r.frolicher_pages.len() {
            let (prev, next) = (r.page_sums(page), r.page_sums(page + 1));
            assert!(prev.iter().zip(&next).all(|(a, b)| a >= b), "{}", doc.name);
        }
        assert_eq!(r.page_sums(r.frolicher_pages.len()), r.betti, "{}", doc.name);
    }
}
