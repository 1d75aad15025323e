//! Values computed by small independent oracles and then frozen.

use std::collections::BTreeMap;

use hsgeom::catalog::catalog_entry;
use hsgeom::cohomology::{
    cohomology_report, ddc_1form_check, ddc_lemma_check, frolicher_check, gauduchon_equality, holomorphic_closedness,
};
use hsgeom::complex::ComplexModel;
use hsgeom::exterior::{integrate, Form, MultiIndex};
use hsgeom::hermitian::validate_hs;
use hsgeom::linalg::subspace_contains;
use hsgeom::scalar::Scalar;
use hsgeom::spectral::{ddc11_pipeline, fitting_decompose, nonzero_closed_is_exact};
use proptest::prelude::*;

fn complex_model(name: &str) -> ComplexModel {
    let m = catalog_entry(name).unwrap().load().unwrap();
    ComplexModel::new(m.model, m.complex_structure).unwrap()
}

fn kahler(dim: usize) -> Form {
    (1..=dim / 2).fold(Form::zero(dim, 2), |acc, i| acc.add(&Form::e(dim, &[2 * i - 1, 2 * i])).unwrap())
}

/// Wedge by concatenating index lists and counting inversions.
fn brute_wedge(a: &BTreeMap<Vec<usize>, i64>, b: &BTreeMap<Vec<usize>, i64>) -> BTreeMap<Vec<usize>, i64> {
    let mut out = BTreeMap::new();
    for (ia, ca) in a {
        for (ib, cb) in b {
            let mut idx: Vec<usize> = ia.iter().chain(ib).copied().collect();
            let mut inversions = 0;
            for x in 0..idx.len() {
                for y in x + 1..idx.len() {
                    if idx[x] > idx[y] {
                        inversions += 1;
                    }
                }
            }
            idx.sort_unstable();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            *out.entry(idx).or_insert(0) += sign * ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn to_form(dim: usize, degree: usize, terms: &BTreeMap<Vec<usize>, i64>) -> Form {
    Form::from_terms(
        dim,
        degree,
        terms.iter().map(|(i, c)| (MultiIndex::from_sorted(i).unwrap(), Scalar::from_int(*c))),
    )
    .unwrap()
}

fn sparse_form(dim: usize, degree: usize) -> impl Strategy<Value = BTreeMap<Vec<usize>, i64>> {
    prop::collection::btree_map(
        prop::sample::subsequence((1..=dim).collect::<Vec<_>>(), degree),
        -3i64..=3,
        0..5,
    )
}

proptest! {
    #[test]
    fn wedge_matches_inversion_count(
        seed_a in sparse_form(6, 3), seed_b in sparse_form(6, 3),
        a in sparse_form(6, 2), b in sparse_form(6, 1),
    ) {
        let (fa, fb) = (to_form(6, 3, &seed_a), to_form(6, 3, &seed_b));
        prop_assert_eq!(fa.wedge(&fb).unwrap(), to_form(6, 6, &brute_wedge(&seed_a, &seed_b)));
        prop_assert_eq!(to_form(6, 2, &a).wedge(&to_form(6, 1, &b)).unwrap(), to_form(6, 3, &brute_wedge(&a, &b)));
    }
}

#[test]
fn kahler_powers() {
    let w = kahler(6);
    let expected = Form::e(6, &[1, 2, 3, 4]).add(&Form::e(6, &[1, 2, 5, 6])).unwrap().add(&Form::e(6, &[3, 4, 5, 6])).unwrap();
    assert_eq!(w.wedge(&w).unwrap(), expected.scale(&Scalar::from_int(2)));
    let top = w.wedge_power(3);
    assert_eq!(integrate(&top, &Form::e(6, &[1, 2, 3, 4, 5, 6])).unwrap(), Scalar::from_int(6));
}

#[test]
fn iwasawa_frame_equation() {
    let cm = complex_model("iwasawa");
    let b = cm.bigrading();
    let t: Vec<Form> = (1..=3).map(|a| b.holomorphic_covector(a)).collect();
    let oracle = |re: usize, im: usize| Form::e(6, &[re]).add(&Form::e(6, &[im]).scale(&Scalar::i())).unwrap();
    assert_eq!(t[0], oracle(1, 2));
    assert_eq!(t[2], oracle(5, 6));
    assert!(cm.d().apply(&t[0]).unwrap().is_zero());
    assert!(cm.d().apply(&t[1]).unwrap().is_zero());
    assert_eq!(cm.d().apply(&t[2]).unwrap(), t[0].wedge(&t[1]).unwrap().neg());
}

/// Rank over f64 with partial pivoting.
fn float_rank(mut m: Vec<Vec<f64>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())) else { break };
        if m[p][c].abs() < 1e-9 {
            continue;
        }
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank {
                let f = m[r][c] / m[rank][c];
                for cc in 0..cols {
                    m[r][cc] -= f * m[rank][cc];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Real Betti numbers of a nilpotent or unimodular algebra from the
/// structure constants, via a float complex built independently.
fn float_betti(dim: usize, constants: &[(usize, usize, usize, f64)]) -> Vec<usize> {
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (0u32..1 << dim).filter(|m| m.count_ones() as usize == k).map(|m| (0..dim).filter(|i| m >> i & 1 == 1).collect()).collect()
    };
    let de = |k: usize| -> BTreeMap<Vec<usize>, f64> {
        let mut out = BTreeMap::new();
        for &(i, j, kk, c) in constants {
            if kk == k + 1 {
                *out.entry(vec![i - 1, j - 1]).or_insert(0.0) -= c;
            }
        }
        out
    };
    let rank_of = |k: usize| -> usize {
        let src = subsets(k);
        let tgt = subsets(k + 1);
        let mut m = vec![vec![0.0; src.len()]; tgt.len()];
        for (c, s) in src.iter().enumerate() {
            for (pos, &v) in s.iter().enumerate() {
                for (pair, coeff) in de(v) {
                    let mut idx: Vec<usize> = s.clone();
                    idx.remove(pos);
                    let mut full = pair.clone();
                    full.extend(idx.iter().copied());
                    let mut inv = pos;
                    for x in 0..full.len() {
                        for y in x + 1..full.len() {
                            if full[x] > full[y] {
                                inv += 1;
                            }
                        }
                    }
                    full.sort_unstable();
                    if full.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    let r = tgt.iter().position(|t| *t == full).unwrap();
                    m[r][c] += if inv % 2 == 0 { coeff } else { -coeff };
                }
            }
        }
        float_rank(m)
    };
    let ranks: Vec<usize> = (0..=dim).map(|k| if k < dim { rank_of(k) } else { 0 }).collect();
    (0..=dim).map(|k| subsets(k).len() - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 }).collect()
}

fn float_constants(name: &str) -> Vec<(usize, usize, usize, f64)> {
    catalog_entry(name)
        .unwrap()
        .structure_constants
        .iter()
        .map(|(i, j, k, c)| (*i, *j, *k, c.parse::<f64>().unwrap()))
        .collect()
}

#[test]
fn betti_numbers_match_float_oracle() {
    for name in ["torus6", "iwasawa", "kt_x_t2", "h5_x_r", "e2_x_r3"] {
        let oracle = float_betti(6, &float_constants(name));
        assert_eq!(cohomology_report(&complex_model(name)).betti, oracle, "{name}");
    }
}

#[test]
fn iwasawa_frozen_numbers() {
    let r = cohomology_report(&complex_model("iwasawa"));
    assert_eq!(r.betti, vec![1, 4, 8, 10, 8, 4, 1]);
    assert_eq!(r.hodge, vec![vec![1, 2, 2, 1], vec![3, 6, 6, 3], vec![3, 6, 6, 3], vec![1, 2, 2, 1]]);
    assert_eq!(r.bott_chern[1][1], 4);
    let f = frolicher_check(&complex_model("iwasawa"));
    assert_eq!(f.e1_sums, vec![1, 5, 11, 14, 11, 5, 1]);
    assert_eq!(f.degeneration_page, 2);
}

#[test]
fn e2_x_r3_frozen_numbers() {
    let r = cohomology_report(&complex_model("e2_x_r3"));
    let table = vec![vec![1, 2, 1, 0], vec![2, 5, 4, 1], vec![1, 4, 5, 2], vec![0, 1, 2, 1]];
    assert_eq!(r.betti, vec![1, 4, 7, 8, 7, 4, 1]);
    assert_eq!(r.hodge, table);
    assert_eq!(r.bott_chern, table);
    assert_eq!(r.aeppli, table);
    assert!(frolicher_check(&complex_model("e2_x_r3")).degenerates_at_e1);
}

#[test]
fn iwasawa_ddc_verdicts() {
    let cm = complex_model("iwasawa");
    let v11 = ddc_lemma_check(&cm, 1, 1);
    assert!(v11.holds);
    assert_eq!(v11.s_dim, 0);
    let v20 = ddc_lemma_check(&cm, 2, 0);
    assert!(!v20.holds);
    let w = v20.witness.unwrap();
    let b = cm.bigrading();
    let theta12 = b.holomorphic_covector(1).wedge(&b.holomorphic_covector(2)).unwrap();
    assert_eq!(w, theta12);
    let pre = v20.witness_preimage.unwrap();
    assert_eq!(cm.d_c().apply(&pre).unwrap(), w);
    assert!(cm.d().apply(&w).unwrap().is_zero());
    let ddc = cm.d().compose(cm.d_c()).unwrap().matrix(0);
    assert!(!subspace_contains(&ddc.column_space(), &w.to_vector()));
    assert!(ddc_1form_check(&cm).holds);
}

#[test]
fn gauduchon_values() {
    let g = gauduchon_equality(&complex_model("iwasawa"));
    assert_eq!((g.b1, g.h10, g.h01), (4, 3, 2));
    assert!(g.b1_eq_2h01 && g.ddc11 && g.consistent);
    let t = gauduchon_equality(&complex_model("torus6"));
    assert_eq!((t.b1, t.h10, t.h01), (6, 3, 3));
}

#[test]
fn iwasawa_holomorphic_witness() {
    let cm = complex_model("iwasawa");
    let h = holomorphic_closedness(&cm, 1, None);
    assert!(!h.holds);
    assert_eq!(h.holomorphic_dim, 3);
    assert_eq!(h.witness.unwrap(), Form::e(6, &[5]).add(&Form::e(6, &[6]).scale(&Scalar::i())).unwrap());
}

#[test]
fn e2_x_r3_spectral_values() {
    let m = catalog_entry("e2_x_r3").unwrap().load().unwrap();
    let data = validate_hs(&m.model, &m.complex_structure, m.form("omega").unwrap()).unwrap();
    assert!(data.h().is_symmetric());
    let dec = fitting_decompose(&data);
    let dims: Vec<(usize, usize, u32)> =
        (1..=6).map(|k| dec.part(k)).map(|p| (p.zero_part.cols(), p.nonzero_part.cols(), p.stabilization_index)).collect();
    assert_eq!(dims, vec![(4, 2, 1), (7, 8, 1), (8, 12, 1), (7, 8, 1), (4, 2, 1), (1, 0, 1)]);
    assert!(dec.verify(&data).all());
    let cert = nonzero_closed_is_exact(&data, &dec, m.form("exact_sample").unwrap()).unwrap();
    assert_eq!(cert.beta, Form::e(6, &[2]));
    assert_eq!(cert.beta_direct, Form::e(6, &[2]));
    let r = ddc11_pipeline(&data).unwrap();
    assert_eq!(r.s_dim, 0);
    assert_eq!(r.nonzero_identity_checked, 8);
    assert!(r.nonzero_identity_holds && r.passes && r.rank_check);
}
