use std::collections::BTreeMap;

use lauricella::cartier::{
    block_structure, cartier_manin, cartier_on_form, cartier_on_numerator,
    ctilde_supports_within_bounds, evaluate_and_rank, gamma_coeffs, CartierData,
};
use lauricella::differentials::{basis, infinity_bound, split_exponents, Model};
use lauricella::hypergeometric::classical_Hp;
use lauricella::mpoly::{reduce_xpoly_mod_p, MPoly, XPoly};
use lauricella::{CartierManinMatrix, CurveSpec, FpElem, PrimeField};
use proptest::prelude::*;

fn normalized(p: u64, n: u64, a: &[u64]) -> Option<CurveSpec> {
    let mut names = vec!["0".to_string(), "1".to_string()];
    names.extend((2..a.len()).map(|i| format!("z{i}")));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    CurveSpec::parse(p, n, a, &refs).ok()
}

fn text(m: &CartierManinMatrix) -> Vec<Vec<String>> {
    m.entries
        .iter()
        .map(|row| row.iter().map(|e| e.to_string()).collect())
        .collect()
}

fn rows(r: &[&[&str]]) -> Vec<Vec<String>> {
    r.iter()
        .map(|row| row.iter().map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn genus_two_golden_matrix() {
    let spec = CurveSpec::parse(3, 2, &[1, 1, 1, 1, 1], &["0", "1", "z1", "z2", "z3"]).unwrap();
    let m = cartier_manin(&spec, Model::Ctilde).unwrap();
    assert_eq!(
        text(&m),
        rows(&[
            &["2*z1*z2*z3 + 2*z1*z2 + 2*z1*z3 + 2*z2*z3", "z1*z2*z3"],
            &["1", "2*z1 + 2*z2 + 2*z3 + 2"],
        ])
    );
}

#[test]
fn cubic_golden_matrices() {
    let spec7 = CurveSpec::parse(7, 3, &[1, 2, 2], &["0", "1", "z"]).unwrap();
    let m7 = cartier_manin(&spec7, Model::Ctilde).unwrap();
    assert_eq!(m7.basis_labels, vec![(1, 1), (2, 1), (2, 2), (2, 3)]);
    assert_eq!(
        text(&m7),
        rows(&[
            &["z^4 + 2*z^3 + z^2 + 2*z + 1", "0", "0", "0"],
            &["0", "z^7", "6*z^8 + 6*z^7", "z^8"],
            &["0", "6*z^7 + 6", "z^8 + z^7 + z + 1", "6*z^8 + 6*z"],
            &["0", "1", "6*z + 6", "z"],
        ])
    );
    let blocks7 = block_structure(&m7).unwrap();
    assert_eq!(blocks7, BTreeMap::from([(1, 1), (2, 2)]));

    let spec5 = spec7.with_p(5).unwrap();
    let m5 = cartier_manin(&spec5, Model::Ctilde).unwrap();
    assert_eq!(
        text(&m5),
        rows(&[
            &["0", "3*z + 3", "z^2 + 4*z + 1", "3*z^2 + 3*z"],
            &["4*z^6 + 4*z^5", "0", "0", "0"],
            &["z^6 + z^5 + z + 1", "0", "0", "0"],
            &["4*z + 4", "0", "0", "0"],
        ])
    );
    assert_eq!(
        block_structure(&m5).unwrap(),
        BTreeMap::from([(1, 2), (2, 1)])
    );
}

#[test]
fn legendre_family_is_the_hasse_invariant() {
    for p in [3u64, 5, 7, 11, 13] {
        let spec = CurveSpec::parse(p, 2, &[1, 1, 1], &["0", "1", "z"]).unwrap();
        let m = cartier_manin(&spec, Model::Ctilde).unwrap();
        let field = PrimeField::new(p).unwrap();
        let sign = if ((p - 1) / 2) % 2 == 0 { 1 } else { -1 };
        assert_eq!(
            m.entries,
            vec![vec![classical_Hp(p).unwrap().scale(&field.elem(sign))]]
        );
    }
}

#[test]
fn supersingular_parameter_has_rank_zero() {
    let spec = CurveSpec::parse(3, 2, &[1, 1, 1], &["0", "1", "z"]).unwrap();
    let m = cartier_manin(&spec, Model::Ctilde).unwrap();
    let f = PrimeField::new(3).unwrap();
    let r = evaluate_and_rank(&m, &BTreeMap::from([("z".to_string(), f.elem(2))])).unwrap();
    assert_eq!((r.rank, r.is_zero), (0, true));
    let bad = evaluate_and_rank(&m, &BTreeMap::from([("z".to_string(), f.elem(1))]));
    assert_eq!(bad.unwrap_err().kind(), "InvalidSpecialization");
}

/// Rank over F_p by brute force: largest k with a nonzero k x k minor.
fn brute_rank(m: &[Vec<FpElem>]) -> usize {
    fn det(m: &[Vec<FpElem>]) -> FpElem {
        if m.len() == 1 {
            return m[0][0];
        }
        let mut acc = m[0][0] - m[0][0];
        for c in 0..m.len() {
            let minor: Vec<Vec<FpElem>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(i, _)| *i != c)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let term = m[0][c] * det(&minor);
            acc = if c % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }
    let n = m.len();
    for k in (1..=n).rev() {
        for rs in subsets(n, k) {
            for cs in subsets(n, k) {
                let sub: Vec<Vec<FpElem>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| m[r][c]).collect())
                    .collect();
                if !det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

#[test]
fn scan_ranks_match_minors() {
    let spec = CurveSpec::parse(7, 3, &[1, 2, 2], &["0", "1", "z"]).unwrap();
    let m = cartier_manin(&spec, Model::Ctilde).unwrap();
    let f = PrimeField::new(7).unwrap();
    for z in 2..7 {
        let pt = [f.elem(z)];
        let values: Vec<Vec<FpElem>> = m
            .entries
            .iter()
            .map(|r| r.iter().map(|e| e.evaluate(&pt)).collect())
            .collect();
        let r = evaluate_and_rank(&m, &BTreeMap::from([("z".to_string(), f.elem(z))])).unwrap();
        assert_eq!(r.rank, brute_rank(&values), "z={z}");
    }
}

fn curve_strategy() -> impl Strategy<Value = (u64, u64, Vec<u64>)> {
    (
        prop::sample::select(vec![3u64, 5, 7, 11]),
        2u64..=6,
        prop::collection::vec(1u64..=3, 2..=4),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ctilde_matrix_respects_blocks((p, n, a) in curve_strategy()) {
        let Some(spec) = normalized(p, n, &a) else { return Ok(()) };
        let m = cartier_manin(&spec, Model::Ctilde).unwrap();
        let map = block_structure(&m).unwrap();
        for (&s, &t) in &map {
            prop_assert_eq!(t, split_exponents(p, n, s).0);
        }
        prop_assert!(ctilde_supports_within_bounds(&spec).is_ok());
        // every stored entry is zero unless row character is m'_s of the column
        for (ci, &(s, _)) in m.basis_labels.iter().enumerate() {
            let target = split_exponents(p, n, s).0;
            for (ri, &(t, i)) in m.basis_labels.iter().enumerate() {
                if t != target {
                    prop_assert!(m.entries[ri][ci].is_zero());
                } else {
                    prop_assert!(i as i64 <= infinity_bound(&spec, t));
                }
            }
        }
    }

    #[test]
    fn ctilde_entries_are_gammas((p, n, a) in curve_strategy()) {
        let Some(spec) = normalized(p, n, &a) else { return Ok(()) };
        let m = cartier_manin(&spec, Model::Ctilde).unwrap();
        let f = reduce_xpoly_mod_p(&spec.f(), p).unwrap();
        for (ci, &(s, j)) in m.basis_labels.iter().enumerate() {
            let (mp, np) = split_exponents(p, n, s);
            let mut pow = XPoly::one(spec.vars(), PrimeField::new(p).unwrap());
            for _ in 0..np { pow = pow.mul(&f); }
            for (ri, &(t, i)) in m.basis_labels.iter().enumerate() {
                if t == mp {
                    let e = i as i64 * p as i64 - j as i64;
                    let expected = if e >= 0 { pow.coeff(e as usize) } else { MPoly::zero(spec.vars(), PrimeField::new(p).unwrap()) };
                    prop_assert_eq!(&m.entries[ri][ci], &expected);
                }
            }
        }
    }

    #[test]
    fn x_and_c_models_assemble((p, n, a) in curve_strategy()) {
        let Some(spec) = normalized(p, n, &a) else { return Ok(()) };
        if spec.degree() > 8 { return Ok(()) }
        for model in [Model::X, Model::C] {
            let m = cartier_manin(&spec, model).unwrap();
            prop_assert_eq!(m.size(), basis(&spec, model).total());
            block_structure(&m).unwrap();
        }
    }

    #[test]
    fn exact_forms_are_killed(
        p in prop::sample::select(vec![3u64, 5, 7]),
        coeffs in prop::collection::vec(0i64..50, 1..30),
    ) {
        let spec = CurveSpec::parse(p, 2, &[1, 1, 1], &["0", "1", "z"]).unwrap();
        let field = PrimeField::new(p).unwrap();
        let c = |v: i64| MPoly::constant(spec.vars(), field, field.elem(v));
        // dφ/dx for φ = Σ c_k x^k
        let deriv: Vec<MPoly<FpElem>> =
            coeffs.iter().enumerate().skip(1).map(|(k, &v)| c(v * k as i64)).collect();
        for k in 1..=deriv.len() / p as usize {
            prop_assert!(deriv.get(k * p as usize - 1).map_or(true, |x| x.is_zero()));
        }
        let trivial = CartierData {
            s: 0,
            m_prime: 0,
            n_prime: 0,
            gammas: vec![MPoly::one(spec.vars(), field)],
        };
        let image = cartier_on_numerator(&spec, &trivial, &XPoly::from_coeffs(spec.vars(), field, deriv));
        prop_assert!(image.is_zero());
    }

    #[test]
    fn images_shift_with_frobenius((p, n, a) in curve_strategy(), j in 1u64..8, k in 1u64..3) {
        let Some(spec) = normalized(p, n, &a) else { return Ok(()) };
        for s in 1..n {
            let base = cartier_on_form(&spec, s, j).unwrap();
            let shifted = cartier_on_form(&spec, s, j + k * p).unwrap();
            let moved: Vec<((u64, u64), MPoly<FpElem>)> = base
                .terms
                .iter()
                .map(|t| ((t.target.0, t.target.1 + k), t.coefficient.clone()))
                .collect();
            let got: Vec<((u64, u64), MPoly<FpElem>)> =
                shifted.terms.iter().map(|t| (t.target, t.coefficient.clone())).collect();
            prop_assert_eq!(got, moved);
        }
    }

    #[test]
    fn gamma_top_coefficient_is_one((p, n, a) in curve_strategy()) {
        let Some(spec) = normalized(p, n, &a) else { return Ok(()) };
        for s in 1..n {
            let d = gamma_coeffs(&spec, s).unwrap();
            prop_assert_eq!(d.m_prime * p - d.n_prime * n, s);
            prop_assert_eq!(d.gammas.len() as u64, d.n_prime * spec.degree() + 1);
            prop_assert!(d.gammas.last().unwrap().is_constant());
            prop_assert_eq!(d.gammas.last().unwrap().constant_term().value(), 1);
        }
    }
}

#[test]
fn smooth_hyperelliptic_x_equals_ctilde() {
    for p in [3u64, 5, 7] {
        let spec = CurveSpec::parse(p, 2, &[1, 1, 1, 1, 1], &["0", "1", "a", "b", "c"]).unwrap();
        let x = cartier_manin(&spec, Model::X).unwrap();
        let ct = cartier_manin(&spec, Model::Ctilde).unwrap();
        assert_eq!(x.entries, ct.entries, "p={p}");
    }
}

#[test]
fn json_output_is_deterministic() {
    let spec = CurveSpec::parse(5, 3, &[1, 2, 2], &["0", "1", "z"]).unwrap();
    let a = cartier_manin(&spec, Model::Ctilde)
        .unwrap()
        .to_json()
        .to_string();
    let b = cartier_manin(&spec, Model::Ctilde)
        .unwrap()
        .to_json()
        .to_string();
    assert_eq!(a, b);
}
