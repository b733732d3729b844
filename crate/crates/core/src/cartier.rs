//! The modified Cartier operator on regular differentials and its
//! Cartier–Manin matrices.
//!
//! Entries are stored before taking `p`-th roots: column `(s, j)` holds the
//! `a_{ij}` with `C' ω_j = Σ_i a_{ij}^{1/p} ω_i`. Over the prime field with
//! concrete branch points the root is the identity, so ranks are unaffected.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::curve::CurveSpec;
use crate::differentials::{basis, infinity_bound, split_exponents, BasisReport, Model};
use crate::error::{Error, Result};
use crate::exactmath::{BigRat, FpElem, PrimeField};
use crate::mpoly::{coeff_of_x, mpoly_pow, reduce_xpoly_mod_p, MPoly, XPoly};

pub const CONVENTION_NOTE: &str =
    "entries are a_ij with C'(w_j) = sum_i a_ij^(1/p) w_i; p-th roots are not applied";

/// `f^{n'_s} = Σ_e γ_{s,e} x^e` over `F_p[λ]`, with `m'_s p - n'_s N = s`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartierData {
    pub s: u64,
    pub m_prime: u64,
    pub n_prime: u64,
    pub gammas: Vec<MPoly<FpElem>>,
}

impl CartierData {
    /// `γ_{s,e}`, zero outside `0..=n' deg f`.
    pub fn gamma(&self, e: i64) -> MPoly<FpElem> {
        if e >= 0 && (e as usize) < self.gammas.len() {
            self.gammas[e as usize].clone()
        } else {
            let z = &self.gammas[0];
            MPoly::zero(z.shared_vars(), *z.ring())
        }
    }
}

/// Expands `f^{n'}` factor by factor, `∏ (x - λ_i)^{A_i n'}`.
pub fn gamma_coeffs(spec: &CurveSpec, s: u64) -> Result<CartierData> {
    let p = spec.p();
    if p == 0 {
        return Err(Error::RequiresPositiveCharacteristic);
    }
    if s >= spec.n() {
        return Err(Error::InvalidInput(format!("s = {s} outside 0..N-1")));
    }
    let (m_prime, n_prime) = split_exponents(p, spec.n(), s);
    let field = PrimeField::new(p)?;
    let mut power = XPoly::one(spec.vars(), field);
    for (i, &a) in spec.exponents().iter().enumerate() {
        let factor = reduce_xpoly_mod_p(&spec.linear_factor(i), p)?;
        power = power.mul(&mpoly_pow(&factor, (a * n_prime) as u32));
    }
    let top = (n_prime * spec.degree()) as usize;
    let gammas = (0..=top).map(|e| coeff_of_x(&power, e)).collect();
    Ok(CartierData {
        s,
        m_prime,
        n_prime,
        gammas,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CartierTerm {
    /// `(m'_s, l + 1)`.
    pub target: (u64, u64),
    pub coefficient: MPoly<FpElem>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CartierImage {
    pub terms: Vec<CartierTerm>,
    /// Coefficients still carry the formal `p`-th root.
    pub frobenius_twisted: bool,
}

/// `l` from `⌈j/p⌉ - 1` to `⌊(n' deg f + j)/p⌋ - 1`.
pub fn l_range(spec: &CurveSpec, n_prime: u64, j: u64) -> std::ops::RangeInclusive<i64> {
    let p = spec.p() as i64;
    let j = j as i64;
    let lo = (j + p - 1) / p - 1;
    let hi = (n_prime as i64 * spec.degree() as i64 + j) / p - 1;
    lo.max(0)..=hi
}

/// Image of `x^{j-1} dx / y^s`.
pub fn cartier_on_form(spec: &CurveSpec, s: u64, j: u64) -> Result<CartierImage> {
    let data = gamma_coeffs(spec, s)?;
    cartier_on_form_with(spec, &data, j)
}

pub fn cartier_on_form_with(spec: &CurveSpec, data: &CartierData, j: u64) -> Result<CartierImage> {
    if j == 0 {
        return Err(Error::InvalidInput("j must be at least 1".into()));
    }
    let p = spec.p() as i64;
    let terms = l_range(spec, data.n_prime, j)
        .map(|l| CartierTerm {
            target: (data.m_prime, l as u64 + 1),
            coefficient: data.gamma((l + 1) * p - j as i64),
        })
        .collect();
    Ok(CartierImage {
        terms,
        frobenius_twisted: true,
    })
}

/// Numerator `Q` of `C'(P dx / y^s) = Q^{(1/p)} dx / y^{m'}`, where the root
/// acts on coefficients: `q_l = Σ_k c_k γ_{s,(l+1)p-k-1}`.
pub fn cartier_on_numerator(
    spec: &CurveSpec,
    data: &CartierData,
    numerator: &XPoly<FpElem>,
) -> XPoly<FpElem> {
    let p = spec.p() as usize;
    let vars = numerator.shared_vars();
    let ring = *numerator.ring();
    let top = numerator.coeffs().len() + data.gammas.len();
    let lmax = top / p + 1;
    let mut out = vec![MPoly::zero(vars.clone(), ring); lmax + 1];
    for (k, c) in numerator.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (l, slot) in out.iter_mut().enumerate() {
            let e = ((l + 1) * p) as i64 - k as i64 - 1;
            if e < 0 {
                continue;
            }
            let g = data.gamma(e);
            if !g.is_zero() {
                *slot = slot.add(&c.mul(&g));
            }
        }
    }
    XPoly::from_coeffs(vars, ring, out)
}

/// Writes `q` as `Σ a_i P_i` for monic `P_i` of distinct degrees.
fn triangular_solve(q: &XPoly<FpElem>, targets: &[XPoly<FpElem>]) -> Option<Vec<MPoly<FpElem>>> {
    let vars = q.shared_vars();
    let ring = *q.ring();
    let mut coeffs = vec![MPoly::zero(vars, ring); targets.len()];
    let by_degree: BTreeMap<usize, usize> = targets
        .iter()
        .enumerate()
        .map(|(i, t)| (t.degree().expect("nonzero basis numerator"), i))
        .collect();
    let mut rest = q.clone();
    while let Some(d) = rest.degree() {
        let &i = by_degree.get(&d)?;
        let a = rest.leading_coefficient().unwrap().clone();
        rest = rest.sub(&targets[i].scale(&a));
        coeffs[i] = a;
    }
    Some(coeffs)
}

/// Cartier–Manin matrix of one model. `entries[row][col]`, rows and columns
/// both indexed by `basis_labels`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartierManinMatrix {
    pub model: Model,
    pub p: u64,
    pub curve: CurveSpec,
    pub basis_labels: Vec<(u64, usize)>,
    pub entries: Vec<Vec<MPoly<FpElem>>>,
    pub convention_note: &'static str,
    /// `s ↦ m'_s` for each character with a nonempty block.
    pub character_map: BTreeMap<u64, u64>,
}

impl CartierManinMatrix {
    pub fn size(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn vars(&self) -> Arc<[String]> {
        self.curve.vars()
    }

    pub fn entry(&self, row: (u64, usize), col: (u64, usize)) -> Option<&MPoly<FpElem>> {
        let r = self.basis_labels.iter().position(|&l| l == row)?;
        let c = self.basis_labels.iter().position(|&l| l == col)?;
        Some(&self.entries[r][c])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "model": self.model.to_string(),
            "p": self.p,
            "variables": &*self.curve.vars(),
            "basis": self.basis_labels.iter().map(|&(s, j)| json!([s, j])).collect::<Vec<_>>(),
            "matrix": self.entries.iter()
                .map(|row| row.iter().map(|e| e.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "matrix_text": self.entries.iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "character_map": self.character_map.iter()
                .map(|(s, m)| (s.to_string(), json!(m)))
                .collect::<serde_json::Map<_, _>>(),
            "convention": self.convention_note,
        })
    }
}

impl fmt::Display for CartierManinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join(" | "))?;
        }
        Ok(())
    }
}

pub fn cartier_manin(spec: &CurveSpec, model: Model) -> Result<CartierManinMatrix> {
    let report = basis(spec, model);
    cartier_manin_for_basis(spec, &report)
}

pub fn cartier_manin_for_basis(
    spec: &CurveSpec,
    report: &BasisReport,
) -> Result<CartierManinMatrix> {
    let p = spec.p();
    if p == 0 {
        return Err(Error::RequiresPositiveCharacteristic);
    }
    let field = PrimeField::new(p)?;
    let vars = spec.vars();
    let labels = report.labels();
    let size = labels.len();
    let mut entries = vec![vec![MPoly::zero(vars.clone(), field); size]; size];
    let mut character_map = BTreeMap::new();

    let reduce = |x: &XPoly<BigRat>| reduce_xpoly_mod_p(x, p);
    let mut offset = BTreeMap::new();
    let mut pos = 0;
    for b in &report.blocks {
        offset.insert(b.s, pos);
        pos += b.dim();
    }

    for block in report.blocks.iter().filter(|b| b.dim() > 0) {
        let data = gamma_coeffs(spec, block.s)?;
        character_map.insert(block.s, data.m_prime);
        let targets: Vec<XPoly<FpElem>> = match report.block(data.m_prime) {
            Some(t) => t
                .forms
                .iter()
                .map(|f| {
                    let num = reduce(&f.numerator)?;
                    num.try_map_coefficients(field, |c| Ok(c.scale_exponents(p as u32)))
                })
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let row0 = offset.get(&data.m_prime).copied().unwrap_or(0);
        for (jj, form) in block.forms.iter().enumerate() {
            let label = (block.s, jj + 1);
            let q = cartier_on_numerator(spec, &data, &reduce(&form.numerator)?);
            let coeffs =
                triangular_solve(&q, &targets).ok_or(Error::BasisReexpressionFailed(label))?;
            let col = offset[&block.s] + jj;
            for (i, a) in coeffs.into_iter().enumerate() {
                entries[row0 + i][col] = a;
            }
        }
    }
    Ok(CartierManinMatrix {
        model: report.model,
        p,
        curve: spec.clone(),
        basis_labels: labels,
        entries,
        convention_note: CONVENTION_NOTE,
        character_map,
    })
}

/// Verifies every nonzero entry of column `(s, j)` lies in a row of character
/// `m'_s`; returns `s ↦ m'_s` over the characters present.
pub fn block_structure(matrix: &CartierManinMatrix) -> Result<BTreeMap<u64, u64>> {
    let n = matrix.curve.n();
    let mut map = BTreeMap::new();
    for (c, &col) in matrix.basis_labels.iter().enumerate() {
        let (m_prime, _) = split_exponents(matrix.p, n, col.0);
        map.insert(col.0, m_prime);
        for (r, &row) in matrix.basis_labels.iter().enumerate() {
            if row.0 != m_prime && !matrix.entries[r][c].is_zero() {
                return Err(Error::BlockViolation { row, col });
            }
        }
    }
    Ok(map)
}

/// For the `C̃` basis, every target index `l + 1` produced by the operator
/// lies within `1..=⌊(m'_s ΣA - (N, N-ΣA))/N⌋`.
pub fn ctilde_supports_within_bounds(spec: &CurveSpec) -> Result<()> {
    let report = basis(spec, Model::Ctilde);
    for (s, j) in report.labels() {
        let (m_prime, n_prime) = split_exponents(spec.p(), spec.n(), s);
        let bound = infinity_bound(spec, m_prime);
        for l in l_range(spec, n_prime, j as u64) {
            if l + 1 < 1 || l + 1 > bound {
                return Err(Error::BlockViolation {
                    row: (m_prime, (l + 1) as usize),
                    col: (s, j),
                });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub is_zero: bool,
}

/// Rank over `F_p` after substituting concrete values for every variable.
pub fn evaluate_and_rank(
    matrix: &CartierManinMatrix,
    assignment: &BTreeMap<String, FpElem>,
) -> Result<RankReport> {
    let vars = matrix.vars();
    let p = matrix.p;
    for v in vars.iter() {
        if !assignment.contains_key(v) {
            return Err(Error::InvalidSpecialization(format!(
                "variable {v} has no value"
            )));
        }
    }
    let values: BTreeMap<String, BigRat> = assignment
        .iter()
        .map(|(k, v)| {
            if v.modulus() != p {
                return Err(Error::InvalidSpecialization(format!(
                    "value for {k} lies in F_{} instead of F_{p}",
                    v.modulus()
                )));
            }
            Ok((k.clone(), BigRat::from_integer((v.value() as i64).into())))
        })
        .collect::<Result<_>>()?;
    matrix.curve.specialize(&values).map_err(|e| match e {
        Error::DuplicateBranchPoint(i, j) => {
            Error::InvalidSpecialization(format!("branch points {i} and {j} coincide"))
        }
        other => other,
    })?;
    let point: Vec<FpElem> = vars.iter().map(|v| assignment[v]).collect();
    let mut rows: Vec<Vec<FpElem>> = matrix
        .entries
        .iter()
        .map(|row| row.iter().map(|e| e.evaluate(&point)).collect())
        .collect();
    let is_zero = rows.iter().flatten().all(|x| x.is_zero());
    Ok(RankReport {
        rank: rank_fp(&mut rows),
        is_zero,
    })
}

/// Row reduction over `F_p`.
pub fn rank_fp(rows: &mut [Vec<FpElem>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inverse().expect("nonzero pivot");
        let pivot_row: Vec<FpElem> = rows[rank].iter().map(|&x| x * inv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = *x - factor * y;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex68() -> CurveSpec {
        CurveSpec::parse(3, 2, &[1, 1, 1, 1, 1], &["0", "1", "z1", "z2", "z3"]).unwrap()
    }

    fn ex610(p: u64) -> CurveSpec {
        CurveSpec::parse(p, 3, &[1, 2, 2], &["0", "1", "z"]).unwrap()
    }

    fn text(m: &CartierManinMatrix) -> Vec<Vec<String>> {
        m.entries
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect())
            .collect()
    }

    #[test]
    fn gamma_examples() {
        let e = CurveSpec::parse(3, 2, &[1, 1, 1], &["0", "1", "z"]).unwrap();
        let d = gamma_coeffs(&e, 1).unwrap();
        assert_eq!(d.n_prime, 1);
        assert_eq!(d.gamma(2).to_string(), "2*z + 2");
        let d = gamma_coeffs(&ex610(7), 1).unwrap();
        assert_eq!(d.n_prime, 2);
        assert_eq!(d.gamma(6).to_string(), "z^4 + 2*z^3 + z^2 + 2*z + 1");
        assert_eq!(d.gammas.len(), 11);
        assert_eq!(d.gammas[10].to_string(), "1");
        let d = gamma_coeffs(&ex610(7), 0).unwrap();
        assert_eq!(d.gammas.len(), 1);
    }

    #[test]
    fn cartier_on_form_examples() {
        let im = cartier_on_form(&ex68(), 1, 1).unwrap();
        assert_eq!(im.terms.len(), 2);
        assert_eq!(im.terms[1].target, (1, 2));
        assert_eq!(im.terms[1].coefficient.to_string(), "1");
        let im = cartier_on_form(&ex68(), 1, 2).unwrap();
        assert_eq!(im.terms[0].coefficient.to_string(), "z1*z2*z3");
        let e = CurveSpec::parse(3, 2, &[1, 1, 1], &["0", "1", "z"]).unwrap();
        let im = cartier_on_form(&e, 1, 1).unwrap();
        assert_eq!(im.terms.len(), 1);
        assert_eq!(im.terms[0].target, (1, 1));
        assert!(im.frobenius_twisted);
    }

    #[test]
    fn example68_matrix() {
        let m = cartier_manin(&ex68(), Model::Ctilde).unwrap();
        assert_eq!(
            text(&m),
            vec![
                vec!["2*z1*z2*z3 + 2*z1*z2 + 2*z1*z3 + 2*z2*z3", "z1*z2*z3"],
                vec!["1", "2*z1 + 2*z2 + 2*z3 + 2"],
            ]
        );
    }

    #[test]
    fn example610_matrices() {
        let m = cartier_manin(&ex610(7), Model::Ctilde).unwrap();
        assert_eq!(m.basis_labels, vec![(1, 1), (2, 1), (2, 2), (2, 3)]);
        assert_eq!(m.entries[0][0].to_string(), "z^4 + 2*z^3 + z^2 + 2*z + 1");
        assert_eq!(
            block_structure(&m).unwrap(),
            BTreeMap::from([(1, 1), (2, 2)])
        );
        let m5 = cartier_manin(&ex610(5), Model::Ctilde).unwrap();
        assert_eq!(
            block_structure(&m5).unwrap(),
            BTreeMap::from([(1, 2), (2, 1)])
        );
        assert!(m5.entries[0][0].is_zero());
    }

    #[test]
    fn rank_examples() {
        let e3 = CurveSpec::parse(3, 2, &[1, 1, 1], &["0", "1", "z"]).unwrap();
        let m = cartier_manin(&e3, Model::Ctilde).unwrap();
        let f3 = PrimeField::new(3).unwrap();
        let r = evaluate_and_rank(&m, &BTreeMap::from([("z".to_string(), f3.elem(2))])).unwrap();
        assert_eq!(
            r,
            RankReport {
                rank: 0,
                is_zero: true
            }
        );
        let bad = evaluate_and_rank(&m, &BTreeMap::from([("z".to_string(), f3.elem(1))]));
        assert!(matches!(bad, Err(Error::InvalidSpecialization(_))));

        let m = cartier_manin(&ex68(), Model::Ctilde).unwrap();
        let two = f3.elem(2);
        let a: BTreeMap<String, FpElem> = ["z1", "z2", "z3"]
            .iter()
            .map(|v| (v.to_string(), two))
            .collect();
        assert!(matches!(
            evaluate_and_rank(&m, &a),
            Err(Error::InvalidSpecialization(_))
        ));
    }

    #[test]
    fn smooth_hyperelliptic_models_agree() {
        let spec = CurveSpec::parse(5, 2, &[1, 1, 1, 1, 1], &["0", "1", "a", "b", "c"]).unwrap();
        let x = cartier_manin(&spec, Model::X).unwrap();
        let ct = cartier_manin(&spec, Model::Ctilde).unwrap();
        assert_eq!(x.entries, ct.entries);
    }

    #[test]
    fn model_x_and_c_assemble() {
        for p in [5, 7] {
            let spec = ex610(p);
            let x = cartier_manin(&spec, Model::X).unwrap();
            assert_eq!(x.size(), 2);
            block_structure(&x).unwrap();
            let c = cartier_manin(&spec, Model::C).unwrap();
            assert_eq!(c.size(), 6);
            block_structure(&c).unwrap();
        }
    }
}
