//! Curve data `y^N = ∏ (x - λ_i)^{A_i}` and its numerical invariants.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmath::{
    ext_gcd, gcd, is_prime, parse_rat, rat, rat_to_fp, BigRat, FpElem, PrimeField,
};
use crate::mpoly::{mpoly_pow, reduce_xpoly_mod_p, MPoly, Rationals, XPoly};

/// A branch point: a concrete scalar or a symbolic indeterminate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchPoint {
    Concrete(BigRat),
    Symbolic(String),
}

impl BranchPoint {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(v) = parse_rat(s) {
            return Ok(BranchPoint::Concrete(v));
        }
        let mut chars = s.chars();
        let ok_start = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_');
        if !ok_start || !chars.all(|c| c.is_alphanumeric() || c == '_') {
            return Err(Error::InvalidInput(format!(
                "cannot parse branch point {s:?}"
            )));
        }
        if s == "x" || s == "y" {
            return Err(Error::InvalidInput(format!("identifier {s:?} is reserved")));
        }
        Ok(BranchPoint::Symbolic(s.to_string()))
    }
}

impl fmt::Display for BranchPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchPoint::Concrete(v) => write!(f, "{v}"),
            BranchPoint::Symbolic(s) => write!(f, "{s}"),
        }
    }
}

/// Curve description as read from JSON, before validation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawCurve {
    #[serde(default)]
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub exponents: Vec<u64>,
    pub lambdas: Vec<String>,
}

/// A validated curve. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    p: u64,
    n: u64,
    exponents: Vec<u64>,
    lambdas: Vec<BranchPoint>,
    vars: Arc<[String]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseData {
    pub case: CaseTag,
    pub a_inf: u64,
}

/// A branch point index, finite or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointIndex {
    Finite(usize),
    Infinity,
}

impl fmt::Display for PointIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointIndex::Finite(j) => write!(f, "{j}"),
            PointIndex::Infinity => write!(f, "inf"),
        }
    }
}

impl PointIndex {
    pub fn to_json(&self) -> Value {
        match self {
            PointIndex::Finite(j) => json!(j),
            PointIndex::Infinity => json!("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub index: PointIndex,
    pub g: u64,
    pub n_j: u64,
    pub a_prime: u64,
    pub m: i64,
    pub n_bezout: i64,
}

impl LocalData {
    /// Invariants at a point with exponent `a` on `y^N`; `0 <= m < N_j`.
    pub fn compute(index: PointIndex, n: u64, a: u64) -> Self {
        let g = gcd(n, a);
        let n_j = n / g;
        let a_prime = a / g;
        let (m, n_bezout) = if n_j == 1 {
            (0, 1)
        } else {
            let (_, x, _) = ext_gcd(a_prime as i64, n_j as i64);
            let m = x.rem_euclid(n_j as i64);
            (m, (1 - m * a_prime as i64) / n_j as i64)
        };
        LocalData {
            index,
            g,
            n_j,
            a_prime,
            m,
            n_bezout,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HgmParams {
    pub a: BigRat,
    pub b: Vec<BigRat>,
    pub c: BigRat,
}

impl CurveSpec {
    /// Validates curve data. Check order: shape, characteristic, distinctness,
    /// irreducibility.
    pub fn new(p: u64, n: u64, exponents: Vec<u64>, lambdas: Vec<BranchPoint>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("N must be positive".into()));
        }
        if exponents.is_empty() {
            return Err(Error::InvalidInput(
                "at least one branch point is required".into(),
            ));
        }
        if exponents.len() != lambdas.len() {
            return Err(Error::InvalidInput(format!(
                "{} exponents but {} branch points",
                exponents.len(),
                lambdas.len()
            )));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidInput("exponents must be positive".into()));
        }
        if p != 0 {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if n % p == 0 {
                return Err(Error::CharDividesN { p, n });
            }
        }
        let lambdas = if p == 0 {
            lambdas
        } else {
            lambdas
                .into_iter()
                .map(|l| match l {
                    BranchPoint::Concrete(v) => rat_to_fp(&v, p)
                        .map(|e| BranchPoint::Concrete(BigRat::from_integer(e.value().into()))),
                    sym => Ok(sym),
                })
                .collect::<Result<Vec<_>>>()?
        };
        for i in 0..lambdas.len() {
            for j in i + 1..lambdas.len() {
                if lambdas[i] == lambdas[j] {
                    return Err(Error::DuplicateBranchPoint(i, j));
                }
            }
        }
        let g = exponents.iter().fold(n, |acc, &a| gcd(acc, a));
        if g != 1 {
            return Err(Error::NotIrreducible(g));
        }
        let vars: Arc<[String]> = lambdas
            .iter()
            .filter_map(|l| match l {
                BranchPoint::Symbolic(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        Ok(CurveSpec {
            p,
            n,
            exponents,
            lambdas,
            vars,
        })
    }

    pub fn validate(raw: &RawCurve) -> Result<Self> {
        let lambdas = raw
            .lambdas
            .iter()
            .map(|s| BranchPoint::parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.p, raw.n, raw.exponents.clone(), lambdas)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawCurve =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("curve JSON: {e}")))?;
        Self::validate(&raw)
    }

    /// Convenience constructor from string branch points.
    pub fn parse(p: u64, n: u64, exponents: &[u64], lambdas: &[&str]) -> Result<Self> {
        Self::validate(&RawCurve {
            p,
            n,
            exponents: exponents.to_vec(),
            lambdas: lambdas.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn to_raw(&self) -> RawCurve {
        RawCurve {
            p: self.p,
            n: self.n,
            exponents: self.exponents.clone(),
            lambdas: self.lambdas.iter().map(|l| l.to_string()).collect(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `r`, so branch points are indexed `0..=r`.
    pub fn r(&self) -> usize {
        self.exponents.len() - 1
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn lambdas(&self) -> &[BranchPoint] {
        &self.lambdas
    }

    /// Symbolic branch points in order of appearance.
    pub fn vars(&self) -> Arc<[String]> {
        self.vars.clone()
    }

    /// `deg f = Σ A_k`.
    pub fn degree(&self) -> u64 {
        self.exponents.iter().sum()
    }

    /// `(N, N - Σ A_k)`, with `(N, 0) = N`.
    pub fn g_inf(&self) -> u64 {
        gcd(
            self.n,
            (self.n as i64 - self.degree() as i64).unsigned_abs(),
        )
    }

    pub fn classify(&self) -> CaseData {
        let diff = self.n as i64 - self.degree() as i64;
        let case = match diff.signum() {
            1 => CaseTag::Case1,
            -1 => CaseTag::Case2,
            _ => CaseTag::Case3,
        };
        CaseData {
            case,
            a_inf: diff.unsigned_abs(),
        }
    }

    pub fn local_data(&self, index: PointIndex) -> Result<LocalData> {
        match index {
            PointIndex::Finite(j) => {
                let a = *self.exponents.get(j).ok_or_else(|| {
                    Error::InvalidInput(format!("branch point index {j} out of range"))
                })?;
                Ok(LocalData::compute(index, self.n, a))
            }
            PointIndex::Infinity => {
                let cd = self.classify();
                if cd.case == CaseTag::Case3 {
                    return Err(Error::InfinityUndefinedInCase3);
                }
                Ok(LocalData::compute(index, self.n, cd.a_inf))
            }
        }
    }

    pub fn singular_points(&self) -> Vec<PointIndex> {
        let mut out: Vec<PointIndex> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 1)
            .map(|(j, _)| PointIndex::Finite(j))
            .collect();
        let cd = self.classify();
        if cd.case != CaseTag::Case3 && cd.a_inf > 1 {
            out.push(PointIndex::Infinity);
        }
        out
    }

    pub fn genus(&self) -> u64 {
        let n = self.n as i64;
        let sum_g: i64 = self.exponents.iter().map(|&a| gcd(self.n, a) as i64).sum();
        let twice = 2 + self.r() as i64 * n - sum_g - self.g_inf() as i64;
        debug_assert!(twice >= 0 && twice % 2 == 0, "genus formula gave {twice}/2");
        (twice / 2) as u64
    }

    /// True when `λ_0 = 0` and `λ_1 = 1`.
    pub fn is_normalized(&self) -> bool {
        self.lambdas.len() >= 2
            && self.lambdas[0] == BranchPoint::Concrete(BigRat::zero())
            && self.lambdas[1] == BranchPoint::Concrete(BigRat::one())
    }

    pub fn hgm_params(&self) -> Result<HgmParams> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let n = self.n as i64;
        let a = rat(self.degree() as i64, n) - BigRat::one();
        let b = self.exponents[2..]
            .iter()
            .map(|&ai| rat(ai as i64, n))
            .collect();
        let c = &a + BigRat::one() - rat(self.exponents[1] as i64, n);
        Ok(HgmParams { a, b, c })
    }

    /// `λ_i` as a polynomial in the symbolic variables, over `Q`.
    pub fn lambda_poly(&self, i: usize) -> MPoly<BigRat> {
        match &self.lambdas[i] {
            BranchPoint::Concrete(v) => MPoly::constant(self.vars.clone(), Rationals, v.clone()),
            BranchPoint::Symbolic(s) => MPoly::variable(self.vars.clone(), Rationals, s)
                .expect("symbolic branch point is in the variable list"),
        }
    }

    /// `x - λ_i` over `Q`.
    pub fn linear_factor(&self, i: usize) -> XPoly<BigRat> {
        XPoly::linear_factor(&self.lambda_poly(i))
    }

    /// `∏ (x - λ_i)^{e_i}` over `Q`.
    pub fn product_of_factors(&self, exps: &[u64]) -> XPoly<BigRat> {
        assert_eq!(exps.len(), self.exponents.len());
        let mut acc = XPoly::one(self.vars.clone(), Rationals);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&mpoly_pow(&self.linear_factor(i), e as u32));
            }
        }
        acc
    }

    /// `f(x)` over `Q`.
    pub fn f(&self) -> XPoly<BigRat> {
        self.product_of_factors(&self.exponents)
    }

    /// `f(x)` over `F_p`.
    pub fn f_mod_p(&self) -> Result<XPoly<FpElem>> {
        if self.p == 0 {
            return Err(Error::RequiresPositiveCharacteristic);
        }
        reduce_xpoly_mod_p(&self.f(), self.p)
    }

    pub fn field(&self) -> Result<PrimeField> {
        if self.p == 0 {
            return Err(Error::RequiresPositiveCharacteristic);
        }
        PrimeField::new(self.p)
    }

    /// Replaces symbolic branch points by concrete values and revalidates.
    pub fn specialize(&self, values: &BTreeMap<String, BigRat>) -> Result<Self> {
        for k in values.keys() {
            if !self.vars.contains(k) {
                return Err(Error::VariableMismatch(format!("unknown variable {k}")));
            }
        }
        let lambdas = self
            .lambdas
            .iter()
            .map(|l| match l {
                BranchPoint::Symbolic(s) => match values.get(s) {
                    Some(v) => BranchPoint::Concrete(v.clone()),
                    None => l.clone(),
                },
                c => c.clone(),
            })
            .collect();
        Self::new(self.p, self.n, self.exponents.clone(), lambdas)
    }

    /// Same curve in another characteristic.
    pub fn with_p(&self, p: u64) -> Result<Self> {
        let raw = RawCurve { p, ..self.to_raw() };
        Self::validate(&raw)
    }

    /// Human-readable equation, e.g. `y^3 = x*(x - 1)^2*(x - z)^2`.
    pub fn equation(&self) -> String {
        let factors: Vec<String> = self
            .lambdas
            .iter()
            .zip(&self.exponents)
            .map(|(l, &a)| {
                let base = match l {
                    BranchPoint::Concrete(v) if v.is_zero() => "x".to_string(),
                    _ => format!("(x - {l})"),
                };
                if a == 1 {
                    base
                } else {
                    format!("{base}^{a}")
                }
            })
            .collect();
        let lhs = if self.n == 1 {
            "y".to_string()
        } else {
            format!("y^{}", self.n)
        };
        format!("{lhs} = {}", factors.join("*"))
    }
}
