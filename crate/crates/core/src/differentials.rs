//! Bases of regular differentials on the smooth model `X`, the singular
//! model `C` and the partial desingularization `C̃`, split by character `s`,
//! together with the local arithmetic used to justify them.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::curve::{CaseTag, CurveSpec};
use crate::error::{Error, Result};
use crate::exactmath::{gcd, mod_inverse, BigRat};
use crate::mpoly::{Rationals, XPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    X,
    C,
    Ctilde,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::X => "X",
            Model::C => "C",
            Model::Ctilde => "Ctilde",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Model::X),
            "C" | "c" => Ok(Model::C),
            "Ctilde" | "ctilde" | "C~" => Ok(Model::Ctilde),
            _ => Err(Error::InvalidInput(format!("unknown model {s:?}"))),
        }
    }
}

/// `(numerator(x) / y^s) dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialForm {
    pub s: u64,
    pub numerator: XPoly<BigRat>,
}

impl DifferentialForm {
    pub fn to_json(&self) -> Value {
        json!({"s": self.s, "numerator": self.numerator.to_json()})
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator.to_string();
        let num = if num == "1" {
            "dx".to_string()
        } else if self
            .numerator
            .coeffs()
            .iter()
            .filter(|c| !c.is_zero())
            .count()
            == 1
            && !num.contains(' ')
        {
            format!("{num}*dx")
        } else {
            format!("({num})*dx")
        };
        match self.s {
            0 => write!(f, "{num}"),
            1 => write!(f, "{num}/y"),
            s => write!(f, "{num}/y^{s}"),
        }
    }
}

/// Exponent data of `V_s`: `d_s` and `e_s = (e_{s,0}, ..., e_{s,r})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XExponents {
    pub d: u64,
    pub e: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterBlock {
    pub s: u64,
    pub forms: Vec<DifferentialForm>,
    pub x_data: Option<XExponents>,
}

impl CharacterBlock {
    pub fn dim(&self) -> usize {
        self.forms.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisReport {
    pub model: Model,
    /// One block per `s = 0, ..., N-1`, possibly empty.
    pub blocks: Vec<CharacterBlock>,
}

impl BasisReport {
    pub fn total(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim()).collect()
    }

    /// Basis labels `(s, j)` with `j` 1-based within each block, in basis order.
    pub fn labels(&self) -> Vec<(u64, usize)> {
        self.blocks
            .iter()
            .flat_map(|b| (1..=b.dim()).map(move |j| (b.s, j)))
            .collect()
    }

    pub fn forms(&self) -> impl Iterator<Item = &DifferentialForm> {
        self.blocks.iter().flat_map(|b| b.forms.iter())
    }

    pub fn block(&self, s: u64) -> Option<&CharacterBlock> {
        self.blocks.iter().find(|b| b.s == s)
    }

    pub fn to_json(&self) -> Value {
        let per_s: Vec<Value> = self
            .blocks
            .iter()
            .map(|b| {
                let mut v = json!({
                    "s": b.s,
                    "dim": b.dim(),
                    "forms": b.forms.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
                });
                if let Some(x) = &b.x_data {
                    v["d"] = json!(x.d);
                    v["e"] = json!(x.e);
                }
                v
            })
            .collect();
        json!({"model": self.model.to_string(), "per_s": per_s, "total": self.total()})
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Regularity of `∏ (x-λ_j)^{a_j} dx / y^s` on `X`: each local inequality
/// `N (a_j + 1) >= s A_j + (N, A_j)` and the bound at infinity
/// `N (Σ a + 1) <= s Σ A - (N, N - Σ A)`.
pub fn is_regular_on_x(spec: &CurveSpec, s: u64, a: &[u64]) -> bool {
    assert_eq!(a.len(), spec.exponents().len());
    let n = spec.n() as i64;
    let s = s as i64;
    let local = a
        .iter()
        .zip(spec.exponents())
        .all(|(&aj, &big_a)| n * (aj as i64 + 1) >= s * big_a as i64 + gcd(spec.n(), big_a) as i64);
    let sum_a: i64 = a.iter().map(|&x| x as i64).sum();
    local && n * (sum_a + 1) <= s * spec.degree() as i64 - spec.g_inf() as i64
}

/// `floor((s Σ A - (N, N - Σ A)) / N)`, the length of the `x`-degree window
/// at infinity; may be negative.
pub fn infinity_bound(spec: &CurveSpec, s: u64) -> i64 {
    (s as i64 * spec.degree() as i64 - spec.g_inf() as i64).div_euclid(spec.n() as i64)
}

pub fn x_exponents(spec: &CurveSpec, s: u64) -> XExponents {
    let n = spec.n() as i64;
    let e: Vec<u64> = spec
        .exponents()
        .iter()
        .map(|&a| {
            let v = ceil_div(s as i64 * a as i64 + gcd(spec.n(), a) as i64 - n, n);
            v.max(0) as u64
        })
        .collect();
    let sum_e: i64 = e.iter().map(|&x| x as i64).sum();
    let d = (infinity_bound(spec, s) - sum_e).max(0) as u64;
    XExponents { d, e }
}

fn monomial(spec: &CurveSpec, k: usize) -> XPoly<BigRat> {
    XPoly::monomial(spec.vars(), Rationals, k)
}

pub fn basis_x(spec: &CurveSpec) -> BasisReport {
    let blocks = (0..spec.n())
        .map(|s| {
            let data = x_exponents(spec, s);
            let forms = if data.d == 0 {
                Vec::new()
            } else {
                let base = spec.product_of_factors(&data.e);
                (0..data.d as usize)
                    .map(|m| DifferentialForm {
                        s,
                        numerator: base.shift(m),
                    })
                    .collect()
            };
            CharacterBlock {
                s,
                forms,
                x_data: Some(data),
            }
        })
        .collect();
    BasisReport {
        model: Model::X,
        blocks,
    }
}

/// Case 1 and Case 3: `x^i dx / y^s`, `0 <= i <= s-2`. Case 2:
/// `x^i f^{j-1} dx / y^s` for `1 <= j <= floor((s-2+ΣA)/N)` and
/// `0 <= i <= s-2-jN+ΣA`.
pub fn basis_c(spec: &CurveSpec) -> BasisReport {
    let n = spec.n() as i64;
    let deg = spec.degree() as i64;
    let case = spec.classify().case;
    let f = spec.f();
    let blocks = (0..spec.n())
        .map(|s| {
            let si = s as i64;
            let forms = match case {
                CaseTag::Case1 | CaseTag::Case3 => (0..(si - 1).max(0) as usize)
                    .map(|i| DifferentialForm {
                        s,
                        numerator: monomial(spec, i),
                    })
                    .collect(),
                CaseTag::Case2 => {
                    let jmax = (si - 2 + deg).div_euclid(n);
                    let mut out = Vec::new();
                    let mut fpow = XPoly::one(spec.vars(), Rationals);
                    for j in 1..=jmax {
                        if j > 1 {
                            fpow = fpow.mul(&f);
                        }
                        let imax = si - 2 - j * n + deg;
                        for i in 0..=imax {
                            out.push(DifferentialForm {
                                s,
                                numerator: fpow.shift(i as usize),
                            });
                        }
                    }
                    out
                }
            };
            CharacterBlock {
                s,
                forms,
                x_data: None,
            }
        })
        .collect();
    BasisReport {
        model: Model::C,
        blocks,
    }
}

/// `x^{i-1} dx / y^s` for `1 <= i <= floor((sΣA - (N, N-ΣA))/N)`.
pub fn basis_ctilde(spec: &CurveSpec) -> BasisReport {
    let blocks = (0..spec.n())
        .map(|s| {
            let dim = infinity_bound(spec, s).max(0) as usize;
            CharacterBlock {
                s,
                forms: (0..dim)
                    .map(|i| DifferentialForm {
                        s,
                        numerator: monomial(spec, i),
                    })
                    .collect(),
                x_data: None,
            }
        })
        .collect();
    BasisReport {
        model: Model::Ctilde,
        blocks,
    }
}

pub fn basis(spec: &CurveSpec, model: Model) -> BasisReport {
    match model {
        Model::X => basis_x(spec),
        Model::C => basis_c(spec),
        Model::Ctilde => basis_ctilde(spec),
    }
}

/// Expected `dim Ω[C]`: `(N-1)(N-2)/2` in Cases 1 and 3, `(ΣA-1)(ΣA-2)/2` in Case 2.
pub fn expected_dim_c(spec: &CurveSpec) -> u64 {
    let k = match spec.classify().case {
        CaseTag::Case2 => spec.degree(),
        _ => spec.n(),
    };
    (k - 1) * (k.saturating_sub(2)) / 2
}

/// Local membership test at a singular branch point: true iff no pair
/// `a, b >= 0` has `a N_j + b A'_j = d` and `-a m_j + b n_j ≡ e (mod g_j)`.
pub fn serre_local_membership(
    n_j: u64,
    a_prime: u64,
    g: u64,
    m: i64,
    n: i64,
    d: u64,
    e: i64,
) -> bool {
    let g = g as i64;
    let mut a = 0u64;
    while a * n_j <= d {
        let rest = d - a * n_j;
        if rest % a_prime == 0 {
            let b = (rest / a_prime) as i64;
            if (-(a as i64) * m + b * n - e).rem_euclid(g) == 0 {
                return false;
            }
        }
        a += 1;
    }
    true
}

/// Number of pairs with `p a + q b = d`, `a, b >= 0` (or `>= 1` when
/// `require_positive`).
pub fn count_representations(d: u64, p: u64, q: u64, require_positive: bool) -> Result<u64> {
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(Error::NotCoprime(p, q));
    }
    let lo = u64::from(require_positive);
    let mut count = 0;
    let mut a = lo;
    while a * p <= d {
        let rest = d - a * p;
        if rest % q == 0 && rest / q >= lo {
            count += 1;
        }
        a += 1;
    }
    Ok(count)
}

/// The unique `(m', n')` with `m' p - n' N = s`, `1 <= m' <= N-1`,
/// `0 <= n' < p`. For `s = 0` returns `(0, 0)`.
pub fn split_exponents(p: u64, n: u64, s: u64) -> (u64, u64) {
    assert!(s < n, "s must lie in [0, N)");
    if s == 0 {
        return (0, 0);
    }
    let inv = mod_inverse(p as i64, n as i64).expect("p is coprime to N") as u64;
    let m_prime = (s * inv) % n;
    let n_prime = (m_prime * p - s) / n;
    (m_prime, n_prime)
}
