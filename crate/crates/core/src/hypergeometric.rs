//! Appell–Lauricella series over `Q`, their `(σ; τ)` truncations, and the
//! reconstruction of the `γ` coefficients from a truncated series attached to
//! a separable deformation of `f`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::curve::CurveSpec;
use crate::differentials::split_exponents;
use crate::error::{Error, Result};
use crate::exactmath::{
    binomial, is_nonpositive_integer, pochhammer, rat, rat_int, rat_to_fp, BigRat, FpElem,
    PrimeField,
};
use crate::mpoly::{reduce_mod_p, substitute, var_list, MPoly, Monomial, Rationals};

/// Parameters `(a; b_1, ..., b_d; c)` of a Lauricella series in `d` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ALParams {
    a: BigRat,
    b: Vec<BigRat>,
    c: BigRat,
}

impl ALParams {
    pub fn new(a: BigRat, b: Vec<BigRat>, c: BigRat) -> Result<Self> {
        if is_nonpositive_integer(&c) {
            let n = (BigRat::one() - &c).to_integer();
            return Err(Error::PochhammerZeroDenominator {
                c: c.to_string(),
                n: n.try_into().unwrap_or(u64::MAX),
            });
        }
        Ok(ALParams { a, b, c })
    }

    pub fn a(&self) -> &BigRat {
        &self.a
    }

    pub fn b(&self) -> &[BigRat] {
        &self.b
    }

    pub fn c(&self) -> &BigRat {
        &self.c
    }
}

/// `(a; Σn) ∏ (b_j; n_j) / ((c; Σn) ∏ n_j!)`.
pub fn al_coefficient(params: &ALParams, n: &[u64]) -> Result<BigRat> {
    assert_eq!(n.len(), params.b.len(), "exponent tuple length");
    let total: u64 = n.iter().sum();
    let den = pochhammer(&params.c, total);
    if den.is_zero() {
        return Err(Error::PochhammerZeroDenominator {
            c: params.c.to_string(),
            n: total,
        });
    }
    let mut num = pochhammer(&params.a, total);
    let mut fact = BigRat::one();
    for (b, &k) in params.b.iter().zip(n) {
        num *= pochhammer(b, k);
        fact *= pochhammer(&BigRat::one(), k);
    }
    Ok(num / (den * fact))
}

/// Selects `(e_1, ..., e_d)` with `e_v <= caps[v]` and
/// `sigma - tau1 <= Σ e <= sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationSpec {
    pub sigma: i64,
    pub tau1: i64,
    pub caps: Vec<u64>,
}

impl TruncationSpec {
    pub fn new(sigma: i64, tau1: i64, caps: Vec<u64>) -> Self {
        TruncationSpec { sigma, tau1, caps }
    }

    /// `(σ; τ, ..., τ)` over `d` variables.
    pub fn uniform(sigma: i64, tau: u64, d: usize) -> Self {
        TruncationSpec {
            sigma,
            tau1: tau as i64,
            caps: vec![tau; d],
        }
    }

    fn window(&self) -> Option<(u64, u64)> {
        let hi = self.sigma;
        let lo = (self.sigma - self.tau1).max(0);
        let cap_sum: u64 = self.caps.iter().sum();
        let hi = hi.min(cap_sum as i64);
        (hi >= lo).then_some((lo as u64, hi as u64))
    }

    /// Number of selected tuples, saturating.
    pub fn count(&self) -> u128 {
        let Some((lo, hi)) = self.window() else {
            return 0;
        };
        let hi = hi as usize;
        let mut ways = vec![0u128; hi + 1];
        ways[0] = 1;
        for &cap in &self.caps {
            let mut next = vec![0u128; hi + 1];
            for (t, &w) in ways.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for e in 0..=cap as usize {
                    if t + e > hi {
                        break;
                    }
                    next[t + e] = next[t + e].saturating_add(w);
                }
            }
            ways = next;
        }
        ways[lo as usize..]
            .iter()
            .fold(0u128, |a, &w| a.saturating_add(w))
    }
}

/// Sum of the selected terms of the series, as a polynomial in `vars`.
pub fn truncated_series(
    params: &ALParams,
    trunc: &TruncationSpec,
    vars: Arc<[String]>,
) -> Result<MPoly<BigRat>> {
    let d = params.b.len();
    assert_eq!(vars.len(), d, "one variable per b-parameter");
    assert_eq!(trunc.caps.len(), d, "one cap per variable");
    let Some((lo, hi)) = trunc.window() else {
        return Ok(MPoly::zero(vars, Rationals));
    };

    // ratio[D] = (a; D) / (c; D), slot[v][e] = (b_v; e) / e!
    let mut ratio = Vec::with_capacity(hi as usize + 1);
    let (mut pa, mut pc) = (BigRat::one(), BigRat::one());
    for k in 0..=hi {
        if pc.is_zero() {
            return Err(Error::PochhammerZeroDenominator {
                c: params.c.to_string(),
                n: k,
            });
        }
        ratio.push(&pa / &pc);
        pa *= &params.a + rat_int(k as i64);
        pc *= &params.c + rat_int(k as i64);
    }
    let slot: Vec<Vec<BigRat>> = params
        .b
        .iter()
        .zip(&trunc.caps)
        .map(|(b, &cap)| {
            let mut row = Vec::with_capacity(cap as usize + 1);
            let mut acc = BigRat::one();
            for e in 0..=cap.min(hi) {
                row.push(acc.clone());
                acc = acc * (b + rat_int(e as i64)) / rat_int(e as i64 + 1);
            }
            row
        })
        .collect();

    // suffix capacity lets the search prune branches that cannot reach `lo`
    let mut suffix_cap = vec![0u64; d + 1];
    for v in (0..d).rev() {
        suffix_cap[v] = suffix_cap[v + 1] + trunc.caps[v].min(hi);
    }

    let mut terms: Vec<(Monomial, BigRat)> = Vec::new();
    let mut exps = vec![0u32; d];
    let mut prefix = vec![BigRat::one(); d + 1];
    fn walk(
        v: usize,
        used: u64,
        ctx: (&[Vec<BigRat>], &[BigRat], &[u64], u64, u64),
        exps: &mut Vec<u32>,
        prefix: &mut Vec<BigRat>,
        out: &mut Vec<(Monomial, BigRat)>,
    ) {
        let (slot, ratio, suffix_cap, lo, hi) = ctx;
        if v == slot.len() {
            if used >= lo {
                out.push((exps.clone(), &prefix[v] * &ratio[used as usize]));
            }
            return;
        }
        if used + suffix_cap[v] < lo {
            return;
        }
        for (e, w) in slot[v].iter().enumerate() {
            let e = e as u64;
            if used + e > hi {
                break;
            }
            if w.is_zero() {
                continue;
            }
            exps[v] = e as u32;
            prefix[v + 1] = &prefix[v] * w;
            walk(v + 1, used + e, ctx, exps, prefix, out);
        }
        exps[v] = 0;
    }
    walk(
        0,
        0,
        (&slot, &ratio, &suffix_cap, lo, hi),
        &mut exps,
        &mut prefix,
        &mut terms,
    );
    Ok(MPoly::from_terms(vars, Rationals, terms))
}

/// The separable deformation of `f`: each repeated linear factor is split
/// into distinct indeterminates, later collapsed back.
#[derive(Clone, Debug)]
pub struct SeparableDeformation {
    /// Deformed indeterminates, one per series slot.
    pub vars: Arc<[String]>,
    /// Index `k >= 1` of the branch point each slot collapses to.
    pub targets: Vec<usize>,
}

impl SeparableDeformation {
    /// Slots: `A_1 - 1` copies collapsing to `λ_1 = 1`, then `A_k` copies
    /// collapsing to `λ_k` for `k >= 2`. `A_0` contributes none.
    pub fn new(spec: &CurveSpec) -> Self {
        let mut names = Vec::new();
        let mut targets = Vec::new();
        for (k, &a) in spec.exponents().iter().enumerate().skip(1) {
            let copies = if k == 1 { a - 1 } else { a };
            for t in 1..=copies {
                names.push(format!("lambda{k}#{t}"));
                targets.push(k);
            }
        }
        SeparableDeformation {
            vars: var_list(&names),
            targets,
        }
    }

    pub fn slots(&self) -> usize {
        self.targets.len()
    }

    /// Collapse map `λ_{kt} ↦ λ_k` over `F_p`.
    pub fn collapse_map(&self, spec: &CurveSpec) -> Result<BTreeMap<String, MPoly<FpElem>>> {
        let p = spec.p();
        self.vars
            .iter()
            .zip(&self.targets)
            .map(|(name, &k)| Ok((name.clone(), reduce_mod_p(&spec.lambda_poly(k), p)?)))
            .collect()
    }
}

/// Which evaluation strategy [`gamma_via_hgm_with`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgmRoute {
    /// Expand the truncated series over the deformed variables, reduce mod
    /// `p`, then collapse.
    Expanded,
    /// Sum the same terms grouped by total degree after collapsing; every
    /// factor is p-integral, so this is carried out in `F_p` directly.
    Grouped,
    /// `Expanded` when the selected tuple count is at most
    /// [`EXPANDED_TUPLE_LIMIT`], otherwise `Grouped`.
    Auto,
}

pub const EXPANDED_TUPLE_LIMIT: u128 = 500;

/// The quantities `a', c', d'` and the split `(m', n')` for one index.
#[derive(Clone, Debug, PartialEq)]
pub struct HgmIndex {
    pub s: u64,
    pub l: u64,
    pub j: u64,
    pub m_prime: u64,
    pub n_prime: u64,
    pub a_prime: BigRat,
    pub c_prime: BigRat,
    pub d_prime: u64,
}

/// Smallest positive rational congruent to `x` modulo the integer `p`.
pub fn smallest_positive_rep(x: &BigRat, p: u64) -> BigRat {
    let pr = rat_int(p as i64);
    let k = (x / &pr).ceil() - BigRat::one();
    x - k * pr
}

impl HgmIndex {
    /// `a'` defaults to the smallest positive representative of
    /// `s deg f / N - j` modulo `p`.
    pub fn new(spec: &CurveSpec, s: u64, l: u64, j: u64, a_prime: Option<BigRat>) -> Result<Self> {
        let p = spec.p();
        if p == 0 {
            return Err(Error::RequiresPositiveCharacteristic);
        }
        if s == 0 || s >= spec.n() {
            return Err(Error::InvalidInput(format!("s = {s} outside 1..N-1")));
        }
        if j == 0 {
            return Err(Error::InvalidInput("j must be at least 1".into()));
        }
        let (m_prime, n_prime) = split_exponents(p, spec.n(), s);
        let d = n_prime as i64 * spec.degree() as i64 - (l as i64 + 1) * p as i64 + j as i64;
        if d < 0 {
            return Err(Error::NegativeDPrime(d));
        }
        let a0 = rat((s * spec.degree()) as i64, spec.n() as i64) - rat_int(j as i64);
        let a_prime = match a_prime {
            None => smallest_positive_rep(&a0, p),
            Some(a) => {
                let k = (&a - &a0) / rat_int(p as i64);
                if !a.is_positive() || !k.is_integer() {
                    return Err(Error::InvalidInput(format!(
                        "a' = {a} is not a positive representative of {a0} mod {p}"
                    )));
                }
                a
            }
        };
        let c_prime = &a_prime + BigRat::one() - rat(s as i64, spec.n() as i64);
        Ok(HgmIndex {
            s,
            l,
            j,
            m_prime,
            n_prime,
            a_prime,
            c_prime,
            d_prime: d as u64,
        })
    }

    /// `(c'; d') / (a'; d')`.
    pub fn prefactor(&self) -> BigRat {
        pochhammer(&self.c_prime, self.d_prime) / pochhammer(&self.a_prime, self.d_prime)
    }

    pub fn params(&self, spec: &CurveSpec, slots: usize) -> Result<ALParams> {
        let b = rat(self.s as i64, spec.n() as i64);
        ALParams::new(self.a_prime.clone(), vec![b; slots], self.c_prime.clone())
    }

    pub fn truncation(&self, slots: usize) -> TruncationSpec {
        TruncationSpec::uniform(self.d_prime as i64, self.n_prime, slots)
    }
}

/// `γ_{s,(l+1)p-j}` reconstructed from the truncated series.
pub fn gamma_via_hgm(spec: &CurveSpec, s: u64, l: u64, j: u64) -> Result<MPoly<FpElem>> {
    gamma_via_hgm_with(spec, s, l, j, None, HgmRoute::Auto)
}

pub fn gamma_via_hgm_with(
    spec: &CurveSpec,
    s: u64,
    l: u64,
    j: u64,
    a_prime: Option<BigRat>,
    route: HgmRoute,
) -> Result<MPoly<FpElem>> {
    HgmSolver::new(spec, s)?.gamma_with(l, j, a_prime, route)
}

/// Reconstructs every `γ_{s,e}` of one character. The grouped route's slot
/// product depends only on `s`, so it is built once and shared across `(l, j)`.
pub struct HgmSolver<'a> {
    spec: &'a CurveSpec,
    s: u64,
    deform: SeparableDeformation,
    collapse: BTreeMap<String, MPoly<FpElem>>,
    product: OnceLock<Result<Vec<MPoly<FpElem>>>>,
}

impl<'a> HgmSolver<'a> {
    pub fn new(spec: &'a CurveSpec, s: u64) -> Result<Self> {
        if spec.p() == 0 {
            return Err(Error::RequiresPositiveCharacteristic);
        }
        if !spec.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let deform = SeparableDeformation::new(spec);
        let collapse = deform.collapse_map(spec)?;
        Ok(HgmSolver {
            spec,
            s,
            deform,
            collapse,
            product: OnceLock::new(),
        })
    }

    pub fn gamma(&self, l: u64, j: u64) -> Result<MPoly<FpElem>> {
        self.gamma_with(l, j, None, HgmRoute::Auto)
    }

    pub fn gamma_with(
        &self,
        l: u64,
        j: u64,
        a_prime: Option<BigRat>,
        route: HgmRoute,
    ) -> Result<MPoly<FpElem>> {
        let idx = HgmIndex::new(self.spec, self.s, l, j, a_prime)?;
        let route = match route {
            HgmRoute::Auto => {
                if idx.truncation(self.deform.slots()).count() <= EXPANDED_TUPLE_LIMIT {
                    HgmRoute::Expanded
                } else {
                    HgmRoute::Grouped
                }
            }
            r => r,
        };
        match route {
            HgmRoute::Expanded => self.expanded(&idx),
            _ => self.grouped(&idx),
        }
    }

    fn expanded(&self, idx: &HgmIndex) -> Result<MPoly<FpElem>> {
        let slots = self.deform.slots();
        let params = idx.params(self.spec, slots)?;
        let series = truncated_series(&params, &idx.truncation(slots), self.deform.vars.clone())?;
        let delta = series.scale(&idx.prefactor());
        let reduced = reduce_mod_p(&delta, self.spec.p())?;
        substitute(&reduced, &self.collapse, self.spec.vars())
    }

    /// `[t^D] ∏_slots Σ_{e <= n'} u_e (λ_slot t)^e` for every `D`, with
    /// `u_e = (s/N; e) / e!`.
    fn slot_product(&self, n_prime: u64) -> Result<Vec<MPoly<FpElem>>> {
        let spec = self.spec;
        let p = spec.p();
        let field = PrimeField::new(p)?;
        let vars = spec.vars();
        let b = rat(self.s as i64, spec.n() as i64);

        // all p-integral since n' < p
        let mut u = Vec::with_capacity(n_prime as usize + 1);
        let mut acc = BigRat::one();
        for e in 0..=n_prime {
            u.push(rat_to_fp(&acc, p)?);
            acc = acc * (&b + rat_int(e as i64)) / rat_int(e as i64 + 1);
        }

        let zero = MPoly::zero(vars.clone(), field);
        let mut prod: Vec<MPoly<FpElem>> = vec![MPoly::one(vars.clone(), field)];
        for name in self.deform.vars.iter() {
            let lam = &self.collapse[name];
            let mut factor = Vec::with_capacity(u.len());
            let mut pw = MPoly::one(vars.clone(), field);
            for ue in &u {
                factor.push(pw.scale(ue));
                pw = pw.mul(lam);
            }
            let mut next = vec![zero.clone(); prod.len() + factor.len() - 1];
            for (i, a) in prod.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, f) in factor.iter().enumerate() {
                    if !f.is_zero() {
                        next[i + k] = next[i + k].add(&a.mul(f));
                    }
                }
            }
            prod = next;
        }
        Ok(prod)
    }

    /// `Σ_D π_D [t^D] ∏ u(λ t)` over `d' - n' <= D <= d'`, where
    /// `π_D = (c'; d') (a'; D) / ((a'; d') (c'; D)) = ∏_{i=D}^{d'-1} (c'+i)/(a'+i)`.
    fn grouped(&self, idx: &HgmIndex) -> Result<MPoly<FpElem>> {
        let p = self.spec.p();
        let prod = self
            .product
            .get_or_init(|| self.slot_product(idx.n_prime))
            .as_ref()
            .map_err(Clone::clone)?;
        let hi = idx.d_prime as usize;
        let lo = idx.d_prime.saturating_sub(idx.n_prime) as usize;
        let mut out = MPoly::zero(self.spec.vars(), PrimeField::new(p)?);
        let mut pi = BigRat::one();
        for dd in (lo..=hi).rev() {
            if dd < hi {
                let i = rat_int(dd as i64);
                pi = pi * (&idx.c_prime + &i) / (&idx.a_prime + &i);
            }
            if let Some(term) = prod.get(dd) {
                if !term.is_zero() {
                    out = out.add(&term.scale(&rat_to_fp(&pi, p)?));
                }
            }
        }
        Ok(out)
    }
}

/// `H_p(z) = Σ_{i<=m} binom(m, i)^2 z^i` over `F_p`, `m = (p-1)/2`.
#[allow(non_snake_case)]
pub fn classical_Hp(p: u64) -> Result<MPoly<FpElem>> {
    if p < 3 {
        return Err(Error::InvalidInput("H_p needs an odd prime".into()));
    }
    let field = PrimeField::new(p)?;
    let m = (p - 1) / 2;
    let vars = var_list(&["z"]);
    let mut binom = BigInt::one();
    let mut terms = Vec::new();
    for i in 0..=m {
        terms.push((vec![i as u32], field.from_bigint(&(&binom * &binom))));
        binom = binom * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    Ok(MPoly::from_terms(vars, field, terms))
}

/// Checks `(-1)^{d_1} binom(-s A_1 / N, d_1) = (c'; d') (a'; d' - d_1) /
/// ((a'; d') (c'; d' - d_1))` in `F_p`.
#[allow(clippy::too_many_arguments)]
pub fn lemma66_check(
    s: u64,
    n: u64,
    a1: u64,
    d1: u64,
    d_prime: u64,
    a_prime: &BigRat,
    c_prime: &BigRat,
    p: u64,
) -> Result<bool> {
    if d1 > d_prime {
        return Err(Error::InvalidInput("d_1 exceeds d'".into()));
    }
    let x = rat(-((s * a1) as i64), n as i64);
    let sign = if d1 % 2 == 0 { rat_int(1) } else { rat_int(-1) };
    let lhs = rat_to_fp(&(sign * binomial(&x, d1)), p)?;
    let mut ratio = BigRat::one();
    for i in d_prime - d1..d_prime {
        let i = rat_int(i as i64);
        ratio = ratio * (c_prime + &i) / (a_prime + &i);
    }
    Ok(lhs == rat_to_fp(&ratio, p)?)
}
