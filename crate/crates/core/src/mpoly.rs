//! Sparse multivariate polynomials in the branch-point variables, and
//! polynomials in `x` whose coefficients are such multivariate polynomials.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector, so two
//! polynomials over the same variable list are equal iff their maps are.
//! Serialization and display walk the map from the highest exponent vector
//! down (lexicographic order, first variable most significant).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactmath::{rat_to_fp, BigRat, FpElem, PrimeField};

/// Coefficient ring interface for [`MPoly`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    /// Context needed to build constants (e.g. the modulus of `F_p`).
    type Ring: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn zero(ring: &Self::Ring) -> Self;
    fn one(ring: &Self::Ring) -> Self;
    fn from_int(ring: &Self::Ring, value: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool {
        false
    }
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn to_json(&self) -> Value;
}

/// Ring context for rational coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Coefficient for BigRat {
    type Ring = Rationals;

    fn zero(_: &Rationals) -> Self {
        <BigRat as Zero>::zero()
    }
    fn one(_: &Rationals) -> Self {
        <BigRat as One>::one()
    }
    fn from_int(_: &Rationals, value: i64) -> Self {
        BigRat::from_integer(value.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl Coefficient for FpElem {
    type Ring = PrimeField;

    fn zero(ring: &PrimeField) -> Self {
        ring.zero()
    }
    fn one(ring: &PrimeField) -> Self {
        ring.one()
    }
    fn from_int(ring: &PrimeField, value: i64) -> Self {
        ring.elem(value)
    }
    fn is_zero(&self) -> bool {
        FpElem::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        *self + *other
    }
    fn minus(&self, other: &Self) -> Self {
        *self - *other
    }
    fn times(&self, other: &Self) -> Self {
        *self * *other
    }
    fn negated(&self) -> Self {
        -*self
    }
    fn to_json(&self) -> Value {
        json!(self.value())
    }
}

pub type Monomial = Vec<u32>;

/// Sparse polynomial in a fixed, ordered list of variables.
#[derive(Clone, PartialEq, Debug)]
pub struct MPoly<C: Coefficient> {
    vars: Arc<[String]>,
    ring: C::Ring,
    terms: BTreeMap<Monomial, C>,
}

pub fn var_list<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

impl<C: Coefficient> MPoly<C> {
    pub fn zero(vars: Arc<[String]>, ring: C::Ring) -> Self {
        MPoly {
            vars,
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Arc<[String]>, ring: C::Ring, c: C) -> Self {
        let n = vars.len();
        Self::from_terms(vars, ring, [(vec![0; n], c)])
    }

    pub fn one(vars: Arc<[String]>, ring: C::Ring) -> Self {
        let c = C::one(&ring);
        Self::constant(vars, ring, c)
    }

    pub fn from_int(vars: Arc<[String]>, ring: C::Ring, value: i64) -> Self {
        let c = C::from_int(&ring, value);
        Self::constant(vars, ring, c)
    }

    pub fn variable(vars: Arc<[String]>, ring: C::Ring, name: &str) -> Result<Self> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::VariableMismatch(format!("unknown variable {name}")))?;
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        let c = C::one(&ring);
        Ok(Self::from_terms(vars, ring, [(exps, c)]))
    }

    /// Builds a polynomial, merging repeated monomials and dropping zeros.
    pub fn from_terms<I>(vars: Arc<[String]>, ring: C::Ring, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        let mut out = Self::zero(vars, ring);
        for (m, c) in terms {
            assert_eq!(m.len(), out.vars.len(), "exponent vector length");
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().plus(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn shared_vars(&self) -> Arc<[String]> {
        self.vars.clone()
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn coefficient(&self, m: &[u32]) -> C {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| C::zero(&self.ring))
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&vec![0; self.vars.len()])
    }

    /// Terms in canonical order: highest exponent vector first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter().rev()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            self.vars == other.vars,
            "variable lists differ: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn neg(&self) -> Self {
        MPoly {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.negated()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.negated());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(self.vars.clone(), self.ring.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca.times(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone(), self.ring.clone());
        }
        MPoly {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x.times(c)))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.vars.clone(), self.ring.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Evaluates at a point given in variable order.
    pub fn evaluate(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = C::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m) {
                for _ in 0..e {
                    t = t.times(x);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    /// Multiplies every exponent by `k`; for `k = p` over `F_p` this is the
    /// Frobenius twist `g(λ) ↦ g(λ)^p`.
    pub fn scale_exponents(&self, k: u32) -> Self {
        MPoly {
            vars: self.vars.clone(),
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.iter().map(|e| e * k).collect(), c.clone()))
                .collect(),
        }
    }

    /// Coefficientwise map into another ring; zero images are dropped.
    pub fn try_map_coefficients<D, F>(&self, ring: D::Ring, mut f: F) -> Result<MPoly<D>>
    where
        D: Coefficient,
        F: FnMut(&Monomial, &C) -> Result<D>,
    {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = f(m, c)?;
            if !d.is_zero() {
                terms.insert(m.clone(), d);
            }
        }
        Ok(MPoly {
            vars: self.vars.clone(),
            ring,
            terms,
        })
    }

    /// Re-expresses the polynomial over a variable list containing all of
    /// its own variables.
    pub fn embed(&self, target: Arc<[String]>) -> Result<Self> {
        if target == self.vars {
            return Ok(self.clone());
        }
        let positions: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target.iter().position(|t| t == v).ok_or_else(|| {
                    Error::VariableMismatch(format!("variable {v} missing from target list"))
                })
            })
            .collect::<Result<_>>()?;
        let n = target.len();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0; n];
            for (i, &p) in positions.iter().enumerate() {
                e[p] = m[i];
            }
            (e, c.clone())
        });
        Ok(Self::from_terms(target.clone(), self.ring.clone(), terms))
    }

    /// JSON form: `[{"exponents": [..], "coefficient": ..}, ..]`, highest first.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(m, c)| json!({"exponents": m, "coefficient": c.to_json()}))
                .collect(),
        )
    }

    fn monomial_string(&self, m: &[u32]) -> String {
        let parts: Vec<String> = self
            .vars
            .iter()
            .zip(m)
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| {
                if e == 1 {
                    v.clone()
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect();
        parts.join("*")
    }
}

impl<C: Coefficient> fmt::Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let one = C::one(&self.ring);
        for (i, (m, c)) in self.terms().enumerate() {
            let (neg, c) = if c.is_negative() {
                (true, c.negated())
            } else {
                (false, c.clone())
            };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = self.monomial_string(m);
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c == one {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{c}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> Add for &MPoly<C> {
    type Output = MPoly<C>;
    fn add(self, rhs: Self) -> MPoly<C> {
        MPoly::add(self, rhs)
    }
}

impl<C: Coefficient> Sub for &MPoly<C> {
    type Output = MPoly<C>;
    fn sub(self, rhs: Self) -> MPoly<C> {
        MPoly::sub(self, rhs)
    }
}

impl<C: Coefficient> Mul for &MPoly<C> {
    type Output = MPoly<C>;
    fn mul(self, rhs: Self) -> MPoly<C> {
        MPoly::mul(self, rhs)
    }
}

impl<C: Coefficient> Neg for &MPoly<C> {
    type Output = MPoly<C>;
    fn neg(self) -> MPoly<C> {
        MPoly::neg(self)
    }
}

/// Polynomial in `x`, dense in the `x`-degree, with [`MPoly`] coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct XPoly<C: Coefficient> {
    vars: Arc<[String]>,
    ring: C::Ring,
    coeffs: Vec<MPoly<C>>,
}

impl<C: Coefficient> XPoly<C> {
    pub fn zero(vars: Arc<[String]>, ring: C::Ring) -> Self {
        XPoly {
            vars,
            ring,
            coeffs: Vec::new(),
        }
    }

    pub fn one(vars: Arc<[String]>, ring: C::Ring) -> Self {
        let c = MPoly::one(vars.clone(), ring.clone());
        Self::from_coeffs(vars, ring, vec![c])
    }

    /// `x^k` with unit coefficient.
    pub fn monomial(vars: Arc<[String]>, ring: C::Ring, k: usize) -> Self {
        let mut coeffs = vec![MPoly::zero(vars.clone(), ring.clone()); k];
        coeffs.push(MPoly::one(vars.clone(), ring.clone()));
        Self::from_coeffs(vars, ring, coeffs)
    }

    /// `x - root`.
    pub fn linear_factor(root: &MPoly<C>) -> Self {
        let vars = root.shared_vars();
        let ring = root.ring().clone();
        Self::from_coeffs(
            vars.clone(),
            ring.clone(),
            vec![root.neg(), MPoly::one(vars, ring)],
        )
    }

    /// Builds from coefficients listed by increasing `x`-degree.
    pub fn from_coeffs(vars: Arc<[String]>, ring: C::Ring, mut coeffs: Vec<MPoly<C>>) -> Self {
        for c in &coeffs {
            assert!(c.vars() == &vars[..], "coefficient variable list mismatch");
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        XPoly { vars, ring, coeffs }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn shared_vars(&self) -> Arc<[String]> {
        self.vars.clone()
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[MPoly<C>] {
        &self.coeffs
    }

    pub fn coeff(&self, e: usize) -> MPoly<C> {
        self.coeffs
            .get(e)
            .cloned()
            .unwrap_or_else(|| MPoly::zero(self.vars.clone(), self.ring.clone()))
    }

    pub fn leading_coefficient(&self) -> Option<&MPoly<C>> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        Self::from_coeffs(self.vars.clone(), self.ring.clone(), coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect();
        Self::from_coeffs(self.vars.clone(), self.ring.clone(), coeffs)
    }

    /// Dense convolution in `x`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.vars.clone(), self.ring.clone());
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![MPoly::zero(self.vars.clone(), self.ring.clone()); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(self.vars.clone(), self.ring.clone(), coeffs)
    }

    pub fn scale(&self, c: &MPoly<C>) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect();
        Self::from_coeffs(self.vars.clone(), self.ring.clone(), coeffs)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![MPoly::zero(self.vars.clone(), self.ring.clone()); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(self.vars.clone(), self.ring.clone(), coeffs)
    }

    pub fn try_map_coefficients<D, F>(&self, ring: D::Ring, mut f: F) -> Result<XPoly<D>>
    where
        D: Coefficient,
        F: FnMut(&MPoly<C>) -> Result<MPoly<D>>,
    {
        let coeffs = self.coeffs.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let vars = coeffs
            .first()
            .map(|c| c.shared_vars())
            .unwrap_or_else(|| self.vars.clone());
        Ok(XPoly::from_coeffs(vars, ring, coeffs))
    }

    /// JSON form: MPoly JSON of each coefficient, by increasing `x`-degree.
    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| c.to_json()).collect())
    }
}

impl<C: Coefficient> fmt::Display for XPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let one = MPoly::one(self.vars.clone(), self.ring.clone());
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let xpart = match e {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            };
            if xpart.is_empty() {
                write!(f, "{c}")?;
            } else if *c == one {
                write!(f, "{xpart}")?;
            } else if c.num_terms() == 1 && !c.terms().next().unwrap().1.is_negative() {
                write!(f, "{c}*{xpart}")?;
            } else {
                write!(f, "({c})*{xpart}")?;
            }
        }
        Ok(())
    }
}

/// Exact power by repeated squaring.
pub fn mpoly_pow<C: Coefficient>(base: &XPoly<C>, exponent: u32) -> XPoly<C> {
    let mut acc = XPoly::one(base.shared_vars(), base.ring().clone());
    let mut sq = base.clone();
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul(&sq);
        }
    }
    acc
}

/// Coefficient of `x^e`; zero beyond the degree.
pub fn coeff_of_x<C: Coefficient>(poly: &XPoly<C>, e: usize) -> MPoly<C> {
    poly.coeff(e)
}

/// Substitutes polynomials for variables. Assigned values are embedded into
/// `target`; unassigned variables must themselves appear in `target`.
pub fn substitute<C: Coefficient>(
    poly: &MPoly<C>,
    assignments: &BTreeMap<String, MPoly<C>>,
    target: Arc<[String]>,
) -> Result<MPoly<C>> {
    for name in assignments.keys() {
        if !poly.vars().contains(name) {
            return Err(Error::VariableMismatch(format!(
                "assignment for unknown variable {name}"
            )));
        }
    }
    let ring = poly.ring().clone();
    let images: Vec<MPoly<C>> = poly
        .vars()
        .iter()
        .map(|v| match assignments.get(v) {
            Some(img) => img.embed(target.clone()),
            None => MPoly::variable(target.clone(), ring.clone(), v).map_err(|_| {
                Error::VariableMismatch(format!(
                    "variable {v} has no assignment and is not retained"
                ))
            }),
        })
        .collect::<Result<_>>()?;

    // powers[i][e] = images[i]^e, filled lazily
    let mut powers: Vec<Vec<MPoly<C>>> = images
        .iter()
        .map(|_| vec![MPoly::one(target.clone(), ring.clone())])
        .collect();
    let mut out = MPoly::zero(target.clone(), ring.clone());
    for (m, c) in poly.terms() {
        let mut t = MPoly::constant(target.clone(), ring.clone(), c.clone());
        for (i, &e) in m.iter().enumerate() {
            let e = e as usize;
            while powers[i].len() <= e {
                let next = powers[i].last().unwrap().mul(&images[i]);
                powers[i].push(next);
            }
            t = t.mul(&powers[i][e]);
        }
        out = out.add(&t);
    }
    Ok(out)
}

/// Coefficientwise reduction of a p-integral rational polynomial to `F_p`.
pub fn reduce_mod_p(poly: &MPoly<BigRat>, p: u64) -> Result<MPoly<FpElem>> {
    let field = PrimeField::new(p)?;
    poly.try_map_coefficients(field, |m, c| {
        rat_to_fp(c, p).map_err(|_| Error::MonomialDenominatorDivisibleByP {
            monomial: m.clone(),
            p,
        })
    })
}

pub fn reduce_xpoly_mod_p(poly: &XPoly<BigRat>, p: u64) -> Result<XPoly<FpElem>> {
    let field = PrimeField::new(p)?;
    poly.try_map_coefficients(field, |c| reduce_mod_p(c, p))
}
