//! Exact scalars: arbitrary-precision rationals, prime-field elements, and the
//! Pochhammer / binomial / double-factorial primitives built on them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type BigRat = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> BigRat {
    BigRat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(value: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(value))
}

/// Rising factorial `x (x+1) ... (x+n-1)`; the empty product is 1.
pub fn pochhammer(x: &BigRat, n: u64) -> BigRat {
    let mut acc = BigRat::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += BigRat::one();
    }
    acc
}

/// Generalized binomial coefficient `x (x-1) ... (x-k+1) / k!`.
pub fn binomial(x: &BigRat, k: u64) -> BigRat {
    let mut acc = BigRat::one();
    let mut term = x.clone();
    for i in 1..=k {
        acc *= &term;
        acc /= BigRat::from_integer(BigInt::from(i));
        term -= BigRat::one();
    }
    acc
}

/// `n!!` for `n >= -1`, with `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    assert!(n >= -1, "double factorial is defined for n >= -1");
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// The prime field `F_p`, used as the ring context of [`FpElem`] coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, value: i64) -> FpElem {
        FpElem {
            value: value.rem_euclid(self.p as i64) as u64,
            modulus: self.p,
        }
    }

    pub fn from_bigint(&self, value: &BigInt) -> FpElem {
        let r = value.mod_floor(&BigInt::from(self.p));
        FpElem {
            value: r.to_u64().expect("residue fits in u64"),
            modulus: self.p,
        }
    }

    pub fn zero(&self) -> FpElem {
        self.elem(0)
    }

    pub fn one(&self) -> FpElem {
        self.elem(1)
    }
}

/// Element of `F_p`: `0 <= value < p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElem {
    value: u64,
    modulus: u64,
}

impl FpElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> FpElem {
        let mut base = self;
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inverse(self) -> Option<FpElem> {
        mod_inverse(self.value as i64, self.modulus as i64).map(|v| FpElem {
            value: v as u64,
            modulus: self.modulus,
        })
    }
}

impl fmt::Debug for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElem {
    type Output = FpElem;
    fn add(self, rhs: FpElem) -> FpElem {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = (self.value as u128 + rhs.value as u128) % self.modulus as u128;
        FpElem {
            value: s as u64,
            modulus: self.modulus,
        }
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    fn sub(self, rhs: FpElem) -> FpElem {
        self + (-rhs)
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    fn neg(self) -> FpElem {
        FpElem {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    fn mul(self, rhs: FpElem) -> FpElem {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let m = (self.value as u128 * rhs.value as u128) % self.modulus as u128;
        FpElem {
            value: m as u64,
            modulus: self.modulus,
        }
    }
}

/// Reduces a p-integral rational to `F_p`.
pub fn rat_to_fp(x: &BigRat, p: u64) -> Result<FpElem> {
    let field = PrimeField { p };
    let den = field.from_bigint(x.denom());
    let inv = den
        .inverse()
        .ok_or_else(|| Error::DenominatorDivisibleByP {
            value: x.to_string(),
            p,
        })?;
    Ok(field.from_bigint(x.numer()) * inv)
}

/// True when `x` is an integer `<= 0`, i.e. `-x` is a nonnegative integer.
pub fn is_nonpositive_integer(x: &BigRat) -> bool {
    x.is_integer() && !x.is_positive()
}

/// Parses `"a"` or `"a/b"` into a rational.
pub fn parse_rat(s: &str) -> Option<BigRat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRat::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRat::from_integer),
    }
}
