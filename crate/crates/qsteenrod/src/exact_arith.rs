//! Exact scalars: odd prime fields with a runtime modulus, arbitrary-precision
//! rationals, and the binomial coefficients used by the hypergeometric and
//! flat-section formulas.
//!
//! Series and matrices are generic over [`Scalar`]. A prime-field element needs its
//! modulus to build `0` and `1`, so identities come from a [`Scalar::Ctx`] value
//! instead of `num_traits::Zero`/`One`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An odd prime `p`, checked by trial division at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p % 2 == 0 {
            return Err(Error::NotAnOddPrime(p));
        }
        let mut f = 3;
        while f * f <= p {
            if p % f == 0 {
                return Err(Error::NotAnOddPrime(p));
            }
            f += 2;
        }
        Ok(Self(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// The element `n mod p` for any signed integer `n`.
    pub fn elem(self, n: i64) -> FieldElement {
        FieldElement::new(n, self)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of F_p carrying its modulus. Mixing moduli panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    pub fn new(n: i64, modulus: PrimeModulus) -> Self {
        let p = modulus.0 as i64;
        Self { value: n.rem_euclid(p) as u64, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    /// Multiplicative inverse via Fermat.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.modulus.0 as u32 - 2))
    }

    /// Signed representative in `(-p/2, p/2]`, used for readable output.
    pub fn centered(self) -> i64 {
        let p = self.modulus.0;
        if self.value > p / 2 {
            self.value as i64 - p as i64
        } else {
            self.value as i64
        }
    }

    fn check(self, other: Self) {
        assert_eq!(
            self.modulus, other.modulus,
            "mixed-modulus arithmetic: F_{} vs F_{}",
            self.modulus, other.modulus
        );
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        Self { value: (self.value + rhs.value) % self.modulus.0, modulus: self.modulus }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        let p = self.modulus.0;
        Self { value: (self.value + p - rhs.value) % p, modulus: self.modulus }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        let v = (self.value as u128 * rhs.value as u128) % self.modulus.0 as u128;
        Self { value: v as u64, modulus: self.modulus }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: (self.modulus.0 - self.value) % self.modulus.0, modulus: self.modulus }
    }
}

impl Pow<u32> for FieldElement {
    type Output = Self;
    fn pow(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = FieldElement::new(1, self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

/// Exact coefficient ring for series and matrices.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Pow<u32, Output = Self>
{
    /// Data needed to build constants (the modulus for F_p, nothing for Q).
    type Ctx: Copy + PartialEq + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn from_int(n: i64, ctx: Self::Ctx) -> Self;
    fn from_bigint(n: &BigInt, ctx: Self::Ctx) -> Self;
    fn is_zero(&self) -> bool;
    fn checked_inv(&self) -> Option<Self>;
    /// JSON form used by the serialization contract: an integer or a rational string.
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value, ctx: Self::Ctx) -> Option<Self>;

    fn zero(ctx: Self::Ctx) -> Self {
        Self::from_int(0, ctx)
    }

    fn one(ctx: Self::Ctx) -> Self {
        Self::from_int(1, ctx)
    }
}

impl Scalar for FieldElement {
    type Ctx = PrimeModulus;

    fn ctx(&self) -> PrimeModulus {
        self.modulus
    }

    fn from_int(n: i64, ctx: PrimeModulus) -> Self {
        FieldElement::new(n, ctx)
    }

    fn from_bigint(n: &BigInt, ctx: PrimeModulus) -> Self {
        let r = n.mod_floor(&BigInt::from(ctx.0));
        FieldElement { value: r.to_u64().expect("reduced residue fits u64"), modulus: ctx }
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn checked_inv(&self) -> Option<Self> {
        self.inv().ok()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(self.value)
    }

    fn from_json(v: &serde_json::Value, ctx: PrimeModulus) -> Option<Self> {
        v.as_i64().map(|n| FieldElement::new(n, ctx))
    }
}

impl Scalar for BigRational {
    type Ctx = ();

    fn ctx(&self) {}

    fn from_int(n: i64, _: ()) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt, _: ()) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn checked_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::from(self.to_string())
    }

    fn from_json(v: &serde_json::Value, _: ()) -> Option<Self> {
        match v {
            serde_json::Value::String(s) => s.parse().ok(),
            serde_json::Value::Number(n) => n.as_i64().map(|n| Self::from_int(n, ())),
            _ => None,
        }
    }
}

/// Generalized binomial `a(a-1)...(a-k+1)/k!` in F_p; requires `k < p`.
pub fn binom_field(a: FieldElement, k: u64) -> Result<FieldElement> {
    let m = a.modulus();
    if k >= m.get() {
        return Err(Error::Domain(format!("binom_field needs k < p, got k = {k}")));
    }
    let mut num = m.elem(1);
    let mut den = m.elem(1);
    for i in 0..k {
        num = num * (a - m.elem(i as i64));
        den = den * m.elem(i as i64 + 1);
    }
    Ok(num * den.inv()?)
}

/// `binom(n, k) mod p` from the base-p digits of `n` and `k` (Lucas).
pub fn binom_lucas(mut n: u64, mut k: u64, p: PrimeModulus) -> FieldElement {
    let pp = p.get();
    let mut acc = BigUint::one();
    while k > 0 || n > 0 {
        let (nd, kd) = (n % pp, k % pp);
        if kd > nd {
            return p.elem(0);
        }
        acc *= num_integer::binomial(BigUint::from(nd), BigUint::from(kd)) % pp;
        n /= pp;
        k /= pp;
    }
    FieldElement::from_bigint(&BigInt::from(acc), p)
}

/// Integer binomial with the global edge conventions: `binom(n, k) = 0` for `k < 0`,
/// and for `0 <= n < k`; negative tops use `binom(n, k) = (-1)^k binom(k-n-1, k)`.
pub fn binom_int(n: i64, k: i64) -> BigInt {
    if k < 0 || (n >= 0 && k > n) {
        return BigInt::zero();
    }
    if n >= 0 {
        return BigInt::from(num_integer::binomial(BigUint::from(n as u64), BigUint::from(k as u64)));
    }
    let b = binom_int(k - n - 1, k);
    if k % 2 == 0 {
        b
    } else {
        -b
    }
}

/// Reduce a rational with denominator prime to `p` into F_p.
pub fn reduce_rational(r: &BigRational, p: PrimeModulus) -> Result<FieldElement> {
    let num = FieldElement::from_bigint(r.numer(), p);
    let den = FieldElement::from_bigint(r.denom(), p);
    Ok(num * den.inv()?)
}

/// Render a rational compactly, e.g. `-5/9`.
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-{}/{}", r.numer().abs(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(PrimeModulus::new(4).is_err());
        assert!(PrimeModulus::new(2).is_err());
        assert!(PrimeModulus::new(9).is_err());
        assert!(PrimeModulus::new(101).is_ok());
    }

    #[test]
    fn inverses_by_exhaustive_search() {
        for p in [3u64, 5, 7, 11, 101] {
            let m = PrimeModulus::new(p).unwrap();
            for a in 1..p as i64 {
                let x = m.elem(a);
                let brute = (1..p as i64).find(|&b| (a * b) % p as i64 == 1).unwrap();
                assert_eq!(x.inv().unwrap(), m.elem(brute));
            }
            assert_eq!(m.elem(0).inv(), Err(Error::DivisionByZero));
        }
        assert_eq!(f5().elem(2).inv().unwrap().value(), 3);
        let f7 = PrimeModulus::new(7).unwrap();
        assert_eq!(f7.elem(4).inv().unwrap().value(), 2);
    }

    #[test]
    fn binomial_examples() {
        let m = f5();
        assert_eq!(binom_field(m.elem(3), 0).unwrap(), m.elem(1));
        assert_eq!(binom_field(m.elem(0), 2).unwrap(), m.elem(0));
        assert_eq!(binom_field(m.elem(7), 2).unwrap(), m.elem(21));
        assert!(binom_field(m.elem(1), 5).is_err());
        let f3 = PrimeModulus::new(3).unwrap();
        assert_eq!(binom_lucas(5, 5, f3).value(), 1);
        assert_eq!(binom_lucas(4, 2, f3).value(), 0);
        for p in [3u64, 5, 7] {
            assert_eq!(binom_lucas(p, 1, PrimeModulus::new(p).unwrap()).value(), 0);
        }
    }

    #[test]
    fn pascal_and_fermat() {
        for p in [3u64, 5, 7, 11] {
            let m = PrimeModulus::new(p).unwrap();
            for a in 0..p as i64 {
                let x = m.elem(a);
                assert_eq!(x.pow(p as u32), x);
                for k in 1..p {
                    let lhs = binom_field(x, k).unwrap();
                    let rhs = binom_field(x - m.elem(1), k).unwrap()
                        + binom_field(x - m.elem(1), k - 1).unwrap();
                    assert_eq!(lhs, rhs);
                }
                if a != 0 {
                    assert_eq!(x.pow(p as u32 - 2), x.inv().unwrap());
                }
            }
        }
    }

    #[test]
    fn generalized_integer_binomials() {
        assert_eq!(binom_int(5, 2), BigInt::from(10));
        assert_eq!(binom_int(3, -1), BigInt::zero());
        assert_eq!(binom_int(2, 3), BigInt::zero());
        assert_eq!(binom_int(-1, 3), BigInt::from(-1));
        assert_eq!(binom_int(-2, 2), BigInt::from(3));
    }

    #[test]
    fn rational_reduction() {
        let r = BigRational::new(BigInt::from(-5), BigInt::from(9));
        let p = PrimeModulus::new(7).unwrap();
        assert_eq!(reduce_rational(&r, p).unwrap() * p.elem(9), p.elem(-5));
        assert!(reduce_rational(&r, PrimeModulus::new(3).unwrap()).is_err());
        assert_eq!(rational_string(&r), "-5/9");
    }

    #[test]
    #[should_panic(expected = "mixed-modulus")]
    fn mixed_moduli_is_a_hard_error() {
        let _ = f5().elem(1) + PrimeModulus::new(7).unwrap().elem(1);
    }

    #[test]
    fn json_round_trip() {
        let x = f5().elem(3);
        assert_eq!(FieldElement::from_json(&x.to_json(), f5()), Some(x));
        let r = BigRational::new(BigInt::from(-5), BigInt::from(9));
        assert_eq!(BigRational::from_json(&r.to_json(), ()), Some(r));
    }
}
