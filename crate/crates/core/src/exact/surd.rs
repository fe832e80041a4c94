//! Real quadratic surds `a + b√c` with rational `a`, `b` and squarefree `c`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::parse;
use super::Rational;
use crate::error::{Error, Result};

/// Largest radicand accepted before squarefree reduction.
pub const MAX_RADICAND: u64 = 1_000_000_000_000;

/// An element of ℚ(√c) in canonical form.
///
/// `c` is squarefree, and `b = 0` exactly when `c = 1`, so derived equality is
/// value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: Rational,
    b: Rational,
    c: u64,
}

/// Splits `n` into `(s, f)` with `n = s²·f` and `f` squarefree.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        let pp = p * p;
        while rest.is_multiple_of(pp) {
            rest /= pp;
            square *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (square, rest)
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl QuadSurd {
    /// Builds `a + b√c`, reducing `c` to its squarefree part.
    pub fn new(a: Rational, b: Rational, c: u64) -> Result<Self> {
        if c == 0 {
            return Ok(Self::from_rational(a));
        }
        if c > MAX_RADICAND {
            return Err(Error::Domain(format!("radicand {c} exceeds {MAX_RADICAND}")));
        }
        let (s, f) = squarefree_split(c);
        let b = b * rat(s as i64);
        Ok(Self::canonical(a, b, f))
    }

    fn canonical(a: Rational, b: Rational, c: u64) -> Self {
        if b.is_zero() {
            Self { a, b, c: 1 }
        } else if c == 1 {
            Self { a: a + b, b: Rational::zero(), c: 1 }
        } else {
            Self { a, b, c }
        }
    }

    pub fn from_rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), c: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `√r` for a nonnegative rational `r`.
    pub fn sqrt_of(r: &Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Domain(format!("square root of negative {r}")));
        }
        if r.is_zero() {
            return Ok(Self::zero());
        }
        // √(p/q) = √(pq)/q
        let pq = r.numer() * r.denom();
        let pq = pq
            .to_u64()
            .ok_or_else(|| Error::Domain(format!("radicand of √({r}) too large")))?;
        let q = Rational::from_integer(r.denom().clone());
        Self::new(Rational::zero(), Rational::one() / q, pq)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }

    /// The radicand of the field this value lives in, `None` when rational.
    pub fn field(&self) -> Option<u64> {
        (!self.is_rational()).then_some(self.c)
    }

    /// Algebraic degree over ℚ: 1 or 2.
    pub fn degree(&self) -> usize {
        if self.is_rational() {
            1
        } else {
            2
        }
    }

    pub fn conj(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), c: self.c }
    }

    /// Field norm `a² − b²c`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * rat(self.c as i64)
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: the larger magnitude wins; equality is impossible for squarefree c > 1
        let a2 = &self.a * &self.a;
        let b2c = &self.b * &self.b * rat(self.c as i64);
        if a2 > b2c {
            sa
        } else {
            sb
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.c as f64).sqrt()
    }

    fn join(&self, other: &Self) -> Result<u64> {
        match (self.field(), other.field()) {
            (None, None) => Ok(1),
            (Some(c), None) | (None, Some(c)) => Ok(c),
            (Some(c), Some(d)) if c == d => Ok(c),
            (Some(c), Some(d)) => Err(Error::Domain(format!(
                "values in different fields ℚ(√{c}) and ℚ(√{d})"
            ))),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let c = self.join(other)?;
        Ok(Self::canonical(&self.a + &other.a, &self.b + &other.b, c))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let c = self.join(other)?;
        Ok(Self::canonical(&self.a - &other.a, &self.b - &other.b, c))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let c = self.join(other)?;
        let a = &self.a * &other.a + &self.b * &other.b * rat(c as i64);
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::canonical(a, b, c))
    }

    pub fn checked_inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let conj = self.conj();
        Ok(Self::canonical(conj.a / &n, conj.b / &n, self.c))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Default for QuadSurd {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rational> for QuadSurd {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for QuadSurd {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|d| d.signum())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident, $assign:ident, $amethod:ident) => {
        impl<'a> $trait<&'a QuadSurd> for &'a QuadSurd {
            type Output = QuadSurd;
            fn $method(self, rhs: &'a QuadSurd) -> QuadSurd {
                self.$checked(rhs).expect("quadratic surd arithmetic")
            }
        }
        impl $trait<QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $method(self, rhs: QuadSurd) -> QuadSurd {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $method(self, rhs: &'a QuadSurd) -> QuadSurd {
                (&self).$method(rhs)
            }
        }
        impl $assign<QuadSurd> for QuadSurd {
            fn $amethod(&mut self, rhs: QuadSurd) {
                *self = (&*self).$method(&rhs);
            }
        }
        impl<'a> $assign<&'a QuadSurd> for QuadSurd {
            fn $amethod(&mut self, rhs: &'a QuadSurd) {
                *self = (&*self).$method(rhs);
            }
        }
    };
}

forward_binop!(Add, add, checked_add, AddAssign, add_assign);
forward_binop!(Sub, sub, checked_sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, checked_mul, MulAssign, mul_assign);
forward_binop!(Div, div, checked_div, DivAssign, div_assign);

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { a: -self.a, b: -self.b, c: self.c }
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        -self.clone()
    }
}

impl Zero for QuadSurd {
    fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadSurd {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

/// Prints a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&format_rational(&self.a));
        }
        let mag = self.b.abs();
        let radical = if mag.is_one() {
            format!("sqrt({})", self.c)
        } else {
            format!("{}*sqrt({})", format_rational(&mag), self.c)
        };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "({sign}{radical})")
        } else {
            let op = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "({} {op} {radical})", format_rational(&self.a))
        }
    }
}

impl FromStr for QuadSurd {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse::parse_surd(s)
    }
}

impl Serialize for QuadSurd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadSurd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(8), (2, 2));
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(30), (1, 30));
        assert_eq!(squarefree_split(49), (7, 1));
    }

    #[test]
    fn canonical_form_collapses_perfect_squares() {
        let x = QuadSurd::new(rat(1), rat(2), 9).unwrap();
        assert_eq!(x, QuadSurd::from_int(7));
        assert_eq!(x.c(), 1);
        let y = QuadSurd::new(rat(0), rat(1), 8).unwrap();
        assert_eq!(y.c(), 2);
        assert_eq!(y.b(), &rat(2));
    }

    #[test]
    fn sqrt_of_rational() {
        let r = QuadSurd::sqrt_of(&Rational::new(5.into(), 9.into())).unwrap();
        assert_eq!(r.to_string(), "(1/3*sqrt(5))");
        let half = QuadSurd::sqrt_of(&Rational::new(1.into(), 2.into())).unwrap();
        assert!((half.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(QuadSurd::sqrt_of(&rat(-1)).is_err());
    }

    #[test]
    fn field_arithmetic() {
        let s2 = QuadSurd::sqrt_of(&rat(2)).unwrap();
        assert_eq!(&s2 * &s2, QuadSurd::from_int(2));
        let x = QuadSurd::from_int(1) + s2.clone();
        let inv = x.checked_inv().unwrap();
        assert_eq!(&x * &inv, QuadSurd::one());
        assert_eq!(inv, s2.clone() - QuadSurd::from_int(1));
        let s3 = QuadSurd::sqrt_of(&rat(3)).unwrap();
        assert!(s2.checked_add(&s3).is_err());
    }

    #[test]
    fn exact_sign() {
        // 3 − 2√2 > 0, 1 − √2 < 0
        let s2 = QuadSurd::sqrt_of(&rat(2)).unwrap();
        let a = QuadSurd::from_int(3) - QuadSurd::from_int(2) * s2.clone();
        assert_eq!(a.signum(), Ordering::Greater);
        let b = QuadSurd::from_int(1) - s2.clone();
        assert_eq!(b.signum(), Ordering::Less);
        assert!(s2 > QuadSurd::from_ratio(141, 100));
    }

    #[test]
    fn printing() {
        let x = QuadSurd::new(Rational::new((-1).into(), 4.into()), Rational::new(1.into(), 4.into()), 5)
            .unwrap();
        assert_eq!(x.to_string(), "(-1/4 + 1/4*sqrt(5))");
        let y = -QuadSurd::sqrt_of(&rat(3)).unwrap();
        assert_eq!(y.to_string(), "(-sqrt(3))");
        assert_eq!(QuadSurd::from_ratio(-3, 6).to_string(), "-1/2");
    }
}
