//! Dense univariate polynomials over ℤ and ℚ, coefficients in ascending degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::surd::format_rational;
use super::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPolynomial {
    coeffs: Vec<Rational>,
}

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn write_terms<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (usize, bool, T, bool)>,
) -> fmt::Result {
    // (degree, negative, |coefficient|, coefficient is one)
    let mut first = true;
    for (deg, neg, mag, unit) in terms {
        let sign = match (first, neg) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        first = false;
        let coef = if unit && deg > 0 { String::new() } else { mag.to_string() };
        let var = match deg {
            0 => String::new(),
            1 => "x".to_string(),
            d => format!("x^{d}"),
        };
        write!(f, "{sign}{coef}{var}")?;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        trim(&mut coeffs);
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x^n − 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        Self::new(c)
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    /// Exact quotient by a monic divisor; `None` when the remainder is nonzero.
    pub fn div_exact_monic(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.degree().unwrap();
        let Some(n) = self.degree() else {
            return Some(self.clone());
        };
        if n < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let lead = rem[k + dd].clone();
            if lead.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &lead * dc;
            }
            quot[k] = lead;
        }
        rem.iter().all(Zero::is_zero).then(|| IntPolynomial::new(quot))
    }

    pub fn to_rat(&self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect())
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        trim(&mut coeffs);
        Self { coeffs }
    }

    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::new(
            coeffs.iter().map(|&(p, q)| Rational::new(BigInt::from(p), BigInt::from(q))).collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let l = l.clone();
                Self::new(self.coeffs.iter().map(|c| c / &l).collect())
            }
        }
    }

    /// Integer coefficients, if every coefficient is an integer.
    pub fn to_int(&self) -> Option<IntPolynomial> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(IntPolynomial::new)
    }

    pub fn div_rem(&self, d: &RatPolynomial) -> Result<(RatPolynomial, RatPolynomial)> {
        let Some(dd) = d.degree() else {
            return Err(Error::Domain("polynomial division by zero".into()));
        };
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let n = match self.degree() {
            Some(n) if n >= dd => n,
            _ => return Ok((RatPolynomial::new(vec![]), self.clone())),
        };
        let mut quot = vec![Rational::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let q = &rem[k + dd] / &lead;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &q * dc;
            }
            quot[k] = q;
        }
        Ok((RatPolynomial::new(quot), RatPolynomial::new(rem)))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }

    /// `p(s·x)`.
    pub fn scale_var(&self, s: &Rational) -> Self {
        let mut pow = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pow);
            pow *= s;
        }
        Self::new(out)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.coeffs.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).map(|(d, c)| {
            (d, c.is_negative(), c.abs(), c.abs().is_one())
        });
        write_terms(f, terms)
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.coeffs.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).map(|(d, c)| {
            let mag = c.abs();
            let unit = mag.is_one();
            let text = if mag.is_integer() { format_rational(&mag) } else { format!("({})", format_rational(&mag)) };
            (d, c.is_negative(), text, unit)
        });
        write_terms(f, terms)
    }
}

fn add_vecs<T: Clone + Zero + for<'a> Add<&'a T, Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.clone() + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn mul_vecs<T: Clone + Zero + for<'a> Mul<&'a T, Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y;
        }
    }
    out
}

macro_rules! poly_ops {
    ($ty:ident) => {
        impl<'a> Add for &'a $ty {
            type Output = $ty;
            fn add(self, rhs: &'a $ty) -> $ty {
                $ty::new(add_vecs(&self.coeffs, &rhs.coeffs))
            }
        }
        impl<'a> Neg for &'a $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty::new(self.coeffs.iter().map(|c| -c.clone()).collect())
            }
        }
        impl<'a> Sub for &'a $ty {
            type Output = $ty;
            fn sub(self, rhs: &'a $ty) -> $ty {
                self + &(-rhs)
            }
        }
        impl<'a> Mul for &'a $ty {
            type Output = $ty;
            fn mul(self, rhs: &'a $ty) -> $ty {
                $ty::new(mul_vecs(&self.coeffs, &rhs.coeffs))
            }
        }
    };
}

poly_ops!(IntPolynomial);
poly_ops!(RatPolynomial);

/// Positive divisors of `n` in increasing order.
pub fn divisors_u128(n: u128) -> Vec<u128> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn int_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let m = n
        .abs()
        .to_u128()
        .filter(|&m| m <= 1u128 << 50)
        .ok_or_else(|| Error::Domain(format!("constant term {n} too large for divisor search")))?;
    Ok(divisors_u128(m).into_iter().map(BigInt::from).collect())
}

fn eval_int(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, k| acc * x + k)
}

/// Synthetic division of a monic integer polynomial by `(y − r)`; the remainder must vanish.
fn deflate(c: &[BigInt], r: &BigInt) -> Vec<BigInt> {
    let n = c.len() - 1;
    let mut q = vec![BigInt::zero(); n];
    let mut carry = BigInt::zero();
    for k in (0..n).rev() {
        carry = &c[k + 1] + &carry * r;
        q[k] = carry.clone();
    }
    q
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Finds a factorization `(y² + p y + q)(y² + r y + s)` of a monic integer quartic.
fn quadratic_split(c: &[BigInt]) -> Result<Option<([BigInt; 2], [BigInt; 2])>> {
    let (a0, a1, a2, a3) = (&c[0], &c[1], &c[2], &c[3]);
    for d in int_divisors(a0)? {
        for q in [d.clone(), -d] {
            let s = a0 / &q;
            if q > s {
                continue;
            }
            if q != s {
                // p + r = a3 and p s + q r = a1
                let num = a1 - &q * a3;
                let den = &s - &q;
                if !num.is_multiple_of(&den) {
                    continue;
                }
                let p = num / den;
                let r = a3 - &p;
                if &q + &s + &p * &r == *a2 {
                    return Ok(Some(([q, p], [s, r])));
                }
            } else {
                if *a1 != &q * a3 {
                    continue;
                }
                // p, r roots of t² − a3 t + (a2 − 2q)
                let disc = a3 * a3 - BigInt::from(4) * (a2 - BigInt::from(2) * &q);
                if let Some(root) = isqrt_exact(&disc) {
                    let twice_p = a3 + &root;
                    if twice_p.is_even() {
                        let p = twice_p / 2;
                        let r = a3 - &p;
                        return Ok(Some(([q.clone(), p], [s, r])));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Irreducible monic factors over ℚ of a polynomial of degree ≤ 4, with multiplicity.
///
/// Rational roots are found among divisors of the constant term of the monic
/// integer rescaling; a remaining quartic is tested for a split into two quadratics.
pub fn irreducible_factors(p: &RatPolynomial) -> Result<Vec<RatPolynomial>> {
    let n = p.degree().ok_or_else(|| Error::Domain("zero polynomial".into()))?;
    if n > 4 {
        return Err(Error::Domain(format!("degree {n} exceeds the supported bound 4")));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let m = p.monic();
    // y = L x turns L^n m(y/L) into a monic integer polynomial
    let l = m.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lr = Rational::from_integer(l.clone());
    let scaled = m.scale_var(&(Rational::one() / &lr));
    let lift = lr.pow(n as i32);
    let mut q: Vec<BigInt> = scaled.coeffs.iter().map(|c| (c * &lift).to_integer()).collect();

    let mut int_factors: Vec<Vec<BigInt>> = Vec::new();
    'roots: while q.len() > 1 {
        let candidates = if q[0].is_zero() {
            vec![BigInt::zero()]
        } else {
            int_divisors(&q[0])?.into_iter().flat_map(|d| [d.clone(), -d]).collect()
        };
        for r in candidates {
            if eval_int(&q, &r).is_zero() {
                q = deflate(&q, &r);
                int_factors.push(vec![-r, BigInt::one()]);
                continue 'roots;
            }
        }
        break;
    }
    match q.len() - 1 {
        0 => {}
        4 => match quadratic_split(&q)? {
            Some(([q0, q1], [s0, s1])) => {
                int_factors.push(vec![q0, q1, BigInt::one()]);
                int_factors.push(vec![s0, s1, BigInt::one()]);
            }
            None => int_factors.push(q),
        },
        _ => int_factors.push(q),
    }
    // undo the rescaling: f(y) ↦ f(L x) / L^deg
    Ok(int_factors
        .into_iter()
        .map(|f| {
            let deg = f.len() as i32 - 1;
            let rp = RatPolynomial::new(f.into_iter().map(Rational::from_integer).collect());
            let back = rp.scale_var(&lr);
            let norm = lr.pow(deg);
            RatPolynomial::new(back.coeffs.iter().map(|c| c / &norm).collect())
        })
        .collect())
}
