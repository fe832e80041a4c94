//! Cyclotomic polynomials and minimal polynomials of `e^{iα}` for quadratic `cos α`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{irreducible_factors, IntPolynomial, RatPolynomial};
use super::{QuadSurd, Rational};
use crate::error::{Error, Result};

pub fn divisors(n: u64) -> Vec<u64> {
    super::poly::divisors_u128(n as u128).into_iter().map(|d| d as u64).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if rest > 1 {
        result -= result / rest;
    }
    result
}

fn cyclotomic_table(n: u64) -> BTreeMap<u64, IntPolynomial> {
    let mut table = BTreeMap::new();
    for d in divisors(n) {
        let mut p = IntPolynomial::x_pow_minus_one(d as usize);
        for e in divisors(d) {
            if e < d {
                p = p.div_exact_monic(&table[&e]).expect("Φ_e divides x^d − 1");
            }
        }
        table.insert(d, p);
    }
    table
}

/// The `n`-th cyclotomic polynomial, by exact division of `x^n − 1`.
pub fn cyclotomic(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic index must be positive");
    cyclotomic_table(n).remove(&n).unwrap()
}

/// `[(d, Φ_d)]` over all divisors `d | q`; their product is `x^q − 1`.
pub fn factor_unity(q: u64) -> Vec<(u64, IntPolynomial)> {
    assert!(q >= 1, "exponent must be positive");
    cyclotomic_table(q).into_iter().collect()
}

/// All `n` with `φ(n) = d`.
///
/// Exhaustive up to `2d² + 2`; beyond that `φ(n) ≥ √(n/2) > d`.
pub fn totient_preimage(d: u64) -> Vec<u64> {
    (1..=2 * d * d + 2).filter(|&n| euler_phi(n) == d).collect()
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The monic minimal polynomial over ℚ of `e^{iα}` where `cos α` is given exactly.
pub fn min_poly_unit_complex(cos_alpha: &QuadSurd) -> Result<RatPolynomial> {
    let one = QuadSurd::one();
    if (&one - cos_alpha).is_negative() || (&one + cos_alpha).is_negative() {
        return Err(Error::Domain(format!("|cos α| > 1 for cos α = {cos_alpha}")));
    }
    let a = cos_alpha.a().clone();
    let candidate = if cos_alpha.is_rational() {
        RatPolynomial::new(vec![rat(1), -(rat(2) * &a), rat(1)])
    } else {
        // product of x² − 2(A ± B√C)x + 1
        let b2c = cos_alpha.b() * cos_alpha.b() * rat(cos_alpha.c() as i64);
        RatPolynomial::new(vec![
            rat(1),
            -(rat(4) * &a),
            rat(4) * &a * &a - rat(4) * b2c + rat(2),
            -(rat(4) * &a),
            rat(1),
        ])
    };
    let factors = irreducible_factors(&candidate)?;
    let c = cos_alpha.to_f64().clamp(-1.0, 1.0);
    let z = Complex64::new(c, (1.0 - c * c).sqrt());
    let best = factors
        .into_iter()
        .map(|f| (f.eval_complex(z).norm(), f))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .expect("nonconstant candidate has a factor");
    Ok(best.1)
}

/// The index `n` with `p = Φ_n`, if any.
pub fn is_cyclotomic(p: &RatPolynomial) -> Result<Option<u64>> {
    if !p.is_monic() {
        return Err(Error::Domain(format!("{p} is not monic")));
    }
    let Some(ip) = p.to_int() else {
        return Ok(None);
    };
    let d = ip.degree().unwrap() as u64;
    Ok(totient_preimage(d).into_iter().find(|&n| cyclotomic(n) == ip))
}

/// Exact `cos(2πk/n)` when `φ(n/gcd(k, n)) ≤ 2`, which covers every quadratic value.
pub fn cos_two_pi_fraction(k: i64, n: u64) -> Option<QuadSurd> {
    assert!(n >= 1);
    let k = k.rem_euclid(n as i64) as u64;
    let g = k.gcd(&n);
    let (k, n) = (k / g, n / g);
    let half = |p, q| QuadSurd::from_ratio(p, q);
    let surd = |p: i64, q: i64, r: i64, s: i64, c: u64| {
        QuadSurd::new(Rational::new(p.into(), q.into()), Rational::new(r.into(), s.into()), c).unwrap()
    };
    let candidates: Vec<QuadSurd> = match n {
        1 => vec![QuadSurd::one()],
        2 => vec![-QuadSurd::one()],
        3 => vec![half(-1, 2)],
        4 => vec![QuadSurd::zero()],
        6 => vec![half(1, 2)],
        5 => vec![surd(-1, 4, 1, 4, 5), surd(-1, 4, -1, 4, 5)],
        10 => vec![surd(1, 4, 1, 4, 5), surd(1, 4, -1, 4, 5)],
        8 => vec![surd(0, 1, 1, 2, 2), surd(0, 1, -1, 2, 2)],
        12 => vec![surd(0, 1, 1, 2, 3), surd(0, 1, -1, 2, 3)],
        _ => return None,
    };
    let target = (2.0 * PI * k as f64 / n as f64).cos();
    candidates.into_iter().min_by(|x, y| (x.to_f64() - target).abs().total_cmp(&(y.to_f64() - target).abs()))
}

/// Product of the polynomials in `factor_unity(q)`.
pub fn product_of_factors(factors: &[(u64, IntPolynomial)]) -> IntPolynomial {
    factors.iter().fold(IntPolynomial::one(), |acc, (_, p)| &acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_index_cyclotomics() {
        assert_eq!(cyclotomic(1), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(4), IntPolynomial::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(12), IntPolynomial::from_i64(&[1, 0, -1, 0, 1]));
        // Φ₁₀₅ is the first with a coefficient outside {−1, 0, 1}
        assert!(cyclotomic(105).coeffs().iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn phi_values() {
        let expect = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (n, &e) in (1..=12).zip(expect.iter()) {
            assert_eq!(euler_phi(n), e, "φ({n})");
        }
    }

    #[test]
    fn totient_preimages() {
        assert_eq!(totient_preimage(1), vec![1, 2]);
        assert_eq!(totient_preimage(2), vec![3, 4, 6]);
        assert_eq!(totient_preimage(4), vec![5, 8, 10, 12]);
    }

    #[test]
    fn exact_cosine_table() {
        for n in [1u64, 2, 3, 4, 5, 6, 8, 10, 12] {
            for k in 0..n as i64 {
                let c = cos_two_pi_fraction(k, n).unwrap();
                let expect = (2.0 * PI * k as f64 / n as f64).cos();
                assert!((c.to_f64() - expect).abs() < 1e-14, "cos(2π·{k}/{n})");
            }
        }
        assert!(cos_two_pi_fraction(1, 7).is_none());
        assert!(cos_two_pi_fraction(2, 14).is_none());
        assert_eq!(cos_two_pi_fraction(7, 14).unwrap(), -QuadSurd::one());
    }
}
