//! Exact arithmetic over ℚ and real quadratic fields, integer and rational
//! polynomials, and cyclotomic machinery.

mod cyclotomic;
mod parse;
mod poly;
mod surd;

pub use cyclotomic::{
    cos_two_pi_fraction, cyclotomic, divisors, euler_phi, factor_unity, is_cyclotomic,
    min_poly_unit_complex, product_of_factors, totient_preimage,
};
pub use parse::{parse_rational, parse_surd};
pub use poly::{irreducible_factors, IntPolynomial, RatPolynomial};
pub use surd::{format_rational, squarefree_split, QuadSurd, MAX_RADICAND};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;
