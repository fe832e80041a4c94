//! Density of the group generated by two finite-order rotations of R³, and the
//! geodetic-angle exception table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angle::{classify_exact, classify_numeric_with, exact_cosine, AngleClass, AngleKind, NumericParams};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, QuadSurd, Rational};
use crate::matrix::RotationMatrix;
use crate::so3::{axis_angle, AxisAngle};

/// Two rotations and the angle between their axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrsContext {
    pub rot1: AxisAngle,
    pub rot2: AxisAngle,
    /// `α ∈ [0, π]`.
    pub separation: f64,
    pub separation_cos: Option<QuadSurd>,
    pub separation_class: AngleClass,
    /// `None` for infinite order.
    pub orders: (Option<u64>, Option<u64>),
}

fn order_of(r: &RotationMatrix, params: NumericParams) -> Result<Option<u64>> {
    let kind = match exact_cosine(r) {
        Some(c) => classify_exact(&c)?.kind,
        None => classify_numeric_with(axis_angle(r)?.angle, params).kind,
    };
    Ok(kind.rotation_order())
}

impl CrsContext {
    /// Context for two 3×3 rotations; exact orders and separation are used when available.
    pub fn from_rotations(r1: &RotationMatrix, r2: &RotationMatrix, params: NumericParams) -> Result<Self> {
        let (a1, a2) = (axis_angle(r1)?, axis_angle(r2)?);
        let dot: f64 = a1.axis.iter().zip(&a2.axis).map(|(x, y)| x * y).sum();
        let separation = dot.clamp(-1.0, 1.0).acos();
        let separation_cos = exact_axis_cos(r1, r2, dot);
        let separation_class = match &separation_cos {
            Some(c) => classify_exact(c)?,
            None => classify_numeric_with(separation, params),
        };
        let orders = (order_of(r1, params)?, order_of(r2, params)?);
        Ok(Self { rot1: a1, rot2: a2, separation, separation_cos, separation_class, orders })
    }
}

/// `⟨z₁, z₂⟩ / (‖z₁‖‖z₂‖)` on the antisymmetric parts, when it is a quadratic surd.
fn exact_axis_cos(r1: &RotationMatrix, r2: &RotationMatrix, sign_hint: f64) -> Option<QuadSurd> {
    let (e1, e2) = (r1.exact()?, r2.exact()?);
    let z = |e: &crate::matrix::ExactMatrix| -> Option<Vec<QuadSurd>> {
        [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| e[(i, j)].checked_sub(&e[(j, i)]).ok()).collect()
    };
    let (z1, z2) = (z(e1)?, z(e2)?);
    let dot = |a: &[QuadSurd], b: &[QuadSurd]| -> Option<QuadSurd> {
        a.iter().zip(b).try_fold(QuadSurd::from_int(0), |acc, (x, y)| acc.checked_add(&x.checked_mul(y).ok()?).ok())
    };
    let (n1, n2, d) = (dot(&z1, &z1)?, dot(&z2, &z2)?, dot(&z1, &z2)?);
    let (n1, n2) = (n1.to_rational()?, n2.to_rational()?);
    if n1 == Rational::from_integer(0.into()) || n2 == Rational::from_integer(0.into()) {
        return None;
    }
    // |z| = sin θ·|axis| up to sign, so cos α = ±d/√(n₁n₂)
    let root = QuadSurd::sqrt_of(&(n1 * n2)).ok()?;
    let c = d.checked_div(&root).ok()?;
    if (c.to_f64() - sign_hint).abs() < 1e-9 {
        Some(c)
    } else if (c.to_f64() + sign_hint).abs() < 1e-9 {
        Some(-c)
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrsException {
    /// (a) one rotation is the identity.
    Identity,
    /// (b) a half turn about an axis orthogonal to the other.
    HalfTurnOrthogonal,
    /// (c) both orders divide 4.
    OrdersDivideFour,
    /// The axes coincide, so the rotations commute.
    SharedAxis,
}

impl fmt::Display for CrsException {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrsException::Identity => "exception (a): a generator is the identity",
            CrsException::HalfTurnOrthogonal => "exception (b): order 2 with α = π/2",
            CrsException::OrdersDivideFour => "exception (c): both orders divide 4",
            CrsException::SharedAxis => "shared axis: the generators commute",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrsOutcome {
    pub dense: bool,
    pub exception: Option<CrsException>,
    pub certificate: String,
}

/// The finite-order, rational-separation density criterion on raw data.
pub fn crs_criterion(p: u64, q: u64, separation: AngleKind) -> Result<CrsOutcome> {
    let AngleKind::RationalPi { p: sa, q: sq } = separation else {
        return Err(Error::Precondition(format!("separation {separation} is not a rational multiple of π")));
    };
    if p == 0 || q == 0 {
        return Err(Error::Precondition("rotation orders must be positive".into()));
    }
    let exception = if p == 1 || q == 1 {
        Some(CrsException::Identity)
    } else if sa == 0 || (sa == 1 && sq == 1) {
        Some(CrsException::SharedAxis)
    } else if (p == 2 || q == 2) && (sa, sq) == (1, 2) {
        Some(CrsException::HalfTurnOrthogonal)
    } else if 4 % p == 0 && 4 % q == 0 {
        Some(CrsException::OrdersDivideFour)
    } else {
        None
    };
    let certificate = match exception {
        Some(e) => format!("orders ({p}, {q}), α = {separation}: {e}"),
        None => format!("orders ({p}, {q}), α = {separation}: no exception applies, dense in SO(3)"),
    };
    Ok(CrsOutcome { dense: exception.is_none(), exception, certificate })
}

pub fn crs_dense(ctx: &CrsContext) -> Result<CrsOutcome> {
    let (Some(p), Some(q)) = ctx.orders else {
        return Err(Error::Precondition("both rotations must have finite order".into()));
    };
    crs_criterion(p, q, ctx.separation_class.kind)
}

/// Reduced fractions `sin²α` that admit relations between finite-order rotations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct GeodeticTable {
    values: Vec<Rational>,
}

const SHIPPED: &str = include_str!("../../data/geodetic.txt");

impl GeodeticTable {
    pub fn shipped() -> Self {
        SHIPPED.parse().expect("shipped geodetic table parses")
    }

    pub fn new(values: Vec<Rational>) -> Result<Self> {
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        if let Some(v) = values.iter().find(|v| **v < zero || **v > one) {
            return Err(Error::Domain(format!("sin²α = {} outside [0, 1]", format_rational(v))));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.values.contains(v)
    }
}

impl Default for GeodeticTable {
    fn default() -> Self {
        Self::shipped()
    }
}

impl FromStr for GeodeticTable {
    type Err = Error;

    /// One fraction per line, `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut offset = 0;
        for (n, line) in text.split_inclusive('\n').enumerate() {
            let body = line.split('#').next().unwrap_or("");
            let token = body.trim();
            if !token.is_empty() {
                let start = offset + body.find(token).unwrap_or(0);
                let v = parse_rational(token).map_err(|e| Error::Parse {
                    offset: start,
                    message: format!("line {}: {e}", n + 1),
                })?;
                values.push(v);
            }
            offset += line.len();
        }
        Self::new(values)
    }
}

impl From<GeodeticTable> for Vec<String> {
    fn from(t: GeodeticTable) -> Self {
        t.values.iter().map(format_rational).collect()
    }
}

impl TryFrom<Vec<String>> for GeodeticTable {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)
    }
}

/// Whether `sin²α` is listed as supporting nontrivial relations.
pub fn geodetic_supports_relations(sin_sq_alpha: &Rational, table: &GeodeticTable) -> Result<bool> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if *sin_sq_alpha < zero || *sin_sq_alpha > one {
        return Err(Error::Domain(format!("sin²α = {} outside [0, 1]", format_rational(sin_sq_alpha))));
    }
    Ok(table.contains(sin_sq_alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn exceptions() {
        let half = AngleKind::rational(1, 2);
        assert_eq!(crs_criterion(1, 5, half).unwrap().exception, Some(CrsException::Identity));
        assert_eq!(crs_criterion(4, 4, half).unwrap().exception, Some(CrsException::OrdersDivideFour));
        assert_eq!(crs_criterion(2, 5, half).unwrap().exception, Some(CrsException::HalfTurnOrthogonal));
        assert!(crs_criterion(2, 5, AngleKind::rational(1, 3)).unwrap().dense);
        assert!(crs_criterion(5, 5, half).unwrap().dense);
        assert_eq!(crs_criterion(5, 5, AngleKind::rational(0, 1)).unwrap().exception, Some(CrsException::SharedAxis));
        assert!(matches!(crs_criterion(5, 5, AngleKind::IrrationalPi), Err(Error::Precondition(_))));
    }

    #[test]
    fn context_from_rotations() {
        let a = RotationMatrix::givens(3, 0, 1, 2.0 * PI / 5.0);
        let b = RotationMatrix::givens(3, 1, 2, 2.0 * PI / 5.0);
        let ctx = CrsContext::from_rotations(&a, &b, NumericParams::default()).unwrap();
        assert_eq!(ctx.orders, (Some(5), Some(5)));
        assert!((ctx.separation - PI / 2.0).abs() < 1e-12);
        assert!(crs_dense(&ctx).unwrap().dense);
        let c = RotationMatrix::givens(3, 0, 1, 1.0);
        let ctx = CrsContext::from_rotations(&c, &b, NumericParams::default()).unwrap();
        assert!(matches!(crs_dense(&ctx), Err(Error::Precondition(_))));
    }

    #[test]
    fn exact_separation() {
        let zero = QuadSurd::from_int(0);
        let one = QuadSurd::from_int(1);
        let a = RotationMatrix::givens_exact(3, 0, 1, &zero, &one).unwrap();
        let b = RotationMatrix::givens_exact(3, 1, 2, &zero, &one).unwrap();
        let ctx = CrsContext::from_rotations(&a, &b, NumericParams::default()).unwrap();
        assert_eq!(ctx.separation_cos, Some(zero));
        assert_eq!(ctx.orders, (Some(4), Some(4)));
        assert_eq!(crs_dense(&ctx).unwrap().exception, Some(CrsException::OrdersDivideFour));
    }

    #[test]
    fn geodetic_table() {
        let t = GeodeticTable::shipped();
        assert_eq!(t.values(), &[r(0, 1), r(1, 2), r(1, 1)]);
        assert!(!geodetic_supports_relations(&r(5, 9), &t).unwrap());
        assert!(geodetic_supports_relations(&r(0, 1), &t).unwrap());
        assert!(geodetic_supports_relations(&r(1, 1), &t).unwrap());
        assert!(geodetic_supports_relations(&r(3, 2), &t).is_err());
        let err = "0\n1/3\nfoo # bad\n".parse::<GeodeticTable>().unwrap_err();
        match err {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 6);
                assert!(message.starts_with("line 3"));
            }
            e => panic!("{e}"),
        }
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"["0","1/2","1"]"#);
        assert_eq!(serde_json::from_str::<GeodeticTable>(&json).unwrap(), t);
    }
}
