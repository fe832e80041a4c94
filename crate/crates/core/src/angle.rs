//! Rational-multiple-of-π decisions for rotation angles, exact and numeric, and
//! spectral angles of orthogonal matrices.

use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{cos_two_pi_fraction, is_cyclotomic, min_poly_unit_complex, QuadSurd};
use crate::linalg::rotation_angles;
use crate::matrix::RotationMatrix;

/// Default largest denominator tried by [`classify_numeric`].
pub const DEFAULT_Q_MAX: u64 = 10_000;
/// Default acceptance distance `|θ/π − p/q|` for [`classify_numeric`].
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericParams {
    pub q_max: u64,
    pub tol: f64,
}

impl Default for NumericParams {
    fn default() -> Self {
        Self { q_max: DEFAULT_Q_MAX, tol: DEFAULT_TOL }
    }
}

/// `θ = pπ/q` with `gcd(p, q) = 1`, `0 ≤ p < 2q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngleKind {
    RationalPi { p: u64, q: u64 },
    IrrationalPi,
    Unknown,
}

impl AngleKind {
    /// Reduces `p/q` and folds it into `[0, 2)`.
    pub fn rational(p: i64, q: u64) -> Self {
        assert!(q > 0);
        let q2 = 2 * q as i64;
        let p = p.rem_euclid(q2) as u64;
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if p == 0 {
            AngleKind::RationalPi { p: 0, q: 1 }
        } else {
            AngleKind::RationalPi { p, q }
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, AngleKind::RationalPi { .. })
    }

    /// Order of the rotation by this angle; `None` unless rational.
    pub fn rotation_order(&self) -> Option<u64> {
        match *self {
            // e^{ipπ/q} has order 2q/gcd(p, 2q)
            AngleKind::RationalPi { p, q } => Some(2 * q / p.gcd(&(2 * q))),
            _ => None,
        }
    }
}

impl fmt::Display for AngleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleKind::RationalPi { p: 0, .. } => write!(f, "0"),
            AngleKind::RationalPi { p: 1, q: 1 } => write!(f, "π"),
            AngleKind::RationalPi { p, q: 1 } => write!(f, "{p}π"),
            AngleKind::RationalPi { p: 1, q } => write!(f, "π/{q}"),
            AngleKind::RationalPi { p, q } => write!(f, "{p}π/{q}"),
            AngleKind::IrrationalPi => write!(f, "irrational multiple of π"),
            AngleKind::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleClass {
    pub kind: AngleKind,
    pub certificate: String,
}

/// Exact classification of the angle `θ ∈ [0, π]` with the given cosine.
pub fn classify_exact(cos_theta: &QuadSurd) -> Result<AngleClass> {
    let mp = min_poly_unit_complex(cos_theta)?;
    match is_cyclotomic(&mp)? {
        Some(n) => {
            let k = (0..=n / 2)
                .filter(|k| k.gcd(&n) == 1 || n == 1)
                .find(|&k| cos_two_pi_fraction(k as i64, n).as_ref() == Some(cos_theta));
            match k {
                Some(k) => Ok(AngleClass {
                    kind: AngleKind::rational(2 * k as i64, n),
                    certificate: format!("minimal polynomial of e^(iθ) is {mp} = Φ_{n}; cos θ = cos(2π·{k}/{n})"),
                }),
                None => Ok(AngleClass {
                    kind: AngleKind::Unknown,
                    certificate: format!("{mp} = Φ_{n} but no primitive root matched cos θ = {cos_theta}"),
                }),
            }
        }
        None => {
            let why = if mp.to_int().is_none() {
                "has non-integer coefficients".to_string()
            } else {
                let d = mp.degree().unwrap_or(0);
                format!("matches no Φ_n with φ(n) = {d}")
            };
            Ok(AngleClass {
                kind: AngleKind::IrrationalPi,
                certificate: format!("minimal polynomial of e^(iθ) is {mp}, which {why}; not cyclotomic"),
            })
        }
    }
}

/// Continued-fraction test of `θ/π` (mod 2) against denominators up to `q_max`.
///
/// Never returns `IrrationalPi`.
pub fn classify_numeric(theta: f64, q_max: u64, tol: f64) -> AngleClass {
    let x = (theta / PI).rem_euclid(2.0);
    let (mut h0, mut h1) = (1i128, x.floor() as i128);
    let (mut k0, mut k1) = (0i128, 1i128);
    let mut frac = x - x.floor();
    let mut best = (f64::INFINITY, 0i128, 1i128);
    for _ in 0..64 {
        if k1 as u128 > q_max as u128 {
            break;
        }
        let err = (x - h1 as f64 / k1 as f64).abs();
        if err < best.0 {
            best = (err, h1, k1);
        }
        if err < tol {
            return AngleClass {
                kind: AngleKind::rational(h1 as i64, k1 as u64),
                certificate: format!("convergent {h1}/{k1} of θ/π = {x:.17} within {err:.3e} < {tol:e}"),
            };
        }
        if frac < 1e-300 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i128;
        (h0, h1) = (h1, a * h1 + h0);
        (k0, k1) = (k1, a * k1 + k0);
    }
    AngleClass {
        kind: AngleKind::Unknown,
        certificate: format!(
            "no convergent of θ/π = {x:.17} with q ≤ {q_max} within {tol:e} (best {}/{} at {:.3e})",
            best.1, best.2, best.0
        ),
    }
}

pub fn classify_numeric_with(theta: f64, params: NumericParams) -> AngleClass {
    classify_numeric(theta, params.q_max, params.tol)
}

/// Rotation angles of the invariant planes and the multiplicity of eigenvalue +1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumAngles {
    pub angles: Vec<f64>,
    pub fixed: usize,
}

/// Angles below this count as the eigenvalue +1.
pub const ZERO_ANGLE_TOL: f64 = 1e-9;

pub fn spectrum_angles(r: &RotationMatrix) -> Result<SpectrumAngles> {
    let angles = rotation_angles(r.matrix())?;
    let n = r.dim();
    let zero_pairs = angles.iter().filter(|a| **a < ZERO_ANGLE_TOL).count();
    Ok(SpectrumAngles { fixed: 2 * zero_pairs + n % 2, angles })
}

/// Outcome of a density test for the cyclic group generated by one rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Dense,
    NotDense,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub density: Density,
    pub angles: Vec<f64>,
    pub classes: Vec<AngleClass>,
}

/// Exact `cos θ` of a 2×2 or 3×3 exact rotation, from the trace.
pub fn exact_cosine(r: &RotationMatrix) -> Option<QuadSurd> {
    let e = r.exact()?;
    let tr = (0..r.dim()).try_fold(QuadSurd::from_int(0), |acc, i| acc.checked_add(&e[(i, i)]).ok())?;
    match r.dim() {
        2 => tr.checked_mul(&QuadSurd::from_ratio(1, 2)).ok(),
        3 => tr.checked_sub(&QuadSurd::from_int(1)).ok()?.checked_mul(&QuadSurd::from_ratio(1, 2)).ok(),
        _ => None,
    }
}

/// Whether every nonzero spectral angle of `R` is an irrational multiple of π.
pub fn dense_in_one_param(r: &RotationMatrix, params: NumericParams) -> Result<DensityCertificate> {
    let spec = spectrum_angles(r)?;
    if let Some(c) = exact_cosine(r) {
        let class = classify_exact(&c)?;
        let density = match class.kind {
            AngleKind::IrrationalPi => Density::Dense,
            AngleKind::RationalPi { .. } => Density::NotDense,
            AngleKind::Unknown => Density::Unknown,
        };
        return Ok(DensityCertificate { density, angles: spec.angles, classes: vec![class] });
    }
    let classes: Vec<AngleClass> = spec
        .angles
        .iter()
        .filter(|a| **a >= ZERO_ANGLE_TOL)
        .map(|&a| classify_numeric_with(a, params))
        .collect();
    let density = if classes.is_empty() || classes.iter().any(|c| c.kind.is_rational()) {
        Density::NotDense
    } else if classes.iter().all(|c| c.kind == AngleKind::IrrationalPi) {
        Density::Dense
    } else {
        Density::Unknown
    };
    Ok(DensityCertificate { density, angles: spec.angles, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_surd;

    #[test]
    fn exact_examples() {
        let c = classify_exact(&QuadSurd::from_ratio(1, 2)).unwrap();
        assert_eq!(c.kind, AngleKind::RationalPi { p: 1, q: 3 });
        assert!(c.certificate.contains("Φ_6"));
        let c = classify_exact(&QuadSurd::from_ratio(1, 3)).unwrap();
        assert_eq!(c.kind, AngleKind::IrrationalPi);
        let c = classify_exact(&parse_surd("(2*sqrt(2) - 1)/4").unwrap()).unwrap();
        assert_eq!(c.kind, AngleKind::IrrationalPi);
        let c = classify_exact(&parse_surd("-1/4 + sqrt(5)/4").unwrap()).unwrap();
        assert_eq!(c.kind, AngleKind::RationalPi { p: 2, q: 5 });
        assert_eq!(classify_exact(&QuadSurd::from_int(1)).unwrap().kind, AngleKind::RationalPi { p: 0, q: 1 });
        assert_eq!(classify_exact(&QuadSurd::from_int(-1)).unwrap().kind, AngleKind::RationalPi { p: 1, q: 1 });
        assert!(classify_exact(&QuadSurd::from_ratio(3, 2)).is_err());
    }

    #[test]
    fn numeric_examples() {
        let c = classify_numeric(PI / 3.0, 100, 1e-12);
        assert_eq!(c.kind, AngleKind::RationalPi { p: 1, q: 3 });
        let c = classify_numeric(0.75 * PI, DEFAULT_Q_MAX, DEFAULT_TOL);
        assert_eq!(c.kind, AngleKind::RationalPi { p: 3, q: 4 });
        assert_eq!(classify_numeric(1.0, 100_000, 1e-12).kind, AngleKind::Unknown);
        // 265381/833719 approximates 1/π to 8.8e-13
        assert_eq!(classify_numeric(1.0, 1_000_000, 1e-12).kind, AngleKind::RationalPi { p: 265381, q: 833719 });
        assert_eq!(classify_numeric(-PI / 2.0, 10, 1e-12).kind, AngleKind::RationalPi { p: 3, q: 2 });
        assert_eq!(classify_numeric(0.0, 10, 1e-12).kind, AngleKind::RationalPi { p: 0, q: 1 });
    }

    #[test]
    fn rotation_orders() {
        assert_eq!(AngleKind::rational(2, 5).rotation_order(), Some(5));
        assert_eq!(AngleKind::rational(1, 2).rotation_order(), Some(4));
        assert_eq!(AngleKind::rational(1, 1).rotation_order(), Some(2));
        assert_eq!(AngleKind::rational(0, 1).rotation_order(), Some(1));
        assert_eq!(AngleKind::rational(1, 5).rotation_order(), Some(10));
    }

    #[test]
    fn spectra() {
        let s = spectrum_angles(&RotationMatrix::givens(3, 0, 1, 0.6)).unwrap();
        assert!((s.angles[0] - 0.6).abs() < 1e-15);
        assert_eq!(s.fixed, 1);
        let s = spectrum_angles(&RotationMatrix::identity(4)).unwrap();
        assert_eq!(s.angles, vec![0.0, 0.0]);
        assert_eq!(s.fixed, 4);
        let r = RotationMatrix::givens(4, 0, 1, 0.6).mul(&RotationMatrix::givens(4, 2, 3, 0.6));
        let s = spectrum_angles(&r).unwrap();
        assert!(s.angles.iter().all(|a| (a - 0.6).abs() < 1e-12));
    }

    #[test]
    fn density_examples() {
        let r = RotationMatrix::givens(3, 0, 1, PI / 3.0);
        assert_eq!(dense_in_one_param(&r, NumericParams::default()).unwrap().density, Density::NotDense);
        let third = QuadSurd::from_ratio(1, 3);
        let sin = parse_surd("2*sqrt(2)/3").unwrap();
        let r = RotationMatrix::givens_exact(3, 0, 1, &third, &sin).unwrap();
        assert_eq!(dense_in_one_param(&r, NumericParams::default()).unwrap().density, Density::Dense);
        let r = RotationMatrix::givens(3, 0, 1, 1.0);
        assert_eq!(dense_in_one_param(&r, NumericParams::default()).unwrap().density, Density::Unknown);
    }
}
