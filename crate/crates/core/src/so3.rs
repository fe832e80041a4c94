//! Exponential, logarithm, axis–angle extraction and the closed-form BCH product on so(3).

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{RotationMatrix, SkewMatrix};

/// Angles closer than this to π are rejected by the logarithm.
pub const BRANCH_MARGIN: f64 = 1e-6;
/// Tolerance on `tr(XᵀY)` for the orthogonal BCH formula.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// A rotation axis with first nonzero component positive and an angle in `[0, π]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    pub angle: f64,
}

fn require3(n: usize) -> Result<()> {
    if n != 3 {
        return Err(Error::Dimension { expected: 3, found: n });
    }
    Ok(())
}

pub(crate) fn to_m3(m: &DMatrix<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

pub(crate) fn from_m3(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}

/// Skew matrix `ω̂` with `ω̂ v = ω × v`.
pub fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`hat`] on the skew part.
pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(0.5 * (m[(2, 1)] - m[(1, 2)]), 0.5 * (m[(0, 2)] - m[(2, 0)]), 0.5 * (m[(1, 0)] - m[(0, 1)]))
}

/// Rodrigues: `I + (sin θ/θ) X + (2 sin²(θ/2)/θ²) X²`, `θ = ‖X‖`.
pub fn exp_so3(x: &SkewMatrix) -> Result<RotationMatrix> {
    require3(x.dim())?;
    Ok(RotationMatrix::from_float_unchecked(from_m3(&exp_m3(&to_m3(x.matrix())))))
}

pub(crate) fn exp_m3(x: &Matrix3<f64>) -> Matrix3<f64> {
    let theta = (x[(0, 1)].powi(2) + x[(0, 2)].powi(2) + x[(1, 2)].powi(2)).sqrt();
    let (a, b) = if theta < 1e-4 {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        let h = (0.5 * theta).sin();
        (theta.sin() / theta, 2.0 * h * h / (theta * theta))
    };
    Matrix3::identity() + x * a + x * x * b
}

/// `(θ/sin θ)·Z` with `Z = (R − Rᵀ)/2` and `θ = atan2(‖Z‖, (tr R − 1)/2)`.
///
/// For angles up to π/2 this is `arcsin(‖Z‖)/‖Z‖ · Z`; past π/2 the trace selects
/// the obtuse branch.
pub fn log_so3(r: &RotationMatrix) -> Result<SkewMatrix> {
    require3(r.dim())?;
    Ok(SkewMatrix::from_float_unchecked(from_m3(&log_m3(&to_m3(r.matrix()))?)))
}

pub(crate) fn log_m3(r: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let z = (r - r.transpose()) * 0.5;
    let s = (z[(0, 1)].powi(2) + z[(0, 2)].powi(2) + z[(1, 2)].powi(2)).sqrt();
    let c = 0.5 * (r.trace() - 1.0);
    let theta = s.atan2(c);
    if PI - theta < BRANCH_MARGIN {
        return Err(Error::Branch(format!("rotation angle {theta} is within {BRANCH_MARGIN:e} of π")));
    }
    let ratio = if s < 1e-8 { 1.0 + theta * theta / 6.0 } else { theta / s };
    Ok(z * ratio)
}

/// Angle `arccos((tr R − 1)/2)` and the oriented unit kernel vector of `R − I`.
pub fn axis_angle(r: &RotationMatrix) -> Result<AxisAngle> {
    require3(r.dim())?;
    Ok(axis_angle_m3(&to_m3(r.matrix())))
}

pub(crate) fn axis_angle_m3(r: &Matrix3<f64>) -> AxisAngle {
    let angle = (0.5 * (r.trace() - 1.0)).clamp(-1.0, 1.0).acos();
    if angle == 0.0 {
        return AxisAngle { axis: [1.0, 0.0, 0.0], angle };
    }
    let w = vee(r);
    let mut axis = if angle < PI / 2.0 && w.norm() > 1e-300 {
        w.normalize()
    } else {
        let m = r - Matrix3::identity();
        let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
        let best = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| rows[i].cross(&rows[j]))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        if best.norm() < 1e-300 {
            return AxisAngle { axis: [1.0, 0.0, 0.0], angle: 0.0 };
        }
        best.normalize()
    };
    if let Some(first) = axis.iter().find(|v| v.abs() > 1e-12) {
        if *first < 0.0 {
            axis = -axis;
        }
    }
    AxisAngle { axis: [axis.x, axis.y, axis.z], angle }
}

/// The rotation by `angle` about `axis` (right-hand rule for `ω̂`).
pub fn rotation_about(axis: &[f64; 3], angle: f64) -> RotationMatrix {
    let w = Vector3::from_column_slice(axis).normalize() * angle;
    RotationMatrix::from_float_unchecked(from_m3(&exp_m3(&hat(&w))))
}

struct BchData {
    theta: f64,
    phi: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

fn bch_data(x: &SkewMatrix, y: &SkewMatrix) -> Result<BchData> {
    require3(x.dim())?;
    require3(y.dim())?;
    let theta = x.norm();
    let phi = y.norm();
    let ip = 2.0 * x.inner(y);
    if ip.abs() > ORTHOGONALITY_TOL * (1.0f64).max(theta * phi) {
        return Err(Error::Orthogonality(ip));
    }
    let (ch, cp) = ((0.5 * theta).cos(), (0.5 * phi).cos());
    let a = theta.sin() * cp * cp;
    let b = phi.sin() * ch * ch;
    let c = 0.5 * theta.sin() * phi.sin();
    let d = (a * a + b * b + c * c).sqrt();
    Ok(BchData { theta, phi, a, b, c, d })
}

fn bch_combine(x: &SkewMatrix, y: &SkewMatrix, k: &BchData, scale: f64) -> Result<SkewMatrix> {
    let xy = x.bracket(y)?;
    let mut out = DMatrix::zeros(3, 3);
    if k.theta > 0.0 {
        out += x.matrix() * (scale * k.a / k.theta);
    }
    if k.phi > 0.0 {
        out += y.matrix() * (scale * k.b / k.phi);
    }
    if k.theta > 0.0 && k.phi > 0.0 {
        out += xy.matrix() * (scale * k.c / (k.theta * k.phi));
    }
    Ok(SkewMatrix::from_float_unchecked(out))
}

/// `log(exp(X) exp(Y))` for orthogonal `X`, `Y` in so(3).
///
/// Returns `(ψ/d)(a X/θ + b Y/φ + c [X,Y]/(θφ))` where ψ is the rotation angle of
/// the product, `cos ψ = 2cos²(θ/2)cos²(φ/2) − 1`, and `d = sin ψ`.
pub fn bch_orthogonal(x: &SkewMatrix, y: &SkewMatrix) -> Result<SkewMatrix> {
    let k = bch_data(x, y)?;
    if k.theta == 0.0 {
        return Ok(y.clone());
    }
    if k.phi == 0.0 {
        return Ok(x.clone());
    }
    let hc = (0.5 * k.theta).cos() * (0.5 * k.phi).cos();
    let psi = k.d.atan2(2.0 * hc * hc - 1.0);
    if PI - psi < BRANCH_MARGIN {
        return Err(Error::Branch(format!("product angle {psi} is within {BRANCH_MARGIN:e} of π")));
    }
    let scale = if k.d < 1e-8 { 1.0 + psi * psi / 6.0 } else { psi / k.d };
    bch_combine(x, y, &k, scale)
}

/// The same combination with `arcsin(d)/d` as prefactor, valid while the product angle is ≤ π/2.
pub fn bch_orthogonal_principal(x: &SkewMatrix, y: &SkewMatrix) -> Result<SkewMatrix> {
    let k = bch_data(x, y)?;
    if k.d >= 1.0 - 1e-12 {
        return Err(Error::Branch(format!("d = {} leaves the principal arcsin domain", k.d)));
    }
    let scale = if k.d < 1e-8 { 1.0 } else { k.d.asin() / k.d };
    bch_combine(x, y, &k, scale)
}

/// Rotation angle `α ∈ [0, π]` of `O₁₂(θ)·O₂₃(θ)`: `2cos α = 2cos θ + cos²θ − 1`.
pub fn product_angle(theta: f64) -> f64 {
    let c = theta.cos();
    (c + 0.5 * (c * c - 1.0)).clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_zero_and_block() {
        let r = exp_so3(&SkewMatrix::zero(3)).unwrap();
        assert!(r.is_identity(0.0));
        let x = SkewMatrix::basis(3, 0, 1).scale(0.9);
        let r = exp_so3(&x).unwrap();
        assert!(r.distance_max(&RotationMatrix::givens(3, 0, 1, 0.9)) < 1e-15);
        assert!(exp_so3(&SkewMatrix::zero(4)).is_err());
    }

    #[test]
    fn log_examples() {
        let l = log_so3(&RotationMatrix::identity(3)).unwrap();
        assert_eq!(l.norm(), 0.0);
        let l = log_so3(&RotationMatrix::givens(3, 0, 1, 0.7)).unwrap();
        assert!((l.matrix() - SkewMatrix::basis(3, 0, 1).scale(0.7).matrix()).amax() < 1e-15);
        let l = log_so3(&RotationMatrix::givens(3, 0, 2, 2.5)).unwrap();
        assert!((l.norm() - 2.5).abs() < 1e-14);
        assert!(matches!(log_so3(&RotationMatrix::givens(3, 1, 2, PI)), Err(Error::Branch(_))));
    }

    #[test]
    fn axis_angle_examples() {
        let aa = axis_angle(&RotationMatrix::identity(3)).unwrap();
        assert_eq!(aa, AxisAngle { axis: [1.0, 0.0, 0.0], angle: 0.0 });
        for theta in [0.3, 1.5, 2.9, PI] {
            let aa = axis_angle(&RotationMatrix::givens(3, 1, 2, theta)).unwrap();
            assert!((aa.angle - theta).abs() < 1e-12);
            assert!((aa.axis[0] - 1.0).abs() < 1e-12, "{aa:?}");
        }
    }

    #[test]
    fn bch_trivial_and_listed_case() {
        let x = SkewMatrix::basis(3, 0, 1).scale(0.4);
        let z = SkewMatrix::zero(3);
        assert_eq!(bch_orthogonal(&x, &z).unwrap(), x);
        let theta: f64 = 0.8;
        let x = SkewMatrix::basis(3, 0, 1).scale(theta);
        let y = SkewMatrix::basis(3, 0, 2).scale(theta);
        let got = bch_orthogonal_principal(&x, &y).unwrap();
        let c2 = (0.5 * theta).cos().powi(2);
        let h = 0.5 * theta.sin();
        let d = theta.sin() * (2.0 * c2 * c2 + 0.25 * theta.sin().powi(2)).sqrt();
        let pre = d.asin() / (d * theta) * theta.sin();
        let e23 = SkewMatrix::basis(3, 1, 2);
        let want = x.scale(pre * c2).add(&y.scale(pre * c2)).sub(&e23.scale(pre * h * theta));
        assert!((got.matrix() - want.matrix()).amax() < 1e-14);
        assert!(bch_orthogonal(&x, &x).is_err());
    }

    #[test]
    fn product_angle_examples() {
        assert_eq!(product_angle(0.0), 0.0);
        assert!((product_angle(PI / 2.0) - 2.0 * PI / 3.0).abs() < 1e-15);
        let want = ((2.0 * 2f64.sqrt() - 1.0) / 4.0).acos();
        assert!((product_angle(PI / 4.0) - want).abs() < 1e-15);
    }
}
