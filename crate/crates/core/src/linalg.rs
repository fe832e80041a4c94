//! Matrix exponential and logarithm on SO(N) for arbitrary N.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};
use crate::matrix::{RotationMatrix, SkewMatrix};

/// `exp(X)` by scaling and squaring with a Taylor core.
pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let norm = x.iter().map(|v| v.abs()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = x / 2f64.powi(squarings as i32);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=18 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn exp_skew(x: &SkewMatrix) -> RotationMatrix {
    RotationMatrix::from_float_unchecked(expm(x.matrix()))
}

/// Invariant planes of a rotation: `R = Q·T·Qᵀ` with 1×1 blocks (±1) and 2×2 blocks.
struct RotationBlocks {
    q: DMatrix<f64>,
    /// `(start, angle)`; the angle is signed so the block equals exp(angle · E_{start,start+1}).
    planes: Vec<(usize, f64)>,
    fixed: Vec<(usize, f64)>,
}

fn blocks(r: &DMatrix<f64>) -> Result<RotationBlocks> {
    let n = r.nrows();
    let schur = Schur::try_new(r.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Domain("real Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut planes = Vec::new();
    let mut fixed = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > 1e-13 {
            let c = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            let s = 0.5 * (t[(i, i + 1)] - t[(i + 1, i)]);
            planes.push((i, s.atan2(c)));
            i += 2;
        } else {
            fixed.push((i, t[(i, i)]));
            i += 1;
        }
    }
    Ok(RotationBlocks { q, planes, fixed })
}

/// Principal logarithm of a rotation; fails when an angle is within `1e-6` of π.
pub fn logm_rotation(r: &RotationMatrix) -> Result<SkewMatrix> {
    let n = r.dim();
    let b = blocks(r.matrix())?;
    if b.fixed.iter().any(|&(_, v)| v < 0.0) {
        return Err(Error::Branch("rotation has a −1 eigenvalue (angle π)".into()));
    }
    let mut l = DMatrix::zeros(n, n);
    for &(i, angle) in &b.planes {
        if PI - angle.abs() < 1e-6 {
            return Err(Error::Branch(format!("rotation angle {angle} is within 1e-6 of π")));
        }
        l[(i, i + 1)] = angle;
        l[(i + 1, i)] = -angle;
    }
    let x = &b.q * l * b.q.transpose();
    let x = (&x - x.transpose()) * 0.5;
    let err = (expm(&x) - r.matrix()).amax();
    if err > 1e-8 {
        return Err(Error::Domain(format!("logarithm failed to reproduce the rotation (error {err:e})")));
    }
    Ok(SkewMatrix::from_float_unchecked(x))
}

/// Rotation angles `φ_k ∈ [0, π]` of the invariant planes, padded with zeros to ⌊N/2⌋.
pub fn rotation_angles(r: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = r.nrows();
    match n {
        0 | 1 => return Ok(vec![]),
        2 => {
            let c = 0.5 * (r[(0, 0)] + r[(1, 1)]);
            let s = 0.5 * (r[(0, 1)] - r[(1, 0)]);
            return Ok(vec![s.abs().atan2(c)]);
        }
        3 => {
            let z = (r - r.transpose()) * 0.5;
            let s = (z[(0, 1)].powi(2) + z[(0, 2)].powi(2) + z[(1, 2)].powi(2)).sqrt();
            let c = 0.5 * (r.trace() - 1.0);
            return Ok(vec![s.atan2(c)]);
        }
        _ => {}
    }
    let b = blocks(r)?;
    let mut angles: Vec<f64> = b.planes.iter().map(|&(_, a)| a.abs()).collect();
    // pairs of −1 eigenvalues are planes rotated by π
    let minus = b.fixed.iter().filter(|&&(_, v)| v < 0.0).count();
    angles.extend(std::iter::repeat_n(PI, minus / 2));
    angles.resize(n / 2, 0.0);
    angles.sort_by(|a, b| b.total_cmp(a));
    Ok(angles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_block() {
        let e = SkewMatrix::basis(4, 1, 3).scale(0.8);
        let r = exp_skew(&e);
        let g = RotationMatrix::givens(4, 1, 3, 0.8);
        assert!(r.distance_max(&g) < 1e-14);
    }

    #[test]
    fn log_round_trip_in_so5() {
        let x = SkewMatrix::from_coords(5, &[0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.3, -0.6, 0.25]);
        let r = exp_skew(&x);
        let l = logm_rotation(&r).unwrap();
        assert!((l.matrix() - x.matrix()).amax() < 1e-10);
    }

    #[test]
    fn angles_of_disjoint_blocks() {
        let r = RotationMatrix::givens(4, 0, 1, 0.4).mul(&RotationMatrix::givens(4, 2, 3, 1.1));
        let a = rotation_angles(r.matrix()).unwrap();
        assert!((a[0] - 1.1).abs() < 1e-12 && (a[1] - 0.4).abs() < 1e-12);
    }
}
