//! Skew-symmetric and special-orthogonal matrices with optional exact mirrors.

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::QuadSurd;

pub type ExactMatrix = DMatrix<QuadSurd>;

/// Tolerance on `x[i][j] + x[j][i]` for floating skew input.
pub const SKEW_TOL: f64 = 1e-12;
/// Tolerance on `‖RᵀR − I‖_max` and `|det R − 1|` for floating rotations.
pub const ORTHO_TOL: f64 = 1e-10;

/// An element of so(N).
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    float: DMatrix<f64>,
    exact: Option<ExactMatrix>,
}

/// An element of SO(N).
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    float: DMatrix<f64>,
    exact: Option<ExactMatrix>,
}

/// Number of independent entries of an N×N skew matrix.
pub fn so_dim(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// Index pairs `(i, j)`, `i < j`, in the coordinate order used throughout.
pub fn coordinate_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

pub fn exact_to_float(m: &ExactMatrix) -> DMatrix<f64> {
    m.map(|x| x.to_f64())
}

/// Exact product; `None` when entries live in different quadratic fields.
pub fn exact_mul(a: &ExactMatrix, b: &ExactMatrix) -> Option<ExactMatrix> {
    if a.ncols() != b.nrows() {
        return None;
    }
    let mut out = ExactMatrix::from_element(a.nrows(), b.ncols(), QuadSurd::zero());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut acc = QuadSurd::zero();
            for k in 0..a.ncols() {
                if a[(i, k)].is_zero() || b[(k, j)].is_zero() {
                    continue;
                }
                acc = acc.checked_add(&a[(i, k)].checked_mul(&b[(k, j)]).ok()?).ok()?;
            }
            out[(i, j)] = acc;
        }
    }
    Some(out)
}

pub fn exact_sub(a: &ExactMatrix, b: &ExactMatrix) -> Option<ExactMatrix> {
    let mut out = a.clone();
    for (o, y) in out.iter_mut().zip(b.iter()) {
        *o = o.checked_sub(y).ok()?;
    }
    Some(out)
}

pub fn exact_add(a: &ExactMatrix, b: &ExactMatrix) -> Option<ExactMatrix> {
    let mut out = a.clone();
    for (o, y) in out.iter_mut().zip(b.iter()) {
        *o = o.checked_add(y).ok()?;
    }
    Some(out)
}

pub fn exact_scale(a: &ExactMatrix, s: &QuadSurd) -> Option<ExactMatrix> {
    let mut out = a.clone();
    for o in out.iter_mut() {
        *o = o.checked_mul(s).ok()?;
    }
    Some(out)
}

pub fn exact_identity(n: usize) -> ExactMatrix {
    ExactMatrix::from_fn(n, n, |i, j| if i == j { QuadSurd::one() } else { QuadSurd::zero() })
}

/// Exact determinant by Gaussian elimination over the field.
pub fn exact_det(m: &ExactMatrix) -> Option<QuadSurd> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = QuadSurd::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[(r, col)].is_zero());
        let Some(p) = pivot else {
            return Some(QuadSurd::zero());
        };
        if p != col {
            a.swap_rows(p, col);
            det = -det;
        }
        let pv = a[(col, col)].clone();
        det = det.checked_mul(&pv).ok()?;
        let inv = pv.checked_inv().ok()?;
        for r in col + 1..n {
            if a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].checked_mul(&inv).ok()?;
            for c in col..n {
                let t = f.checked_mul(&a[(col, c)]).ok()?;
                a[(r, c)] = a[(r, c)].checked_sub(&t).ok()?;
            }
        }
    }
    Some(det)
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension { expected: m.nrows(), found: m.ncols() });
    }
    Ok(m.nrows())
}

impl SkewMatrix {
    /// Accepts a floating matrix that is skew to within [`SKEW_TOL`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = check_square(&m)?;
        for i in 0..n {
            for j in 0..n {
                let s = m[(i, j)] + m[(j, i)];
                if s.abs() > SKEW_TOL {
                    return Err(Error::Domain(format!("entry ({i},{j}) violates skew symmetry by {s:e}")));
                }
            }
        }
        let float = (&m - m.transpose()) * 0.5;
        Ok(Self { float, exact: None })
    }

    pub fn from_exact(e: ExactMatrix) -> Result<Self> {
        let n = e.nrows();
        if e.ncols() != n {
            return Err(Error::Dimension { expected: n, found: e.ncols() });
        }
        for i in 0..n {
            for j in 0..n {
                if !(&e[(i, j)] + &e[(j, i)]).is_zero() {
                    return Err(Error::Domain(format!("exact entry ({i},{j}) is not skew")));
                }
            }
        }
        Ok(Self { float: exact_to_float(&e), exact: Some(e) })
    }

    pub(crate) fn from_parts(float: DMatrix<f64>, exact: Option<ExactMatrix>) -> Self {
        Self { float, exact }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            float: DMatrix::zeros(n, n),
            exact: Some(ExactMatrix::from_element(n, n, QuadSurd::zero())),
        }
    }

    /// `E_kl = |k⟩⟨l| − |l⟩⟨k|` (0-based modes).
    pub fn basis(n: usize, k: usize, l: usize) -> Self {
        assert!(k < n && l < n && k != l, "basis indices out of range");
        let mut e = ExactMatrix::from_element(n, n, QuadSurd::zero());
        e[(k, l)] = QuadSurd::one();
        e[(l, k)] = -QuadSurd::one();
        Self { float: exact_to_float(&e), exact: Some(e) }
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn from_coords(n: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), so_dim(n));
        let mut m = DMatrix::zeros(n, n);
        for (&(i, j), &v) in coordinate_pairs(n).iter().zip(coords) {
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
        Self { float: m, exact: None }
    }

    pub fn from_exact_coords(n: usize, coords: &[QuadSurd]) -> Self {
        assert_eq!(coords.len(), so_dim(n));
        let mut m = ExactMatrix::from_element(n, n, QuadSurd::zero());
        for (&(i, j), v) in coordinate_pairs(n).iter().zip(coords) {
            m[(i, j)] = v.clone();
            m[(j, i)] = -v.clone();
        }
        Self { float: exact_to_float(&m), exact: Some(m) }
    }

    pub(crate) fn from_float_unchecked(float: DMatrix<f64>) -> Self {
        Self { float, exact: None }
    }

    /// Upper-triangle entries `x[i][j]`, `i < j`, row by row.
    pub fn coords(&self) -> Vec<f64> {
        coordinate_pairs(self.dim()).iter().map(|&(i, j)| self.float[(i, j)]).collect()
    }

    pub fn exact_coords(&self) -> Option<Vec<QuadSurd>> {
        let e = self.exact.as_ref()?;
        Some(coordinate_pairs(self.dim()).iter().map(|&(i, j)| e[(i, j)].clone()).collect())
    }

    pub fn dim(&self) -> usize {
        self.float.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.float
    }

    pub fn exact(&self) -> Option<&ExactMatrix> {
        self.exact.as_ref()
    }

    pub fn drop_exact(mut self) -> Self {
        self.exact = None;
        self
    }

    /// `⟨A, B⟩ = ½ tr(AᵀB)`.
    pub fn inner(&self, other: &SkewMatrix) -> f64 {
        0.5 * self.float.component_mul(&other.float).sum()
    }

    /// `‖A‖ = √(½ tr(AᵀA))`.
    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> SkewMatrix {
        Self { float: &self.float * s, exact: None }
    }

    pub fn scale_exact(&self, s: &QuadSurd) -> SkewMatrix {
        let exact = self.exact.as_ref().and_then(|e| exact_scale(e, s));
        Self { float: &self.float * s.to_f64(), exact }
    }

    pub fn add(&self, other: &SkewMatrix) -> SkewMatrix {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => exact_add(a, b),
            _ => None,
        };
        Self { float: &self.float + &other.float, exact }
    }

    pub fn sub(&self, other: &SkewMatrix) -> SkewMatrix {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => exact_sub(a, b),
            _ => None,
        };
        Self { float: &self.float - &other.float, exact }
    }

    /// `XY − YX` in floating arithmetic, and exactly when both mirrors exist.
    pub fn bracket(&self, other: &SkewMatrix) -> Result<SkewMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: other.dim() });
        }
        let float = &self.float * &other.float - &other.float * &self.float;
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => exact_mul(a, b).zip(exact_mul(b, a)).and_then(|(ab, ba)| exact_sub(&ab, &ba)),
            _ => None,
        };
        Ok(Self { float, exact })
    }

    /// Conjugation `PᵀXP` by the permutation matrix with `P e_j = e_{σ(j)}`.
    pub fn permuted(&self, sigma: &[usize]) -> SkewMatrix {
        let n = self.dim();
        let float = DMatrix::from_fn(n, n, |i, j| self.float[(sigma[i], sigma[j])]);
        let exact = self.exact.as_ref().map(|e| ExactMatrix::from_fn(n, n, |i, j| e[(sigma[i], sigma[j])].clone()));
        Self { float, exact }
    }
}

impl RotationMatrix {
    /// Accepts a floating matrix in SO(N) to within [`ORTHO_TOL`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = check_square(&m)?;
        let dev = (m.transpose() * &m - DMatrix::<f64>::identity(n, n)).amax();
        if dev > ORTHO_TOL {
            return Err(Error::Domain(format!("matrix is not orthogonal: ‖RᵀR − I‖ = {dev:e}")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ORTHO_TOL {
            return Err(Error::Domain(format!(
                "determinant {det:.6} ≠ 1: beamsplitters are taken with determinant one (SO(m))"
            )));
        }
        Ok(Self { float: m, exact: None })
    }

    pub fn from_exact(e: ExactMatrix) -> Result<Self> {
        let n = e.nrows();
        if e.ncols() != n {
            return Err(Error::Dimension { expected: n, found: e.ncols() });
        }
        let gram = exact_mul(&e.transpose(), &e).ok_or_else(|| Error::Domain("mixed quadratic fields".into()))?;
        if gram != exact_identity(n) {
            return Err(Error::Domain("exact matrix is not orthogonal".into()));
        }
        let det = exact_det(&e).ok_or_else(|| Error::Domain("mixed quadratic fields".into()))?;
        if !det.is_one() {
            return Err(Error::Domain(format!(
                "determinant {det} ≠ 1: beamsplitters are taken with determinant one (SO(m))"
            )));
        }
        Ok(Self { float: exact_to_float(&e), exact: Some(e) })
    }

    pub(crate) fn from_float_unchecked(float: DMatrix<f64>) -> Self {
        Self { float, exact: None }
    }

    pub(crate) fn from_parts(float: DMatrix<f64>, exact: Option<ExactMatrix>) -> Self {
        Self { float, exact }
    }

    pub fn identity(n: usize) -> Self {
        Self { float: DMatrix::identity(n, n), exact: Some(exact_identity(n)) }
    }

    /// `O_kl(θ) = exp(θ E_kl)`: `cos θ` at `(k,k),(l,l)`, `sin θ` at `(k,l)`, `−sin θ` at `(l,k)`.
    pub fn givens(n: usize, k: usize, l: usize, theta: f64) -> Self {
        assert!(k < n && l < n && k != l, "givens indices out of range");
        let mut m = DMatrix::identity(n, n);
        let (s, c) = theta.sin_cos();
        m[(k, k)] = c;
        m[(l, l)] = c;
        m[(k, l)] = s;
        m[(l, k)] = -s;
        Self { float: m, exact: None }
    }

    /// Exact `O_kl` from exact `cos θ`, `sin θ` (assumed to satisfy `c² + s² = 1`).
    pub fn givens_exact(n: usize, k: usize, l: usize, cos: &QuadSurd, sin: &QuadSurd) -> Result<Self> {
        let mut e = exact_identity(n);
        e[(k, k)] = cos.clone();
        e[(l, l)] = cos.clone();
        e[(k, l)] = sin.clone();
        e[(l, k)] = -sin.clone();
        Self::from_exact(e)
    }

    pub fn dim(&self) -> usize {
        self.float.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.float
    }

    pub fn exact(&self) -> Option<&ExactMatrix> {
        self.exact.as_ref()
    }

    pub fn drop_exact(mut self) -> Self {
        self.exact = None;
        self
    }

    pub fn mul(&self, other: &RotationMatrix) -> RotationMatrix {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => exact_mul(a, b),
            _ => None,
        };
        Self { float: &self.float * &other.float, exact }
    }

    pub fn inverse(&self) -> RotationMatrix {
        Self { float: self.float.transpose(), exact: self.exact.as_ref().map(|e| e.transpose()) }
    }

    pub fn pow(&self, e: i64) -> RotationMatrix {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = RotationMatrix::identity(self.dim());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        match &self.exact {
            Some(e) => *e == exact_identity(self.dim()),
            None => (&self.float - DMatrix::<f64>::identity(self.dim(), self.dim())).amax() <= tol,
        }
    }

    /// Max-norm distance to another rotation.
    pub fn distance_max(&self, other: &RotationMatrix) -> f64 {
        (&self.float - &other.float).amax()
    }

    /// Conjugation `PᵀOP` by the permutation matrix with `P e_j = e_{σ(j)}`.
    pub fn permuted(&self, sigma: &[usize]) -> RotationMatrix {
        let n = self.dim();
        let float = DMatrix::from_fn(n, n, |i, j| self.float[(sigma[i], sigma[j])]);
        let exact = self.exact.as_ref().map(|e| ExactMatrix::from_fn(n, n, |i, j| e[(sigma[i], sigma[j])].clone()));
        Self { float, exact }
    }

    /// Symmetric and antisymmetric parts `(R + Rᵀ)/2`, `(R − Rᵀ)/2`.
    pub fn parts(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let t = self.float.transpose();
        ((&self.float + &t) * 0.5, (&self.float - &t) * 0.5)
    }
}

/// A serializable row-major snapshot of a floating matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRows(pub Vec<Vec<f64>>);

impl From<&DMatrix<f64>> for MatrixRows {
    fn from(m: &DMatrix<f64>) -> Self {
        MatrixRows((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
    }
}

impl MatrixRows {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.0.len();
        let m = self.0.first().map_or(0, Vec::len);
        DMatrix::from_fn(n, m, |i, j| self.0[i][j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_convention() {
        let o = RotationMatrix::givens(2, 0, 1, 0.3);
        assert!((o.matrix()[(0, 1)] - 0.3f64.sin()).abs() < 1e-16);
        assert!((o.matrix()[(1, 0)] + 0.3f64.sin()).abs() < 1e-16);
    }

    #[test]
    fn rejects_reflections() {
        let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let err = RotationMatrix::new(r).unwrap_err();
        assert!(err.to_string().contains("determinant one"));
        let mut e = exact_identity(3);
        e[(2, 2)] = -QuadSurd::one();
        assert!(RotationMatrix::from_exact(e).is_err());
    }

    #[test]
    fn exact_bracket_of_basis() {
        let e12 = SkewMatrix::basis(3, 0, 1);
        let e13 = SkewMatrix::basis(3, 0, 2);
        let e23 = SkewMatrix::basis(3, 1, 2);
        let b = e12.bracket(&e13).unwrap();
        assert_eq!(b.exact().unwrap(), &(-e23.exact().unwrap().clone()));
    }

    #[test]
    fn exact_determinant() {
        let s = QuadSurd::sqrt_of(&crate::exact::Rational::new(1.into(), 2.into())).unwrap();
        let o = RotationMatrix::givens_exact(3, 0, 1, &s, &s).unwrap();
        assert_eq!(exact_det(o.exact().unwrap()).unwrap(), QuadSurd::one());
    }
}
