//! Commutator closure in so(N), exact and floating, and the change-of-basis
//! determinants behind the generating-set constructions.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::QuadSurd;
use crate::matrix::{so_dim, MatrixRows, RotationMatrix, SkewMatrix};
use crate::so3;

/// Residual threshold, relative to generator norms, for accepting a new direction.
pub const RANK_TOL: f64 = 1e-8;

pub fn commutator(x: &SkewMatrix, y: &SkewMatrix) -> Result<SkewMatrix> {
    x.bracket(y)
}

/// An orthonormal basis (under `½ tr(AᵀB)`) of a Lie subalgebra of so(N).
#[derive(Clone, Debug)]
pub struct LieSpan {
    n: usize,
    basis: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl LieSpan {
    pub fn empty(n: usize) -> Self {
        Self { n, basis: Vec::new() }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<SkewMatrix> {
        self.basis.iter().map(|c| SkewMatrix::from_coords(self.n, c)).collect()
    }

    pub fn basis_coords(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == so_dim(self.n)
    }

    /// Component of `v` orthogonal to the span (modified Gram–Schmidt, applied twice).
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for b in &self.basis {
                let p = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * bi;
                }
            }
        }
        r
    }

    /// Norm of the part of `x` outside the span.
    pub fn residual_norm(&self, x: &SkewMatrix) -> f64 {
        norm(&self.residual(&x.coords()))
    }

    pub fn contains(&self, x: &SkewMatrix, tol: f64) -> bool {
        self.residual_norm(x) <= tol * x.norm().max(1.0)
    }

    fn insert(&mut self, v: &[f64], scale: f64, tol: f64) -> bool {
        if self.is_full() || scale == 0.0 {
            return false;
        }
        let r = self.residual(v);
        let rn = norm(&r);
        if rn > tol * scale {
            self.basis.push(r.iter().map(|x| x / rn).collect());
            true
        } else {
            false
        }
    }
}

/// Lie closure with the default [`RANK_TOL`].
pub fn closure(generators: &[SkewMatrix]) -> Result<LieSpan> {
    closure_with_tol(generators, RANK_TOL)
}

pub fn closure_with_tol(generators: &[SkewMatrix], rank_tol: f64) -> Result<LieSpan> {
    let first = generators.first().ok_or_else(|| Error::Domain("closure needs at least one generator".into()))?;
    let n = first.dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != n) {
        return Err(Error::Dimension { expected: n, found: g.dim() });
    }
    let mut span = LieSpan::empty(n);
    for g in generators {
        span.insert(&g.coords(), g.norm(), rank_tol);
    }
    // bracket each basis element with every earlier one; new elements join the queue
    let mut i = 0;
    while i < span.dim() && !span.is_full() {
        let bi = SkewMatrix::from_coords(n, &span.basis[i]);
        for j in 0..i {
            let bj = SkewMatrix::from_coords(n, &span.basis[j]);
            let c = bi.bracket(&bj)?;
            span.insert(&c.coords(), 1.0, rank_tol);
            if span.is_full() {
                break;
            }
        }
        i += 1;
    }
    Ok(span)
}

/// The generators that enlarge the linear span, in order; their closure equals that of all generators.
pub fn independent_generators(generators: &[SkewMatrix], rank_tol: f64) -> Vec<SkewMatrix> {
    let Some(first) = generators.first() else {
        return Vec::new();
    };
    let mut span = LieSpan::empty(first.dim());
    generators.iter().filter(|g| span.insert(&g.coords(), g.norm(), rank_tol)).cloned().collect()
}

/// A Lie subalgebra spanned over ℚ(√c), kept in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct ExactSpan {
    n: usize,
    rows: Vec<(usize, Vec<QuadSurd>)>,
    elements: Vec<SkewMatrix>,
}

impl ExactSpan {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn is_full(&self) -> bool {
        self.dim() == so_dim(self.n)
    }

    /// The spanning elements, in insertion order.
    pub fn elements(&self) -> &[SkewMatrix] {
        &self.elements
    }

    fn reduce(&self, v: &[QuadSurd]) -> Result<Vec<QuadSurd>> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (vi, ri) in v.iter_mut().zip(row) {
                if !ri.is_zero() {
                    *vi = vi.checked_sub(&f.checked_mul(ri)?)?;
                }
            }
        }
        Ok(v)
    }

    pub fn contains(&self, x: &SkewMatrix) -> Result<bool> {
        let c = x.exact_coords().ok_or_else(|| Error::Domain("element has no exact entries".into()))?;
        Ok(self.reduce(&c)?.iter().all(Zero::is_zero))
    }

    fn insert(&mut self, x: SkewMatrix) -> Result<bool> {
        let c = x.exact_coords().ok_or_else(|| Error::Domain("element has no exact entries".into()))?;
        let mut r = self.reduce(&c)?;
        let Some(p) = r.iter().position(|v| !v.is_zero()) else {
            return Ok(false);
        };
        let inv = r[p].checked_inv()?;
        for v in r.iter_mut() {
            *v = v.checked_mul(&inv)?;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (ri, vi) in row.iter_mut().zip(&r) {
                *ri = ri.checked_sub(&f.checked_mul(vi)?)?;
            }
        }
        self.rows.push((p, r));
        self.elements.push(x);
        Ok(true)
    }
}

/// Lie closure in exact arithmetic; all generators need exact mirrors in one quadratic field.
pub fn exact_closure(generators: &[SkewMatrix]) -> Result<ExactSpan> {
    let first = generators.first().ok_or_else(|| Error::Domain("closure needs at least one generator".into()))?;
    let n = first.dim();
    let mut span = ExactSpan { n, rows: Vec::new(), elements: Vec::new() };
    for g in generators {
        if g.dim() != n {
            return Err(Error::Dimension { expected: n, found: g.dim() });
        }
        span.insert(g.clone())?;
    }
    let mut i = 0;
    while i < span.elements.len() && !span.is_full() {
        for j in 0..i {
            let c = span.elements[i].bracket(&span.elements[j])?;
            if c.exact().is_none() {
                return Err(Error::Domain("bracket left the quadratic field".into()));
            }
            span.insert(c)?;
            if span.is_full() {
                break;
            }
        }
        i += 1;
    }
    Ok(span)
}

/// Coordinate determinant of `(X, Y, [X,Y])` in so(3) and the minor identity `−(M₃₁² + M₃₂² + M₃₃²)`.
pub fn independence_determinant(x: &SkewMatrix, y: &SkewMatrix) -> Result<(f64, f64)> {
    if x.dim() != 3 || y.dim() != 3 {
        return Err(Error::Dimension { expected: 3, found: x.dim().max(y.dim()) });
    }
    let (a, b) = (x.coords(), y.coords());
    let c = x.bracket(y)?.coords();
    let m = Matrix3::new(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]);
    let m31 = a[1] * b[2] - a[2] * b[1];
    let m32 = a[0] * b[2] - a[2] * b[0];
    let m33 = a[0] * b[1] - a[1] * b[0];
    Ok((m.determinant(), -(m31 * m31 + m32 * m32 + m33 * m33)))
}

/// The 3×3 BCH coefficient matrix on so(3) at angle θ and its determinant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisChangeReport {
    pub theta: f64,
    /// Rows: coordinates of BCH(X₁₂,X₁₃), BCH(X₁₂,X₂₃), BCH(X₁₃,X₂₃) in `(E₁₂, E₁₃, E₂₃)`.
    pub matrix: MatrixRows,
    pub determinant: f64,
    /// `(ψ/sin ψ · sin θ)³ (−2c³ − h c² − h³)`, `c = cos²(θ/2)`, `h = ½ sin θ`.
    pub closed_form: f64,
    /// `(arcsin(d)/d · sin θ)³ (−2cos⁶(θ/2) + ½cos⁴(θ/2) sin θ + ⅛ sin³θ)`.
    pub printed_closed_form: f64,
}

fn product_half_cos(theta: f64) -> f64 {
    // cos(ψ/2) = cos²(θ/2) for two orthogonal rotations by θ
    (0.5 * theta).cos().powi(2)
}

/// `ψ/sin ψ · sin θ`, the common scale of every BCH column at angle θ.
pub fn bch_scale(theta: f64) -> f64 {
    let hc = product_half_cos(theta);
    let psi = 2.0 * hc.clamp(-1.0, 1.0).acos();
    let d = psi.sin();
    if d.abs() < 1e-300 {
        return theta.sin();
    }
    psi / d * theta.sin()
}

fn half_angle_terms(theta: f64) -> (f64, f64) {
    ((0.5 * theta).cos().powi(2), 0.5 * theta.sin())
}

/// Determinant of the BCH coefficient matrix: `(ψ/sin ψ · sin θ)³ (−2c³ − h c² − h³)`.
pub fn bch_determinant_closed_form(theta: f64) -> f64 {
    let (c, h) = half_angle_terms(theta);
    bch_scale(theta).powi(3) * (-2.0 * c.powi(3) - h * c * c - h.powi(3))
}

/// The alternative closed form `(arcsin(d)/d · sin θ)³ (−2c³ + h c² + h³)`.
pub fn bch_determinant_printed(theta: f64) -> f64 {
    let (c, h) = half_angle_terms(theta);
    let s = theta.sin();
    let d = s * (2.0 * c * c + 0.25 * s * s).sqrt();
    let pre = if d.abs() < 1e-300 { s } else { d.clamp(-1.0, 1.0).asin() / d * s };
    pre.powi(3) * (-2.0 * c.powi(3) + h * c * c + h.powi(3))
}

pub fn bch_basis_matrix_so3(theta: f64) -> Result<BasisChangeReport> {
    if !(theta > 0.0 && theta < 2.0 * PI) {
        return Err(Error::Branch(format!("θ = {theta} outside (0, 2π)")));
    }
    let x12 = SkewMatrix::basis(3, 0, 1).scale(theta);
    let x13 = SkewMatrix::basis(3, 0, 2).scale(theta);
    let x23 = SkewMatrix::basis(3, 1, 2).scale(theta);
    let rows = [
        so3::bch_orthogonal(&x12, &x13)?,
        so3::bch_orthogonal(&x12, &x23)?,
        so3::bch_orthogonal(&x13, &x23)?,
    ];
    let m = DMatrix::from_fn(3, 3, |i, j| rows[i].coords()[j]);
    Ok(BasisChangeReport {
        theta,
        determinant: m.determinant(),
        matrix: MatrixRows::from(&m),
        closed_form: bch_determinant_closed_form(theta),
        printed_closed_form: bch_determinant_printed(theta),
    })
}

/// Bisects a sign change of `f` on `[a, b]` to width `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Zeros of the BCH determinant on `(0, 2π)`, localized to `tol`.
///
/// Sign changes on a `grid`-point mesh are bisected; the excluded point θ = π is
/// skipped, and θ = 0 is reported when the determinant vanishes in the limit.
pub fn bch_determinant_zeros(grid: usize, tol: f64) -> Vec<f64> {
    let det = |t: f64| bch_basis_matrix_so3(t).map(|r| r.determinant).unwrap_or(f64::NAN);
    let mut zeros = Vec::new();
    let eps = 1e-3;
    if det(eps).abs() < 1e-6 {
        zeros.push(0.0);
    }
    let pts: Vec<f64> = (0..=grid).map(|k| eps + (2.0 * PI - 2.0 * eps) * k as f64 / grid as f64).collect();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a < PI + eps && b > PI - eps {
            continue;
        }
        let (fa, fb) = (det(a), det(b));
        if fa == 0.0 {
            zeros.push(a);
        } else if fa.is_finite() && fb.is_finite() && (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            zeros.push(bisect(det, a, b, tol));
        }
    }
    zeros
}

/// `−(½ sin θ)^{N−3} (¼ sin²θ + cos⁴(θ/2))`: determinant of the block added when passing from N−1 to N modes.
pub fn p_block_determinant(n: usize, theta: f64) -> f64 {
    assert!(n >= 4, "P block needs N ≥ 4");
    let (c, h) = half_angle_terms(theta);
    -h.powi(n as i32 - 3) * (h * h + c * c)
}

/// [`p_block_determinant`] from exact `cos θ`, `sin θ`.
pub fn p_block_determinant_exact(n: usize, cos: &QuadSurd, sin: &QuadSurd) -> Result<QuadSurd> {
    let half = QuadSurd::from_ratio(1, 2);
    let h = sin.checked_mul(&half)?;
    let c = QuadSurd::one().checked_add(cos)?.checked_mul(&half)?;
    let core = h.checked_mul(&h)?.checked_add(&c.checked_mul(&c)?)?;
    Ok(-h.pow(n as u32 - 3).checked_mul(&core)?)
}

type Pair = (usize, usize);

/// Generators `O_{p}O_{q}` and basis pairs in the block-triangular order.
fn recursive_order(n: usize, o: usize) -> (Vec<Pair>, Vec<(Pair, Pair)>) {
    if n == 3 {
        let basis = vec![(o, o + 1), (o, o + 2), (o + 1, o + 2)];
        let gens = vec![
            ((o, o + 1), (o, o + 2)),
            ((o, o + 1), (o + 1, o + 2)),
            ((o, o + 2), (o + 1, o + 2)),
        ];
        return (basis, gens);
    }
    let (mut basis, mut gens) = recursive_order(n - 1, o + 1);
    basis.extend((1..n).map(|k| (o, o + k)));
    gens.push(((o, o + 2), (o + 1, o + 2)));
    gens.extend((2..n).map(|k| ((o, o + 1), (o + 1, o + k))));
    (basis, gens)
}

fn product_log(n: usize, p: Pair, q: Pair, theta: f64) -> Result<SkewMatrix> {
    let mut modes = vec![p.0, p.1, q.0, q.1];
    modes.sort_unstable();
    modes.dedup();
    let local = |m: usize| modes.iter().position(|&x| x == m).unwrap();
    let r = RotationMatrix::givens(3, local(p.0), local(p.1), theta)
        .mul(&RotationMatrix::givens(3, local(q.0), local(q.1), theta));
    let l = so3::log_so3(&r)?;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..3 {
        for j in 0..3 {
            out[(modes[i], modes[j])] = l.matrix()[(i, j)];
        }
    }
    Ok(SkewMatrix::from_float_unchecked(out))
}

/// The P block for N modes: rows `E₁₂ … E₁N`, columns `O₁₃O₂₃, O₁₂O₂₃, O₁₂O₂₄, …, O₁₂O₂N`,
/// each column the logarithm of the product divided by [`bch_scale`].
pub fn p_block_matrix(n: usize, theta: f64) -> Result<DMatrix<f64>> {
    let mut cols = vec![((0, 2), (1, 2))];
    cols.extend((2..n).map(|k| ((0, 1), (1, k))));
    let mu = bch_scale(theta);
    let mut m = DMatrix::zeros(n - 1, n - 1);
    for (j, &(p, q)) in cols.iter().enumerate() {
        let l = product_log(n, p, q, theta)?;
        for k in 1..n {
            m[(k - 1, j)] = l.matrix()[(0, k)] / mu;
        }
    }
    Ok(m)
}

/// Full change-of-basis matrix of the generating set, block upper triangular, scaled as [`p_block_matrix`].
pub fn generating_set_matrix(n: usize, theta: f64) -> Result<DMatrix<f64>> {
    if n < 3 {
        return Err(Error::Domain(format!("generating set needs N ≥ 3, got {n}")));
    }
    let (basis, gens) = recursive_order(n, 0);
    let mu = bch_scale(theta);
    let mut m = DMatrix::zeros(basis.len(), gens.len());
    for (j, &(p, q)) in gens.iter().enumerate() {
        let l = product_log(n, p, q, theta)?;
        for (i, &(a, b)) in basis.iter().enumerate() {
            m[(i, j)] = l.matrix()[(a, b)] / mu;
        }
    }
    Ok(m)
}

/// Closed form of `det` [`generating_set_matrix`]: the so(3) block times every P block.
pub fn generating_set_determinant(n: usize, theta: f64) -> f64 {
    let (c, h) = half_angle_terms(theta);
    let base = -2.0 * c.powi(3) - h * c * c - h.powi(3);
    (4..=n).fold(base, |acc, k| acc * p_block_determinant(k, theta))
}

/// One element `O_p · O_q` of a generating set.
#[derive(Clone, Debug)]
pub struct GeneratingElement {
    pub first: Pair,
    pub second: Pair,
    pub rotation: RotationMatrix,
}

fn listed_pairs(n: usize, o: usize) -> Vec<(Pair, Pair)> {
    if n == 3 {
        return vec![((o, o + 1), (o, o + 2)), ((o, o + 1), (o + 1, o + 2)), ((o, o + 2), (o + 1, o + 2))];
    }
    let mut out = listed_pairs(n - 1, o + 1);
    out.extend((2..n).map(|k| ((o, o + 1), (o + 1, o + k))));
    out.push(((o, o + 2), (o + 1, o + 2)));
    out
}

/// `S^(N)`: the shifted `S^(N−1)` on modes 2…N together with `O₁₂O₂₃, …, O₁₂O₂N, O₁₃O₂₃`.
pub fn build_generating_set(n: usize, theta: f64) -> Result<Vec<GeneratingElement>> {
    build_with(n, |k, l| RotationMatrix::givens(n, k, l, theta))
}

/// [`build_generating_set`] with exact entries from exact `cos θ`, `sin θ`.
pub fn build_generating_set_exact(n: usize, cos: &QuadSurd, sin: &QuadSurd) -> Result<Vec<GeneratingElement>> {
    let mut err = None;
    let out = build_with(n, |k, l| match RotationMatrix::givens_exact(n, k, l, cos, sin) {
        Ok(r) => r,
        Err(e) => {
            err = Some(e);
            RotationMatrix::identity(n)
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn build_with(n: usize, mut givens: impl FnMut(usize, usize) -> RotationMatrix) -> Result<Vec<GeneratingElement>> {
    if n < 3 {
        return Err(Error::Domain(format!("generating set needs N ≥ 3, got {n}")));
    }
    Ok(listed_pairs(n, 0)
        .into_iter()
        .map(|(p, q)| {
            let rotation = givens(p.0, p.1).mul(&givens(q.0, q.1));
            GeneratingElement { first: p, second: q, rotation }
        })
        .collect())
}

/// How an so(3) triple was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripleSource {
    TrivialAction,
    Fitted,
}

/// `(X, Y, Z)` with `[X,Y] = Z`, `[Z,X] = Y`, `[Y,Z] = X`.
#[derive(Clone, Debug)]
pub struct So3Triple {
    pub x: SkewMatrix,
    pub y: SkewMatrix,
    pub z: SkewMatrix,
    pub source: TripleSource,
}

impl So3Triple {
    /// Largest deviation from the three bracket relations.
    pub fn defect(&self) -> f64 {
        let d = |a: &SkewMatrix, b: &SkewMatrix, c: &SkewMatrix| (a.bracket(b).unwrap().matrix() - c.matrix()).amax();
        d(&self.x, &self.y, &self.z).max(d(&self.z, &self.x, &self.y)).max(d(&self.y, &self.z, &self.x))
    }

    /// Exact check of the relations when all three carry exact mirrors.
    pub fn holds_exactly(&self) -> Option<bool> {
        let e = |a: &SkewMatrix, b: &SkewMatrix, c: &SkewMatrix| -> Option<bool> {
            Some(a.bracket(b).ok()?.exact()? == c.exact()?)
        };
        Some(e(&self.x, &self.y, &self.z)? && e(&self.z, &self.x, &self.y)? && e(&self.y, &self.z, &self.x)?)
    }
}

/// `A_ijk = E_ij − E_ik + E_jk` on modes `i < j < k` of so(n).
pub fn trivial_embedding(n: usize, i: usize, j: usize, k: usize) -> SkewMatrix {
    SkewMatrix::basis(n, i, j).sub(&SkewMatrix::basis(n, i, k)).add(&SkewMatrix::basis(n, j, k))
}

fn trivial_triple() -> So3Triple {
    let a123 = trivial_embedding(4, 0, 1, 2);
    let a234 = trivial_embedding(4, 1, 2, 3);
    let a134 = trivial_embedding(4, 0, 2, 3);
    let a124 = trivial_embedding(4, 0, 1, 3);
    let q = QuadSurd::from_ratio(1, 4);
    let x = a123.add(&a234).add(&a134).add(&a124).scale_exact(&q);
    let y = a123.add(&a234).sub(&a134).sub(&a124).scale_exact(&q);
    let z = a123.sub(&a234).sub(&a134).add(&a124).scale_exact(&(-q));
    So3Triple { x, y, z, source: TripleSource::TrivialAction }
}

fn fit_triple(span: &LieSpan) -> Option<So3Triple> {
    let n = span.ambient();
    let b = span.basis();
    // structure constants f[i][j][k] = ⟨[b_i, b_j], b_k⟩
    let mut f = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let c = b[i].bracket(&b[j]).ok()?;
            if span.residual_norm(&c) > 1e-8 {
                return None;
            }
            for k in 0..3 {
                f[i][j][k] = c.inner(&b[k]);
            }
        }
    }
    let ad = |i: usize| Matrix3::from_fn(|k, j| f[i][j][k]);
    let killing = Matrix3::from_fn(|i, j| (ad(i) * ad(j)).trace());
    let eig = killing.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l > -1e-8) {
        return None;
    }
    let u: Vec<SkewMatrix> = (0..3)
        .map(|i| {
            let s = (-2.0 / eig.eigenvalues[i]).sqrt();
            let mut acc = SkewMatrix::from_float_unchecked(DMatrix::zeros(n, n));
            for j in 0..3 {
                acc = acc.add(&b[j].scale(eig.eigenvectors[(j, i)] * s));
            }
            acc
        })
        .collect();
    let mut z = u[2].clone();
    if u[0].bracket(&u[1]).ok()?.inner(&z) < 0.0 {
        z = z.scale(-1.0);
    }
    let t = So3Triple { x: u[0].clone(), y: u[1].clone(), z, source: TripleSource::Fitted };
    let scale = t.x.matrix().amax().max(1.0);
    (t.defect() < 1e-8 * scale).then_some(t)
}

/// An so(3) triple inside a 3-dimensional span, or `None` when no such structure exists.
pub fn identify_so3_xyz(span: &LieSpan) -> Option<So3Triple> {
    if span.dim() != 3 {
        return None;
    }
    if span.ambient() == 4 {
        let gens = [(0, 1, 2), (1, 2, 3), (0, 2, 3), (0, 1, 3)];
        if gens.iter().all(|&(i, j, k)| span.contains(&trivial_embedding(4, i, j, k), 1e-9)) {
            let t = trivial_triple();
            if t.defect() < 1e-10 {
                return Some(t);
            }
        }
    }
    fit_triple(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, k: usize, l: usize) -> SkewMatrix {
        SkewMatrix::basis(n, k, l)
    }

    #[test]
    fn bracket_relations() {
        let b = commutator(&e(3, 0, 1), &e(3, 0, 2)).unwrap();
        assert_eq!(b.exact(), e(3, 1, 2).scale_exact(&QuadSurd::from_int(-1)).exact());
        assert_eq!(commutator(&e(4, 0, 1), &e(4, 2, 3)).unwrap().norm(), 0.0);
    }

    #[test]
    fn closure_dimensions() {
        assert_eq!(closure(&[e(3, 0, 1)]).unwrap().dim(), 1);
        assert_eq!(closure(&[e(3, 0, 1), e(3, 0, 2)]).unwrap().dim(), 3);
        let four = [(0, 1, 2), (1, 2, 3), (0, 2, 3), (0, 1, 3)].map(|(i, j, k)| trivial_embedding(4, i, j, k));
        let span = closure(&four).unwrap();
        assert_eq!(span.dim(), 3);
        assert!(!span.is_full());
        assert_eq!(exact_closure(&four).unwrap().dim(), 3);
        assert!(closure(&[e(3, 0, 1), e(4, 0, 1)]).is_err());
    }

    #[test]
    fn p_block_closed_form_matches_assembly() {
        for n in 4..=7 {
            for &t in &[0.3, 1.2, 2.0, 4.0, 5.5] {
                let m = p_block_matrix(n, t).unwrap();
                assert!((m.determinant() - p_block_determinant(n, t)).abs() < 1e-10, "n={n} θ={t}");
            }
        }
        assert!((p_block_determinant(4, PI / 2.0) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn generating_set_is_block_triangular() {
        for n in 3..=6 {
            let m = generating_set_matrix(n, 0.9).unwrap();
            assert!((m.determinant() - generating_set_determinant(n, 0.9)).abs() < 1e-10);
        }
    }

    #[test]
    fn listed_generating_sets() {
        let s3 = build_generating_set(3, 0.4).unwrap();
        let pairs: Vec<_> = s3.iter().map(|g| (g.first, g.second)).collect();
        assert_eq!(pairs, vec![((0, 1), (0, 2)), ((0, 1), (1, 2)), ((0, 2), (1, 2))]);
        for n in 3..=12 {
            assert_eq!(build_generating_set(n, 0.4).unwrap().len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn triple_from_standard_basis() {
        let span = closure(&[e(3, 0, 1), e(3, 0, 2), e(3, 1, 2)]).unwrap();
        let t = identify_so3_xyz(&span).unwrap();
        assert_eq!(t.source, TripleSource::Fitted);
        assert!(t.defect() < 1e-12);
        let abelian = closure(&[e(6, 0, 1), e(6, 2, 3), e(6, 4, 5)]).unwrap();
        assert_eq!(abelian.dim(), 3);
        assert!(identify_so3_xyz(&abelian).is_none());
    }
}
