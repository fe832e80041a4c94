//! Conjugation orbits under mode permutations, trivial-action detection and
//! embeddings of few-mode matrices into more modes.

use std::fmt;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::QuadSurd;
use crate::matrix::{ExactMatrix, RotationMatrix, SkewMatrix};

/// Largest mode count whose full orbit is enumerated.
pub const ORBIT_CAP: usize = 8;
pub const DEDUP_TOL: f64 = 1e-9;
pub const DIRECTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModePermutation {
    mapping: Vec<usize>,
}

impl ModePermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let m = mapping.len();
        let mut seen = vec![false; m];
        for &i in &mapping {
            if i >= m || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Index(format!("{mapping:?} is not a permutation of 0..{m}")));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(m: usize) -> Self {
        Self { mapping: (0..m).collect() }
    }

    pub fn transposition(m: usize, a: usize, b: usize) -> Self {
        let mut mapping: Vec<usize> = (0..m).collect();
        mapping.swap(a, b);
        Self { mapping }
    }

    /// All `m!` permutations in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = ModePermutation> {
        (0..m).permutations(m).map(|mapping| ModePermutation { mapping })
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// `P` with `P e_j = e_{σ(j)}`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |i, j| if self.mapping[j] == i { 1.0 } else { 0.0 })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            inv[j] = i;
        }
        Self { mapping: inv }
    }
}

impl fmt::Display for ModePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.mapping.iter().join(" "))
    }
}

/// Distinct conjugates `PᵀOP` of a rotation.
#[derive(Clone, Debug)]
pub struct OrbitSet {
    pub base: RotationMatrix,
    pub elements: Vec<RotationMatrix>,
    /// First permutation (in lexicographic order) producing each element.
    pub conjugators: Vec<ModePermutation>,
    pub trivial: bool,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

struct Candidate {
    index: usize,
    key: f64,
    float: DMatrix<f64>,
    exact: Option<ExactMatrix>,
}

fn weights(m: usize) -> Vec<f64> {
    (0..m * m).map(|k| 0.5 + ((k + 1) as f64 * 0.618_033_988_749_895).fract()).collect()
}

fn same(a: &Candidate, b: &Candidate, tol: f64) -> bool {
    match (&a.exact, &b.exact) {
        (Some(x), Some(y)) => x == y,
        _ => (&a.float - &b.float).amax() < tol,
    }
}

/// Deduplicated conjugates, in the order of their first permutation.
fn distinct_conjugates(
    float: &DMatrix<f64>,
    exact: Option<&ExactMatrix>,
    cap: usize,
    tol: f64,
) -> Result<Vec<(ModePermutation, DMatrix<f64>, Option<ExactMatrix>)>> {
    let m = float.nrows();
    if m > cap {
        return Err(Error::Size { size: m, cap });
    }
    let w = weights(m);
    let perms: Vec<ModePermutation> = ModePermutation::all(m).collect();
    let mut cands: Vec<Candidate> = perms
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let s = p.mapping();
            let f = DMatrix::from_fn(m, m, |i, j| float[(s[i], s[j])]);
            let e = exact.map(|e| ExactMatrix::from_fn(m, m, |i, j| e[(s[i], s[j])].clone()));
            let key = f.iter().zip(&w).map(|(x, w)| x * w).sum();
            Candidate { index, key, float: f, exact: e }
        })
        .collect();
    // near-equal matrices have near-equal keys, so only a window needs comparing
    cands.sort_by(|a, b| a.key.total_cmp(&b.key).then(a.index.cmp(&b.index)));
    let window = tol * w.iter().sum::<f64>();
    let mut kept: Vec<Candidate> = Vec::new();
    for c in cands {
        let dup = kept.iter().rev().take_while(|k| c.key - k.key <= window).any(|k| same(k, &c, tol));
        if !dup {
            kept.push(c);
        }
    }
    kept.sort_by_key(|c| c.index);
    Ok(kept.into_iter().map(|c| (perms[c.index].clone(), c.float, c.exact)).collect())
}

pub fn orbit(o: &RotationMatrix) -> Result<OrbitSet> {
    orbit_with(o, ORBIT_CAP, DEDUP_TOL)
}

pub fn orbit_with(o: &RotationMatrix, cap: usize, dedup_tol: f64) -> Result<OrbitSet> {
    let found = distinct_conjugates(o.matrix(), o.exact(), cap, dedup_tol)?;
    let inv = o.inverse();
    let mut elements = Vec::with_capacity(found.len());
    let mut conjugators = Vec::with_capacity(found.len());
    for (p, f, e) in found {
        elements.push(RotationMatrix::from_parts(f, e));
        conjugators.push(p);
    }
    let equal = |a: &RotationMatrix, b: &RotationMatrix| match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => x == y,
        _ => a.distance_max(b) < dedup_tol,
    };
    let trivial = elements.iter().all(|e| equal(e, o) || equal(e, &inv));
    Ok(OrbitSet { base: o.clone(), elements, conjugators, trivial })
}

/// Distinct conjugates `PᵀAP` of a skew matrix.
pub fn skew_orbit(a: &SkewMatrix) -> Result<Vec<SkewMatrix>> {
    Ok(distinct_conjugates(a.matrix(), a.exact(), ORBIT_CAP, DEDUP_TOL)?
        .into_iter()
        .map(|(_, f, e)| SkewMatrix::from_parts(f, e))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrivialAction {
    pub trivial: bool,
    /// Distance of the normalized `(a12, a13, a23)` from `±(1, −1, 1)/√3`.
    pub distance: f64,
    pub exact: bool,
}

/// Whether the coefficients of a 3×3 skew matrix point along `(1, −1, 1)`.
pub fn is_trivial_action(a: &SkewMatrix) -> Result<TrivialAction> {
    is_trivial_action_with(a, DIRECTION_TOL)
}

pub fn is_trivial_action_with(a: &SkewMatrix, direction_tol: f64) -> Result<TrivialAction> {
    if a.dim() != 3 {
        return Err(Error::Dimension { expected: 3, found: a.dim() });
    }
    let c = a.coords();
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Normalization);
    }
    let u = [1.0, -1.0, 1.0].map(|x: f64| x / 3f64.sqrt());
    let dist = |sign: f64| c.iter().zip(u).map(|(x, u)| (x / norm - sign * u).powi(2)).sum::<f64>().sqrt();
    let distance = dist(1.0).min(dist(-1.0));
    if let Some(e) = a.exact_coords() {
        let trivial = e[0] == -e[1].clone() && e[1] == -e[2].clone() && !e[0].is_zero();
        return Ok(TrivialAction { trivial, distance, exact: true });
    }
    Ok(TrivialAction { trivial: distance < direction_tol, distance, exact: false })
}

fn check_modes(m: usize, target_n: usize, modes: &[usize]) -> Result<()> {
    if target_n < m {
        return Err(Error::Dimension { expected: m, found: target_n });
    }
    if modes.len() != m {
        return Err(Error::Index(format!("{} modes given for a {m}-mode matrix", modes.len())));
    }
    if modes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Index(format!("modes {modes:?} are not strictly increasing")));
    }
    if modes.last().is_some_and(|&k| k >= target_n) {
        return Err(Error::Index(format!("modes {modes:?} exceed {target_n} modes")));
    }
    Ok(())
}

fn place<T: nalgebra::Scalar>(m: &DMatrix<T>, target_n: usize, modes: &[usize], zero: T, diag: T) -> DMatrix<T> {
    let mut out = DMatrix::from_element(target_n, target_n, zero);
    for i in 0..target_n {
        out[(i, i)] = diag.clone();
    }
    for (a, &i) in modes.iter().enumerate() {
        for (b, &j) in modes.iter().enumerate() {
            out[(i, j)] = m[(a, b)].clone();
        }
    }
    out
}

/// Placement of a few-mode matrix on a subset of modes.
pub trait Embed: Sized {
    fn modes(&self) -> usize;
    fn embed(&self, target_n: usize, modes: &[usize]) -> Result<Self>;
}

impl Embed for RotationMatrix {
    fn modes(&self) -> usize {
        self.dim()
    }

    fn embed(&self, target_n: usize, modes: &[usize]) -> Result<Self> {
        check_modes(self.dim(), target_n, modes)?;
        let f = place(self.matrix(), target_n, modes, 0.0, 1.0);
        let e = self.exact().map(|e| place(e, target_n, modes, QuadSurd::zero(), QuadSurd::one()));
        Ok(RotationMatrix::from_parts(f, e))
    }
}

impl Embed for SkewMatrix {
    fn modes(&self) -> usize {
        self.dim()
    }

    fn embed(&self, target_n: usize, modes: &[usize]) -> Result<Self> {
        check_modes(self.dim(), target_n, modes)?;
        let f = place(self.matrix(), target_n, modes, 0.0, 0.0);
        let e = self.exact().map(|e| place(e, target_n, modes, QuadSurd::zero(), QuadSurd::zero()));
        Ok(SkewMatrix::from_parts(f, e))
    }
}

pub fn embed<T: Embed>(m: &T, target_n: usize, modes: &[usize]) -> Result<T> {
    m.embed(target_n, modes)
}

/// Increasing `m`-subsets of `0..n` in lexicographic order.
pub fn mode_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(m).collect()
}

pub fn all_embeddings<T: Embed>(m: &T, target_n: usize) -> Result<Vec<T>> {
    if target_n < m.modes() {
        return Err(Error::Dimension { expected: m.modes(), found: target_n });
    }
    mode_subsets(target_n, m.modes()).iter().map(|s| m.embed(target_n, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{closure, trivial_embedding};
    use crate::linalg::exp_skew;

    #[test]
    fn trivial_orbit_has_two_elements() {
        let a = trivial_embedding(3, 0, 1, 2).scale(0.3 * std::f64::consts::PI / 3f64.sqrt());
        let o = exp_skew(&a);
        let orb = orbit(&o).unwrap();
        assert_eq!(orb.len(), 2);
        assert!(orb.trivial);
        assert!(is_trivial_action(&a).unwrap().trivial);
    }

    #[test]
    fn generic_orbit_has_six_elements() {
        let a = SkewMatrix::from_coords(3, &[0.3, 0.5, -0.7]);
        let orb = orbit(&exp_skew(&a)).unwrap();
        assert_eq!(orb.len(), 6);
        assert!(!orb.trivial);
        assert_eq!(orbit(&RotationMatrix::identity(4)).unwrap().len(), 1);
    }

    #[test]
    fn trivial_action_examples() {
        let e12 = SkewMatrix::basis(3, 0, 1);
        assert!(!is_trivial_action(&e12).unwrap().trivial);
        let all_plus = SkewMatrix::from_coords(3, &[1.0, 1.0, 1.0]);
        let t = is_trivial_action(&all_plus).unwrap();
        assert!(!t.trivial && t.distance > 0.5);
        assert!(matches!(is_trivial_action(&SkewMatrix::zero(3).drop_exact()), Err(Error::Normalization)));
        assert!(is_trivial_action(&trivial_embedding(3, 0, 1, 2)).unwrap().exact);
    }

    #[test]
    fn embeddings_follow_subsets() {
        let a = trivial_embedding(3, 0, 1, 2);
        let all = all_embeddings(&a, 5).unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(closure(&all).unwrap().dim(), 6);
        let e = a.embed(4, &[0, 2, 3]).unwrap();
        assert_eq!(e.matrix()[(0, 2)], 1.0);
        assert_eq!(e.matrix()[(0, 3)], -1.0);
        assert_eq!(e.matrix()[(2, 3)], 1.0);
        assert!(a.embed(4, &[0, 0, 1]).is_err());
        assert!(a.embed(4, &[0, 1, 4]).is_err());
        assert!(a.embed(2, &[0, 1]).is_err());
        let r = RotationMatrix::givens(2, 0, 1, 0.4).embed(3, &[1, 2]).unwrap();
        assert_eq!(r.matrix()[(0, 0)], 1.0);
        assert!(r.distance_max(&RotationMatrix::givens(3, 1, 2, 0.4)) < 1e-15);
    }

    #[test]
    fn permutation_checks() {
        assert!(ModePermutation::new(vec![0, 0, 1]).is_err());
        let p = ModePermutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.inverse().mapping(), &[1, 2, 0]);
        assert_eq!(ModePermutation::all(4).count(), 24);
        let big = RotationMatrix::identity(9);
        assert!(matches!(orbit(&big), Err(Error::Size { size: 9, cap: 8 })));
    }
}
