//! Two-mode, three-mode and general m-mode universality checks.

use std::f64::consts::PI;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, ProductAngleMethod, Step};
use super::crs::{crs_criterion, geodetic_supports_relations};
use super::{resolve_angle, AngleSpec, EngineConfig, ResolvedAngle, UniversalityVerdict, VerdictKind};
use crate::angle::{classify_exact, classify_numeric_with, dense_in_one_param, AngleClass, AngleKind, Density};
use crate::error::{Error, Result};
use crate::exact::{format_rational, QuadSurd};
use crate::lie::{
    build_generating_set, closure_with_tol, exact_closure, generating_set_determinant, generating_set_matrix,
    identify_so3_xyz, independence_determinant, independent_generators, trivial_embedding, LieSpan,
};
use crate::linalg::{exp_skew, logm_rotation};
use crate::matrix::{so_dim, MatrixRows, RotationMatrix, SkewMatrix};
use crate::orbit::{all_embeddings, is_trivial_action_with, mode_subsets, orbit_with, skew_orbit, Embed, ModePermutation};

/// Largest number of orbit products examined by the substitution search.
const SUBSTITUTION_PAIR_CAP: usize = 2_000;

/// `cos α` of the product of two rotations by θ about orthogonal axes: `cos θ + (cos²θ − 1)/2`.
pub(crate) fn product_cos(cos: &QuadSurd) -> Result<QuadSurd> {
    let c2 = cos.checked_mul(cos)?;
    cos.checked_add(&c2.checked_sub(&QuadSurd::from_int(1))?.checked_mul(&QuadSurd::from_ratio(1, 2))?)
}

fn is_excluded(kind: AngleKind) -> bool {
    matches!(
        kind,
        AngleKind::RationalPi { p: 0, .. }
            | AngleKind::RationalPi { p: 1, q: 2 }
            | AngleKind::RationalPi { p: 1, q: 1 }
            | AngleKind::RationalPi { p: 3, q: 2 }
    )
}

fn angle_step(subject: &str, spec: &AngleSpec, r: &ResolvedAngle, config: &EngineConfig) -> Step {
    Step::AngleClass {
        subject: subject.into(),
        spec: spec.clone(),
        q_max: config.q_max,
        tol: config.angle_tol,
        class: r.class.clone(),
    }
}

fn closure_step(subject: &str, gens: &[SkewMatrix], config: &EngineConfig) -> Result<(Step, LieSpan)> {
    let reduced = independent_generators(gens, config.rank_tol);
    let span = closure_with_tol(&reduced, config.rank_tol)?;
    let step = Step::Closure {
        subject: subject.into(),
        modes: span.ambient(),
        generators: reduced.iter().map(SkewMatrix::coords).collect(),
        rank_tol: config.rank_tol,
        dim: span.dim(),
        full: span.is_full(),
    };
    Ok((step, span))
}

fn exact_closure_step(subject: &str, gens: &[SkewMatrix]) -> Result<Option<(Step, usize)>> {
    let Some(coords) = gens.iter().map(SkewMatrix::exact_coords).collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    let span = exact_closure(gens)?;
    let step = Step::ExactClosure {
        subject: subject.into(),
        modes: span.ambient(),
        generators: coords,
        dim: span.dim(),
        full: span.is_full(),
    };
    Ok(Some((step, span.dim())))
}

fn verdict(kind: VerdictKind, modes: usize, certificate: Certificate) -> UniversalityVerdict {
    UniversalityVerdict { kind, modes_available: modes, certificate }
}

fn not_universal(reason: impl Into<String>, modes: usize, cert: Certificate) -> Result<UniversalityVerdict> {
    Ok(verdict(VerdictKind::NotUniversal { reason: reason.into() }, modes, cert))
}

fn inconclusive(hypothesis: impl Into<String>, modes: usize, cert: Certificate) -> Result<UniversalityVerdict> {
    Ok(verdict(VerdictKind::Inconclusive { hypothesis: hypothesis.into() }, modes, cert))
}

fn density_of(kind: AngleKind) -> Density {
    match kind {
        AngleKind::IrrationalPi => Density::Dense,
        AngleKind::RationalPi { .. } => Density::NotDense,
        AngleKind::Unknown => Density::Unknown,
    }
}

/// Universality of the real 2-mode beamsplitter `O(θ)` on `n_modes` modes.
pub fn check_two_mode(angle: &AngleSpec, n_modes: usize, config: &EngineConfig) -> Result<UniversalityVerdict> {
    if n_modes < 3 {
        return Err(Error::Precondition(format!("two-mode check needs at least 3 modes, got {n_modes}")));
    }
    let r = resolve_angle(angle, config.numeric())?;
    let mut cert = Certificate::default();
    cert.push(angle_step("θ", angle, &r, config));
    let kind = r.kind();
    if is_excluded(kind) {
        cert.push(Step::ExcludedAngle { kind });
        return not_universal(
            format!("excluded angle θ = {kind}: the beamsplitter acts as a signed mode permutation"),
            n_modes,
            cert,
        );
    }
    let irrational_ok = if kind.is_rational() { false } else { irrational_branch(&r, n_modes, config, &mut cert)? };
    let rational_ok = if kind == AngleKind::IrrationalPi { false } else { rational_branch(&r, n_modes, config, &mut cert)? };
    match kind {
        AngleKind::IrrationalPi if irrational_ok => Ok(verdict(VerdictKind::Universal, n_modes, cert)),
        AngleKind::RationalPi { .. } if rational_ok => Ok(verdict(VerdictKind::Universal, n_modes, cert)),
        AngleKind::Unknown if irrational_ok && rational_ok => {
            cert.push(Step::Note {
                text: "θ/π is either irrational or rational; both branches certify universality".into(),
            });
            Ok(verdict(VerdictKind::Universal, n_modes, cert))
        }
        _ => inconclusive("a branch of the case split did not certify", n_modes, cert),
    }
}

/// Direct closure of `{θ E_kl}` with a dense one-parameter subgroup.
fn irrational_branch(r: &ResolvedAngle, n: usize, config: &EngineConfig, cert: &mut Certificate) -> Result<bool> {
    let gens: Vec<SkewMatrix> = crate::matrix::coordinate_pairs(n)
        .into_iter()
        .map(|(k, l)| SkewMatrix::basis(n, k, l).scale(r.theta))
        .collect();
    let (step, span) = closure_step("{θ E_kl}", &gens, config)?;
    cert.push(step);
    cert.push(Step::Density {
        subject: "O(θ)".into(),
        rotation: MatrixRows::from(RotationMatrix::givens(2, 0, 1, r.theta).matrix()),
        exact_cos: r.cos.clone(),
        q_max: config.q_max,
        tol: config.angle_tol,
        density: density_of(r.kind()),
    });
    Ok(span.is_full())
}

/// Substitution by the products `S^(N)`: nonzero generating-set determinant and an irrational product angle.
fn rational_branch(r: &ResolvedAngle, n: usize, config: &EngineConfig, cert: &mut Certificate) -> Result<bool> {
    let set = build_generating_set(n, r.theta)?;
    let determinant = generating_set_matrix(n, r.theta)?.determinant();
    let closed_form = generating_set_determinant(n, r.theta);
    cert.push(Step::GeneratingSet { modes: n, theta: r.theta, elements: set.len(), determinant, closed_form });
    let logs: Vec<SkewMatrix> = set.iter().map(|g| logm_rotation(&g.rotation)).collect::<Result<_>>()?;
    let (step, span) = closure_step("logarithms of S^(N)", &logs, config)?;
    cert.push(step);
    let spans = determinant.abs() > config.determinant_tol && span.is_full();
    let irrational = match (&r.cos, r.kind()) {
        (Some(c), _) => {
            let class = classify_exact(&product_cos(c)?)?;
            let ok = class.kind == AngleKind::IrrationalPi;
            cert.push(Step::ProductAngle {
                theta: r.kind(),
                cos_theta: Some(c.clone()),
                method: ProductAngleMethod::Cyclotomic,
                class,
            });
            ok
        }
        (None, AngleKind::RationalPi { .. }) => {
            cert.push(Step::ProductAngle {
                theta: r.kind(),
                cos_theta: None,
                method: ProductAngleMethod::FiniteOrderCorollary,
                class: AngleClass {
                    kind: AngleKind::IrrationalPi,
                    certificate: format!(
                        "O_kl·O_lm are products of rotations of finite order by θ = {} about orthogonal axes; no power is the identity",
                        r.kind()
                    ),
                },
            });
            true
        }
        _ => {
            cert.push(Step::Note {
                text: "if θ/π is rational, each O_kl·O_lm has infinite order (finite-order rotations about orthogonal axes)"
                    .into(),
            });
            true
        }
    };
    Ok(spans && irrational)
}

/// A 3-mode beamsplitter `exp(θ·A/‖A‖)` given by the direction `(a12, a13, a23)` and θ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeModeSpec {
    pub coefficients: [f64; 3],
    pub exact: Option<[QuadSurd; 3]>,
    pub angle: AngleSpec,
}

impl ThreeModeSpec {
    pub fn float(coefficients: [f64; 3], angle: AngleSpec) -> Self {
        Self { coefficients, exact: None, angle }
    }

    pub fn exact(coefficients: [QuadSurd; 3], angle: AngleSpec) -> Self {
        Self { coefficients: coefficients.clone().map(|c| c.to_f64()), exact: Some(coefficients), angle }
    }

    /// The direction as an element of so(3), with an exact mirror when available.
    pub fn direction(&self) -> SkewMatrix {
        match &self.exact {
            Some(e) => SkewMatrix::from_exact_coords(3, e),
            None => SkewMatrix::from_coords(3, &self.coefficients),
        }
    }
}

fn signed_permutation(r: &RotationMatrix) -> bool {
    r.matrix().iter().all(|&x| x.abs() < 1e-12 || (x.abs() - 1.0).abs() < 1e-12)
}

/// Universality of a 3-mode beamsplitter on `n_modes` modes.
pub fn check_three_mode(spec: &ThreeModeSpec, n_modes: usize, config: &EngineConfig) -> Result<UniversalityVerdict> {
    if n_modes < 3 {
        return Err(Error::Precondition(format!("three-mode check needs at least 3 modes, got {n_modes}")));
    }
    let dir = spec.direction();
    let t = is_trivial_action_with(&dir, config.direction_tol)?;
    let mut cert = Certificate::default();
    cert.push(Step::TrivialAction {
        coefficients: spec.coefficients,
        exact: spec.exact.clone().map(Vec::from),
        direction_tol: config.direction_tol,
        result: t,
    });
    let r = resolve_angle(&spec.angle, config.numeric())?;
    cert.push(angle_step("θ", &spec.angle, &r, config));
    if let AngleKind::RationalPi { p: 0, .. } = r.kind() {
        return not_universal("θ = 0: the beamsplitter is the identity", n_modes, cert);
    }
    if t.trivial {
        trivial_three_mode(&dir, &r, n_modes, config, cert)
    } else {
        nontrivial_three_mode(&dir, &r, n_modes, config, cert)
    }
}

fn trivial_three_mode(
    dir: &SkewMatrix,
    r: &ResolvedAngle,
    n: usize,
    config: &EngineConfig,
    mut cert: Certificate,
) -> Result<UniversalityVerdict> {
    let pattern = trivial_embedding(3, 0, 1, 2);
    if n == 3 {
        let orbit = skew_orbit(dir)?;
        let (step, span) = closure_step("S(A)", &orbit, config)?;
        cert.push(step);
        if let Some((step, _)) = exact_closure_step("S(A), exact direction", &skew_orbit(&pattern)?)? {
            cert.push(step);
        }
        return not_universal(
            format!("trivial action: S(O) = {{O, O⁻¹}} generates an abelian subgroup (closure dim {})", span.dim()),
            n,
            cert,
        );
    }
    let embedded = all_embeddings(dir, n)?;
    let (step, span) = closure_step("embeddings of A", &embedded, config)?;
    cert.push(step);
    let exact_dim = if n <= 5 {
        match exact_closure_step("embeddings of A₁₂₃, exact", &all_embeddings(&pattern, n)?)? {
            Some((step, d)) => {
                cert.push(step);
                Some(d)
            }
            None => None,
        }
    } else {
        None
    };
    let dim = exact_dim.unwrap_or(span.dim());
    match n {
        4 => {
            if let Some(triple) = identify_so3_xyz(&span) {
                cert.push(Step::Note {
                    text: format!(
                        "so(3) triple with [X,Y]=Z, [Z,X]=Y, [Y,Z]=X (defect {:.1e}, exact: {})",
                        triple.defect(),
                        triple.holds_exactly().map_or("n/a".into(), |b| b.to_string())
                    ),
                });
            }
            let mut reason = format!("trivial action: the four embeddings span a {dim}-dimensional subalgebra isomorphic to so(3)");
            if r.kind().is_rational() {
                // axes of O₁₂₃ and O₂₃₄ as vectors of R⁴: (−1,1,−1,0)/√3 and (0,−1,1,−1)/√3
                let cos_alpha = QuadSurd::from_ratio(-2, 3);
                let s2 = QuadSurd::from_int(1) - cos_alpha.clone() * cos_alpha.clone();
                let s2 = s2.to_rational().expect("rational");
                let supports = geodetic_supports_relations(&s2, &config.geodetic)?;
                cert.push(Step::Geodetic { cos_alpha, sin_sq_alpha: format_rational(&s2), supports_relations: supports });
                if !supports {
                    reason.push_str("; the geodetic separation admits no relations, so the group is SO(3)");
                }
            }
            not_universal(reason, n, cert)
        }
        5 => not_universal(
            format!("trivial action: the ten embeddings generate a {dim}-dimensional subalgebra (SO(4) inside SO(5))"),
            n,
            cert,
        ),
        _ => {
            let expected = (n - 1) * (n - 2) / 2;
            if (4..=9).contains(&n) {
                cert.push(Step::Conjecture { k: n, dim: span.dim(), expected });
            }
            inconclusive(
                format!(
                    "conjecture SO(k−1): measured closure dim {} on {n} modes, (k−1)(k−2)/2 = {expected}",
                    span.dim()
                ),
                n,
                cert,
            )
        }
    }
}

/// Axis `ω = (−a23, a13, −a12)` of `exp(A)`.
fn axis_of(c: &[f64]) -> [f64; 3] {
    [-c[2], c[1], -c[0]]
}

fn exact_axis_of(c: &[QuadSurd]) -> [QuadSurd; 3] {
    [-c[2].clone(), c[1].clone(), -c[0].clone()]
}

fn exact_dot(a: &[QuadSurd], b: &[QuadSurd]) -> Option<QuadSurd> {
    a.iter().zip(b).try_fold(QuadSurd::zero(), |acc, (x, y)| acc.checked_add(&x.checked_mul(y).ok()?).ok())
}

fn nontrivial_three_mode(
    dir: &SkewMatrix,
    r: &ResolvedAngle,
    n: usize,
    config: &EngineConfig,
    mut cert: Certificate,
) -> Result<UniversalityVerdict> {
    let orbit = skew_orbit(dir)?;
    let (step, span) = closure_step("S(A)", &orbit, config)?;
    cert.push(step);
    if let Some((step, _)) = exact_closure_step("S(A), exact", &orbit)? {
        cert.push(step);
    }
    // the pair used by the case analysis on the number of nonzero coefficients
    let c = dir.coords();
    let nonzero = c.iter().filter(|x| x.abs() > 1e-15).count();
    let eq = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let order: Vec<(usize, usize)> = match nonzero {
        1 | 2 => vec![(0, 2), (0, 1), (1, 2)],
        _ if eq(-c[1], c[2]) && !eq(c[0], -c[1]) => vec![(1, 2), (0, 1), (0, 2)],
        _ => vec![(0, 1), (1, 2), (0, 2)],
    };
    let unit = dir.scale(1.0 / dir.norm());
    for (a, b) in order {
        let y = unit.permuted(ModePermutation::transposition(3, a, b).mapping());
        let (determinant, minors) = independence_determinant(&unit, &y)?;
        if minors.abs() > 1e-12 {
            cert.push(Step::Independence { x: unit.coords(), y: y.coords(), determinant, minors });
            cert.push(Step::Note {
                text: format!(
                    "{nonzero} nonzero coefficient(s): A and its conjugate by the transposition ({} {}) are independent, so S(A) generates so(3)",
                    a + 1,
                    b + 1
                ),
            });
            break;
        }
    }
    if !span.is_full() {
        return inconclusive(format!("closure of S(A) has dim {} < 3", span.dim()), n, cert);
    }
    let extend = |cert: &mut Certificate| {
        if n > 3 {
            cert.push(Step::Note { text: format!("universality on 3 modes extends to every k ≥ 3, in particular k = {n}") });
        }
    };
    match r.kind() {
        AngleKind::IrrationalPi => {
            let o = exp_skew(&unit.scale(r.theta));
            cert.push(Step::Density {
                subject: "O = exp(A)".into(),
                rotation: MatrixRows::from(o.matrix()),
                exact_cos: r.cos.clone(),
                q_max: config.q_max,
                tol: config.angle_tol,
                density: Density::Dense,
            });
            extend(&mut cert);
            Ok(verdict(VerdictKind::Universal, n, cert))
        }
        AngleKind::Unknown => inconclusive("θ/π irrational (numeric classification inconclusive)", n, cert),
        AngleKind::RationalPi { .. } => {
            let order = r.kind().rotation_order().expect("rational angle");
            let mut rational_separations = 0;
            for i in 0..orbit.len() {
                for j in i + 1..orbit.len() {
                    let (wi, wj) = (axis_of(&orbit[i].coords()), axis_of(&orbit[j].coords()));
                    let nn: f64 = wi.iter().map(|x| x * x).sum();
                    let cos: f64 = wi.iter().zip(&wj).map(|(x, y)| x * y).sum::<f64>() / nn;
                    if (cos.abs() - 1.0).abs() < 1e-12 {
                        continue;
                    }
                    let exact = match (orbit[i].exact_coords(), orbit[j].exact_coords()) {
                        (Some(ei), Some(ej)) => {
                            let (ai, aj) = (exact_axis_of(&ei), exact_axis_of(&ej));
                            exact_dot(&ai, &aj).zip(exact_dot(&ai, &ai)).and_then(|(d, m)| d.checked_div(&m).ok())
                        }
                        _ => None,
                    };
                    let (spec, class) = match exact {
                        Some(e) => (AngleSpec::ExactCos { cos: e.clone() }, classify_exact(&e)?),
                        None => {
                            let a = cos.clamp(-1.0, 1.0).acos();
                            (AngleSpec::Radians { theta: a }, classify_numeric_with(a, config.numeric()))
                        }
                    };
                    let resolved = ResolvedAngle { theta: cos.acos(), class: class.clone(), cos: None, sin: None };
                    cert.push(angle_step(&format!("axis separation α({}, {})", i, j), &spec, &resolved, config));
                    if !class.kind.is_rational() {
                        continue;
                    }
                    rational_separations += 1;
                    let outcome = crs_criterion(order, order, class.kind)?;
                    let dense = outcome.dense;
                    cert.push(Step::Crs { orders: (order, order), separation: class.kind, outcome });
                    if dense {
                        extend(&mut cert);
                        return Ok(verdict(VerdictKind::Universal, n, cert));
                    }
                }
            }
            if rational_separations > 0 {
                let o = exp_skew(&unit.scale(r.theta));
                if signed_permutation(&o) {
                    cert.push(Step::Note { text: "every element of S(O) is a signed permutation matrix".into() });
                    return not_universal("S(O) consists of signed permutation matrices, which generate a finite group", n, cert);
                }
                return inconclusive("every rational axis separation matches an exception of the density criterion", n, cert);
            }
            inconclusive("transcendence of e^{i2α} unverified (no axis separation is a rational multiple of π)", n, cert)
        }
    }
}

/// The three-mode description of a 3×3 rotation, exact when possible.
fn three_mode_spec(o: &RotationMatrix) -> Result<ThreeModeSpec> {
    if let Some(e) = o.exact() {
        let z: Option<Vec<QuadSurd>> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| e[(i, j)].checked_sub(&e[(j, i)]).ok())
            .collect();
        let cos = crate::angle::exact_cosine(o);
        if let (Some(z), Some(cos)) = (z, cos) {
            if z.iter().any(|v| !v.is_zero()) {
                return Ok(ThreeModeSpec::exact([z[0].clone(), z[1].clone(), z[2].clone()], AngleSpec::ExactCos { cos }));
            }
            // half turn: R + I = 2nnᵀ, so a nonzero column of R + I is along the axis
            let col = (0..3).find(|&j| !(&e[(j, j)] + &QuadSurd::from_int(1)).is_zero());
            if let Some(j) = col {
                let w: Option<Vec<QuadSurd>> = (0..3)
                    .map(|i| {
                        let d = if i == j { QuadSurd::from_int(1) } else { QuadSurd::zero() };
                        e[(i, j)].checked_add(&d).ok()
                    })
                    .collect();
                if let Some(w) = w {
                    let c = [-w[2].clone(), w[1].clone(), -w[0].clone()];
                    return Ok(ThreeModeSpec::exact(c, AngleSpec::RationalPi { p: 1, q: 1 }));
                }
            }
        }
    }
    let aa = crate::so3::axis_angle(o)?;
    let w = aa.axis;
    Ok(ThreeModeSpec::float([-w[2], w[1], -w[0]], AngleSpec::Radians { theta: aa.angle }))
}

/// The generic pipeline for an m-mode beamsplitter on `n_modes ≥ m` modes.
pub fn check_m_mode(o: &RotationMatrix, n_modes: usize, config: &EngineConfig) -> Result<UniversalityVerdict> {
    let m = o.dim();
    if m < 2 {
        return Err(Error::Precondition(format!("beamsplitter needs at least 2 modes, got {m}")));
    }
    if n_modes < m {
        return Err(Error::Precondition(format!("{n_modes} modes available for a {m}-mode beamsplitter")));
    }
    if o.is_identity(1e-12) {
        let mut cert = Certificate::default();
        cert.push(Step::Orbit { rotation: MatrixRows::from(o.matrix()), dedup_tol: config.dedup_tol, size: 1, trivial: true });
        return not_universal("identity beamsplitter: S(O) = {I}", n_modes, cert);
    }
    match m {
        2 => two_mode_matrix(o, n_modes, config),
        3 => {
            let spec = three_mode_spec(o)?;
            let mut v = check_three_mode(&spec, n_modes, config)?;
            v.certificate.steps.insert(0, Step::Note { text: "3-mode input: direction and angle read from the matrix".into() });
            Ok(v)
        }
        _ => generic_m_mode(o, n_modes, config),
    }
}

fn two_mode_matrix(o: &RotationMatrix, n_modes: usize, config: &EngineConfig) -> Result<UniversalityVerdict> {
    let spec = match o.exact() {
        Some(e) => AngleSpec::ExactCos { cos: e[(0, 0)].clone() },
        None => AngleSpec::Radians { theta: o.matrix()[(0, 1)].atan2(o.matrix()[(0, 0)]).rem_euclid(2.0 * PI) },
    };
    if n_modes >= 3 {
        return check_two_mode(&spec, n_modes, config);
    }
    // SO(2) itself: dense exactly when the angle is irrational
    let r = resolve_angle(&spec, config.numeric())?;
    let mut cert = Certificate::default();
    cert.push(angle_step("θ", &spec, &r, config));
    match r.kind() {
        AngleKind::IrrationalPi => Ok(verdict(VerdictKind::Universal, 2, cert)),
        AngleKind::RationalPi { .. } => not_universal("rational angle: O generates a finite cyclic group", 2, cert),
        AngleKind::Unknown => inconclusive("θ/π irrational (numeric classification inconclusive)", 2, cert),
    }
}

fn generic_m_mode(o: &RotationMatrix, n: usize, config: &EngineConfig) -> Result<UniversalityVerdict> {
    let m = o.dim();
    let mut cert = Certificate::default();
    let orbit = orbit_with(o, config.orbit_cap, config.dedup_tol)?;
    cert.push(Step::Orbit {
        rotation: MatrixRows::from(o.matrix()),
        dedup_tol: config.dedup_tol,
        size: orbit.len(),
        trivial: orbit.trivial,
    });
    let log = match logm_rotation(o) {
        Ok(l) => l,
        Err(Error::Branch(msg)) => return inconclusive(format!("principal logarithm unavailable: {msg}"), n, cert),
        Err(e) => return Err(e),
    };
    let logs = skew_orbit(&log)?;
    let (step, span) = closure_step("logarithms of S(O)", &logs, config)?;
    cert.push(step);
    let mut full = span.is_full();
    if !full && n > m {
        let gens: Vec<SkewMatrix> = mode_subsets(n, m)
            .iter()
            .flat_map(|s| logs.iter().map(move |l| l.embed(n, s)))
            .collect::<Result<_>>()?;
        let (step, span) = closure_step("embeddings of logarithms of S(O)", &gens, config)?;
        cert.push(step);
        if !span.is_full() {
            return not_universal(
                format!("closure is a proper subalgebra of so({n}) (dim {} < {}, numeric rank)", span.dim(), so_dim(n)),
                n,
                cert,
            );
        }
        full = true;
    } else if full && n > m {
        cert.push(Step::Note { text: format!("so({m}) embeds in so({n}) on every {m}-subset of modes; the closure stays full") });
    }
    if !full {
        return not_universal(format!("closure is a proper subalgebra of so({m}) (dim {}, numeric rank)", span.dim()), n, cert);
    }
    let d = dense_in_one_param(o, config.numeric())?;
    cert.push(Step::Density {
        subject: "O".into(),
        rotation: MatrixRows::from(o.matrix()),
        exact_cos: None,
        q_max: config.q_max,
        tol: config.angle_tol,
        density: d.density,
    });
    match d.density {
        Density::Dense => Ok(verdict(VerdictKind::Universal, n, cert)),
        Density::Unknown => inconclusive("spectral angles irrational multiples of π (numeric classification inconclusive)", n, cert),
        Density::NotDense if config.substitution_depth >= 2 => substitute(&orbit.elements, n, config, cert),
        Density::NotDense => inconclusive("rational spectrum and substitution disabled", n, cert),
    }
}

/// Products of two orbit elements whose spectra are certified dense.
fn substitute(elements: &[RotationMatrix], n: usize, config: &EngineConfig, mut cert: Certificate) -> Result<UniversalityVerdict> {
    let mut dense = Vec::new();
    let mut tried = 0;
    'outer: for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            if tried == SUBSTITUTION_PAIR_CAP {
                break 'outer;
            }
            tried += 1;
            let p = elements[i].mul(&elements[j]);
            let d = dense_in_one_param(&p, config.numeric())?;
            if d.density == Density::Dense {
                cert.push(Step::Density {
                    subject: format!("product {i}·{j}"),
                    rotation: MatrixRows::from(p.matrix()),
                    exact_cos: None,
                    q_max: config.q_max,
                    tol: config.angle_tol,
                    density: d.density,
                });
                dense.push(p);
            }
        }
    }
    cert.push(Step::Note { text: format!("{tried} products of two orbit elements examined, {} with dense spectra", dense.len()) });
    if dense.is_empty() {
        return inconclusive("no product of at most two orbit elements has a certified dense spectrum", n, cert);
    }
    let logs: Vec<SkewMatrix> = dense.iter().map(logm_rotation).collect::<Result<_>>()?;
    let m = elements[0].dim();
    let gens: Vec<SkewMatrix> = mode_subsets(n, m)
        .iter()
        .flat_map(|s| logs.iter().map(move |l| l.embed(n, s)))
        .collect::<Result<_>>()?;
    let (step, span) = closure_step("logarithms of dense products", &gens, config)?;
    cert.push(step);
    if span.is_full() {
        Ok(verdict(VerdictKind::Universal, n, cert))
    } else {
        inconclusive("dense products do not generate a full closure", n, cert)
    }
}

/// Closure of the trivial-action generator embedded on every 3-subset of `k` modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub k: usize,
    pub embeddings: usize,
    pub dim: usize,
    pub expected: usize,
    pub matches: bool,
}

pub fn conjecture_experiment(k: usize, config: &EngineConfig) -> Result<ConjectureReport> {
    if !(4..=9).contains(&k) {
        return Err(Error::Precondition(format!("conjecture experiment runs for 4 ≤ k ≤ 9, got {k}")));
    }
    let gens = all_embeddings(&trivial_embedding(3, 0, 1, 2), k)?;
    let span = closure_with_tol(&gens, config.rank_tol)?;
    let expected = (k - 1) * (k - 2) / 2;
    Ok(ConjectureReport { k, embeddings: gens.len(), dim: span.dim(), expected, matches: span.dim() == expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_surd;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn two_mode_examples() {
        let v = check_two_mode(&AngleSpec::rational_pi(1, 5), 3, &cfg()).unwrap();
        assert!(v.is_universal(), "{:?}", v.kind);
        let v = check_two_mode(&AngleSpec::rational_pi(1, 2), 4, &cfg()).unwrap();
        assert!(matches!(v.kind, VerdictKind::NotUniversal { ref reason } if reason.contains("excluded angle")));
        let v = check_two_mode(&AngleSpec::exact_cos(QuadSurd::from_ratio(1, 3)), 5, &cfg()).unwrap();
        assert!(v.is_universal());
        assert!(v.certificate.iter().any(|s| matches!(s, Step::Closure { dim: 10, .. })));
        assert!(check_two_mode(&AngleSpec::rational_pi(1, 5), 2, &cfg()).is_err());
    }

    #[test]
    fn two_mode_unknown_float_uses_both_branches() {
        let v = check_two_mode(&AngleSpec::radians(1.0), 4, &cfg()).unwrap();
        assert!(v.is_universal());
        let r = v.certificate.replay(&cfg()).unwrap();
        assert!(r.is_consistent(), "{:?}", r.mismatches);
    }

    #[test]
    fn certificates_replay() {
        for spec in [AngleSpec::rational_pi(1, 3), AngleSpec::rational_pi(2, 7), AngleSpec::exact_cos(QuadSurd::from_ratio(1, 3))] {
            let v = check_two_mode(&spec, 4, &cfg()).unwrap();
            assert!(v.is_universal(), "{spec}");
            let r = v.certificate.replay(&cfg()).unwrap();
            assert!(r.is_consistent(), "{:?}", r.mismatches);
            assert!(r.replayed >= 3);
        }
    }

    #[test]
    fn trivial_three_mode() {
        let third = QuadSurd::from_int(1);
        let spec = ThreeModeSpec::exact([third.clone(), -third.clone(), third], AngleSpec::rational_pi(3, 10));
        let v = check_three_mode(&spec, 4, &cfg()).unwrap();
        assert!(v.is_not_universal());
        assert!(v.certificate.iter().any(|s| matches!(s, Step::ExactClosure { dim: 3, .. })));
        assert!(v.certificate.iter().any(|s| matches!(s, Step::Geodetic { supports_relations: false, .. })));
        assert!(v.certificate.replay(&cfg()).unwrap().is_consistent());
        let v = check_three_mode(&spec, 5, &cfg()).unwrap();
        assert!(v.is_not_universal());
        assert!(v.certificate.iter().any(|s| matches!(s, Step::ExactClosure { dim: 6, .. })));
        let v = check_three_mode(&spec, 6, &cfg()).unwrap();
        assert!(matches!(v.kind, VerdictKind::Inconclusive { ref hypothesis } if hypothesis.contains("conjecture")));
    }

    #[test]
    fn nontrivial_three_mode() {
        let e = |s: &str| parse_surd(s).unwrap();
        let spec = ThreeModeSpec::exact([e("0"), e("3/5"), e("4/5")], AngleSpec::exact_cos(QuadSurd::from_ratio(1, 3)));
        let v = check_three_mode(&spec, 3, &cfg()).unwrap();
        assert!(v.is_universal());
        let spec = ThreeModeSpec::exact([e("1"), e("0"), e("0")], AngleSpec::rational_pi(2, 5));
        let v = check_three_mode(&spec, 3, &cfg()).unwrap();
        assert!(v.is_universal(), "{:?}", v.kind);
        assert!(v.certificate.iter().any(|s| matches!(s, Step::Crs { outcome, .. } if outcome.dense)));
        assert!(v.certificate.replay(&cfg()).unwrap().is_consistent());
        let spec = ThreeModeSpec::exact([e("1"), e("0"), e("0")], AngleSpec::rational_pi(1, 2));
        assert!(check_three_mode(&spec, 3, &cfg()).unwrap().is_not_universal());
        assert!(matches!(
            check_three_mode(&ThreeModeSpec::float([0.0; 3], AngleSpec::radians(0.3)), 3, &cfg()),
            Err(Error::Normalization)
        ));
    }

    #[test]
    fn m_mode_paths() {
        let v = check_m_mode(&RotationMatrix::identity(3), 4, &cfg()).unwrap();
        assert!(v.is_not_universal());
        let a = trivial_embedding(3, 0, 1, 2).scale(0.3 * PI / 3f64.sqrt());
        let v = check_m_mode(&exp_skew(&a), 4, &cfg()).unwrap();
        assert!(v.is_not_universal());
        assert!(v.certificate.iter().any(|s| matches!(s, Step::Closure { dim: 3, .. })));
        let v = check_m_mode(&RotationMatrix::givens(2, 0, 1, PI / 5.0), 3, &cfg()).unwrap();
        assert!(v.is_universal());
        let half = RotationMatrix::givens(3, 0, 1, 0.7).embed(4, &[0, 1, 2]).unwrap();
        let v = check_m_mode(&half, 4, &cfg()).unwrap();
        assert!(!v.is_universal());
    }

    #[test]
    fn conjecture_small_k() {
        assert_eq!(conjecture_experiment(4, &cfg()).unwrap().dim, 3);
        assert_eq!(conjecture_experiment(5, &cfg()).unwrap().dim, 6);
        assert!(conjecture_experiment(10, &cfg()).is_err());
    }
}
