//! Certificate steps and their replay.

use serde::{Deserialize, Serialize};

use super::crs::{crs_criterion, geodetic_supports_relations, CrsOutcome};
use super::{checks, resolve_angle, AngleSpec, EngineConfig};
use crate::angle::{classify_exact, dense_in_one_param, AngleClass, AngleKind, Density, NumericParams};
use crate::error::Result;
use crate::exact::{format_rational, QuadSurd};
use crate::lie::{closure_with_tol, exact_closure, generating_set_determinant, generating_set_matrix, independence_determinant};
use crate::matrix::{MatrixRows, RotationMatrix, SkewMatrix};
use crate::orbit::{is_trivial_action_with, orbit_with, TrivialAction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductAngleMethod {
    /// The minimal polynomial of `e^{iα}` is not cyclotomic.
    Cyclotomic,
    /// Products of finite-order rotations about orthogonal axes have infinite order.
    FiniteOrderCorollary,
}

/// One applied fact, with the inputs needed to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    AngleClass {
        subject: String,
        spec: AngleSpec,
        q_max: u64,
        tol: f64,
        class: AngleClass,
    },
    ExcludedAngle {
        kind: AngleKind,
    },
    Closure {
        subject: String,
        modes: usize,
        generators: Vec<Vec<f64>>,
        rank_tol: f64,
        dim: usize,
        full: bool,
    },
    ExactClosure {
        subject: String,
        modes: usize,
        generators: Vec<Vec<QuadSurd>>,
        dim: usize,
        full: bool,
    },
    GeneratingSet {
        modes: usize,
        theta: f64,
        elements: usize,
        determinant: f64,
        closed_form: f64,
    },
    ProductAngle {
        theta: AngleKind,
        cos_theta: Option<QuadSurd>,
        method: ProductAngleMethod,
        class: AngleClass,
    },
    Density {
        subject: String,
        rotation: MatrixRows,
        exact_cos: Option<QuadSurd>,
        q_max: u64,
        tol: f64,
        density: Density,
    },
    Orbit {
        rotation: MatrixRows,
        dedup_tol: f64,
        size: usize,
        trivial: bool,
    },
    TrivialAction {
        coefficients: [f64; 3],
        exact: Option<Vec<QuadSurd>>,
        direction_tol: f64,
        result: TrivialAction,
    },
    Independence {
        x: Vec<f64>,
        y: Vec<f64>,
        determinant: f64,
        minors: f64,
    },
    Crs {
        orders: (u64, u64),
        separation: AngleKind,
        outcome: CrsOutcome,
    },
    Geodetic {
        cos_alpha: QuadSurd,
        sin_sq_alpha: String,
        supports_relations: bool,
    },
    Conjecture {
        k: usize,
        dim: usize,
        expected: usize,
    },
    Note {
        text: String,
    },
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::AngleClass { .. } => "angle_class",
            Step::ExcludedAngle { .. } => "excluded_angle",
            Step::Closure { .. } => "closure",
            Step::ExactClosure { .. } => "exact_closure",
            Step::GeneratingSet { .. } => "generating_set",
            Step::ProductAngle { .. } => "product_angle",
            Step::Density { .. } => "density",
            Step::Orbit { .. } => "orbit",
            Step::TrivialAction { .. } => "trivial_action",
            Step::Independence { .. } => "independence",
            Step::Crs { .. } => "crs",
            Step::Geodetic { .. } => "geodetic",
            Step::Conjecture { .. } => "conjecture",
            Step::Note { .. } => "note",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub replayed: usize,
    pub informational: usize,
    pub mismatches: Vec<String>,
}

impl ReplayReport {
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn is_excluded(kind: AngleKind) -> bool {
    matches!(kind, AngleKind::RationalPi { p: 0, .. } | AngleKind::RationalPi { p: 1, q: 2 } | AngleKind::RationalPi { p: 1, q: 1 } | AngleKind::RationalPi { p: 3, q: 2 })
}

impl Certificate {
    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter()
    }

    /// Re-runs every computational step and reports disagreements with the recorded values.
    pub fn replay(&self, config: &EngineConfig) -> Result<ReplayReport> {
        let mut report = ReplayReport::default();
        for (i, step) in self.steps.iter().enumerate() {
            match replay_step(step, config)? {
                Some(None) => report.replayed += 1,
                Some(Some(m)) => {
                    report.replayed += 1;
                    report.mismatches.push(format!("step {i} ({}): {m}", step.name()));
                }
                None => report.informational += 1,
            }
        }
        Ok(report)
    }
}

type Outcome = Option<Option<String>>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    Some((!ok).then(what))
}

fn replay_step(step: &Step, config: &EngineConfig) -> Result<Outcome> {
    Ok(match step {
        Step::AngleClass { spec, q_max, tol, class, .. } => {
            let r = resolve_angle(spec, NumericParams { q_max: *q_max, tol: *tol })?;
            check(r.kind() == class.kind, || format!("recomputed {} vs recorded {}", r.kind(), class.kind))
        }
        Step::ExcludedAngle { kind } => check(is_excluded(*kind), || format!("{kind} is not an excluded angle")),
        Step::Closure { modes, generators, rank_tol, dim, full, .. } => {
            let gens: Vec<SkewMatrix> = generators.iter().map(|c| SkewMatrix::from_coords(*modes, c)).collect();
            let span = closure_with_tol(&gens, *rank_tol)?;
            check(span.dim() == *dim && span.is_full() == *full, || format!("recomputed dim {} vs recorded {dim}", span.dim()))
        }
        Step::ExactClosure { modes, generators, dim, full, .. } => {
            let gens: Vec<SkewMatrix> = generators.iter().map(|c| SkewMatrix::from_exact_coords(*modes, c)).collect();
            let span = exact_closure(&gens)?;
            check(span.dim() == *dim && span.is_full() == *full, || format!("recomputed dim {} vs recorded {dim}", span.dim()))
        }
        Step::GeneratingSet { modes, theta, determinant, closed_form, .. } => {
            let d = generating_set_matrix(*modes, *theta)?.determinant();
            let c = generating_set_determinant(*modes, *theta);
            check(close(d, *determinant, 1e-9) && close(c, *closed_form, 1e-12), || {
                format!("recomputed det {d:e} / closed form {c:e} vs recorded {determinant:e} / {closed_form:e}")
            })
        }
        Step::ProductAngle { theta, cos_theta, method, class } => match method {
            ProductAngleMethod::Cyclotomic => {
                let Some(c) = cos_theta else {
                    return Ok(Some(Some("cyclotomic method without an exact cosine".into())));
                };
                let k = classify_exact(&checks::product_cos(c)?)?.kind;
                check(k == class.kind, || format!("recomputed {k} vs recorded {}", class.kind))
            }
            ProductAngleMethod::FiniteOrderCorollary => check(
                theta.is_rational() && !is_excluded(*theta) && class.kind == AngleKind::IrrationalPi,
                || format!("corollary does not apply to θ = {theta}"),
            ),
        },
        Step::Density { rotation, exact_cos, q_max, tol, density, .. } => {
            let d = match exact_cos {
                Some(c) => match classify_exact(c)?.kind {
                    AngleKind::IrrationalPi => Density::Dense,
                    AngleKind::RationalPi { .. } => Density::NotDense,
                    AngleKind::Unknown => Density::Unknown,
                },
                None => {
                    let r = RotationMatrix::new(rotation.to_matrix())?;
                    dense_in_one_param(&r, NumericParams { q_max: *q_max, tol: *tol })?.density
                }
            };
            check(d == *density, || format!("recomputed {d:?} vs recorded {density:?}"))
        }
        Step::Orbit { rotation, dedup_tol, size, trivial } => {
            let r = RotationMatrix::new(rotation.to_matrix())?;
            let o = orbit_with(&r, config.orbit_cap, *dedup_tol)?;
            check(o.len() == *size && o.trivial == *trivial, || format!("recomputed size {} vs recorded {size}", o.len()))
        }
        Step::TrivialAction { coefficients, exact, direction_tol, result } => {
            let a = match exact {
                Some(e) => SkewMatrix::from_exact_coords(3, e),
                None => SkewMatrix::from_coords(3, coefficients),
            };
            let t = is_trivial_action_with(&a, *direction_tol)?;
            check(t.trivial == result.trivial && close(t.distance, result.distance, 1e-9), || {
                format!("recomputed {} vs recorded {}", t.trivial, result.trivial)
            })
        }
        Step::Independence { x, y, determinant, minors } => {
            let (d, m) = independence_determinant(&SkewMatrix::from_coords(3, x), &SkewMatrix::from_coords(3, y))?;
            check(close(d, *determinant, 1e-9) && close(m, *minors, 1e-9), || format!("recomputed {d:e} vs recorded {determinant:e}"))
        }
        Step::Crs { orders, separation, outcome } => {
            let o = crs_criterion(orders.0, orders.1, *separation)?;
            check(o == *outcome, || format!("recomputed dense = {} vs recorded {}", o.dense, outcome.dense))
        }
        Step::Geodetic { cos_alpha, sin_sq_alpha, supports_relations } => {
            let s2 = QuadSurd::from_int(1).checked_sub(&cos_alpha.checked_mul(cos_alpha)?)?;
            match s2.to_rational() {
                Some(r) => {
                    let sup = geodetic_supports_relations(&r, &config.geodetic)?;
                    check(format_rational(&r) == *sin_sq_alpha && sup == *supports_relations, || {
                        format!("recomputed sin²α = {} (listed: {sup})", format_rational(&r))
                    })
                }
                None => Some(Some("sin²α is not rational".into())),
            }
        }
        Step::Conjecture { k, dim, expected } => {
            let r = checks::conjecture_experiment(*k, config)?;
            check(r.dim == *dim && r.expected == *expected, || format!("recomputed dim {} vs recorded {dim}", r.dim))
        }
        Step::Note { .. } => None,
    })
}
