//! Universality decisions for real beamsplitters. Each verdict carries a
//! certificate whose steps can be re-run independently.

mod certificate;
mod checks;
pub mod crs;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle::{classify_exact, classify_numeric_with, AngleClass, AngleKind, NumericParams};
use crate::error::{Error, Result};
use crate::exact::{cos_two_pi_fraction, QuadSurd};
use crate::lie::RANK_TOL;
use crate::orbit::{DEDUP_TOL, DIRECTION_TOL, ORBIT_CAP};

pub use certificate::{Certificate, ProductAngleMethod, ReplayReport, Step};
pub use checks::{
    check_m_mode, check_three_mode, check_two_mode, conjecture_experiment, ConjectureReport, ThreeModeSpec,
};
pub use crs::{crs_criterion, crs_dense, geodetic_supports_relations, CrsContext, CrsException, CrsOutcome, GeodeticTable};

/// Tolerances, caps and data tables used by the checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub q_max: u64,
    pub angle_tol: f64,
    pub rank_tol: f64,
    pub dedup_tol: f64,
    pub direction_tol: f64,
    pub orbit_cap: usize,
    pub substitution_depth: usize,
    /// Determinants below this magnitude count as zero.
    pub determinant_tol: f64,
    pub geodetic: GeodeticTable,
}

impl Default for EngineConfig {
    fn default() -> Self {
        let n = NumericParams::default();
        Self {
            q_max: n.q_max,
            angle_tol: n.tol,
            rank_tol: RANK_TOL,
            dedup_tol: DEDUP_TOL,
            direction_tol: DIRECTION_TOL,
            orbit_cap: ORBIT_CAP,
            substitution_depth: 2,
            determinant_tol: 1e-12,
            geodetic: GeodeticTable::shipped(),
        }
    }
}

impl EngineConfig {
    pub fn numeric(&self) -> NumericParams {
        NumericParams { q_max: self.q_max, tol: self.angle_tol }
    }
}

/// How a rotation angle is supplied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum AngleSpec {
    /// `θ ∈ [0, π]` given by its exact cosine.
    ExactCos { cos: QuadSurd },
    /// `θ = pπ/q`.
    RationalPi { p: i64, q: u64 },
    Radians { theta: f64 },
}

impl AngleSpec {
    pub fn exact_cos(cos: QuadSurd) -> Self {
        AngleSpec::ExactCos { cos }
    }

    pub fn rational_pi(p: i64, q: u64) -> Self {
        AngleSpec::RationalPi { p, q }
    }

    pub fn radians(theta: f64) -> Self {
        AngleSpec::Radians { theta }
    }
}

impl fmt::Display for AngleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleSpec::ExactCos { cos } => write!(f, "arccos({cos})"),
            AngleSpec::RationalPi { p, q } => write!(f, "{p}π/{q}"),
            AngleSpec::Radians { theta } => write!(f, "{theta} rad"),
        }
    }
}

/// An angle with its classification and whatever exact data is available.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedAngle {
    pub theta: f64,
    pub class: AngleClass,
    pub cos: Option<QuadSurd>,
    pub sin: Option<QuadSurd>,
}

impl ResolvedAngle {
    pub fn kind(&self) -> AngleKind {
        self.class.kind
    }
}

/// `sin θ` from `cos θ` when `1 − cos²θ` is rational.
fn exact_sin(cos: &QuadSurd) -> Option<QuadSurd> {
    let s2 = QuadSurd::from_int(1).checked_sub(&cos.checked_mul(cos).ok()?).ok()?;
    QuadSurd::sqrt_of(&s2.to_rational()?).ok()
}

pub fn resolve_angle(spec: &AngleSpec, params: NumericParams) -> Result<ResolvedAngle> {
    match spec {
        AngleSpec::ExactCos { cos } => {
            let class = classify_exact(cos)?;
            Ok(ResolvedAngle { theta: cos.to_f64().clamp(-1.0, 1.0).acos(), class, sin: exact_sin(cos), cos: Some(cos.clone()) })
        }
        AngleSpec::RationalPi { p, q } => {
            if *q == 0 {
                return Err(Error::Domain("denominator of pπ/q must be positive".into()));
            }
            let kind = AngleKind::rational(*p, *q);
            let AngleKind::RationalPi { p, q } = kind else { unreachable!() };
            let theta = PI * p as f64 / q as f64;
            let cos = cos_two_pi_fraction(p as i64, 2 * q);
            // sin θ = cos(π/2 − θ)
            let sin = cos_two_pi_fraction(q as i64 - 2 * p as i64, 4 * q);
            let certificate = match &cos {
                Some(c) => format!("given as {kind}; cos θ = {c}"),
                None => format!("given as {kind}"),
            };
            Ok(ResolvedAngle { theta, class: AngleClass { kind, certificate }, cos, sin })
        }
        AngleSpec::Radians { theta } => {
            if !theta.is_finite() {
                return Err(Error::Domain(format!("angle {theta} is not finite")));
            }
            let class = classify_numeric_with(*theta, params);
            Ok(ResolvedAngle { theta: theta.rem_euclid(2.0 * PI), class, cos: None, sin: None })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
    Universal,
    NotUniversal { reason: String },
    Inconclusive { hypothesis: String },
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::Universal => write!(f, "universal"),
            VerdictKind::NotUniversal { reason } => write!(f, "not universal: {reason}"),
            VerdictKind::Inconclusive { hypothesis } => write!(f, "inconclusive: {hypothesis}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalityVerdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub modes_available: usize,
    pub certificate: Certificate,
}

impl UniversalityVerdict {
    pub fn is_universal(&self) -> bool {
        self.kind == VerdictKind::Universal
    }

    pub fn is_not_universal(&self) -> bool {
        matches!(self.kind, VerdictKind::NotUniversal { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.kind, VerdictKind::Inconclusive { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_rational_angles() {
        let r = resolve_angle(&AngleSpec::rational_pi(1, 4), NumericParams::default()).unwrap();
        assert_eq!(r.cos.as_ref().unwrap().to_string(), "(1/2*sqrt(2))");
        assert_eq!(r.sin, r.cos);
        let r = resolve_angle(&AngleSpec::rational_pi(2, 5), NumericParams::default()).unwrap();
        assert!((r.cos.unwrap().to_f64() - (0.4 * PI).cos()).abs() < 1e-15);
        assert!(r.sin.is_none());
        let r = resolve_angle(&AngleSpec::rational_pi(7, 2), NumericParams::default()).unwrap();
        assert_eq!(r.kind(), AngleKind::RationalPi { p: 3, q: 2 });
        assert_eq!(r.sin, Some(QuadSurd::from_int(-1)));
    }

    #[test]
    fn resolve_exact_and_float() {
        let r = resolve_angle(&AngleSpec::exact_cos(QuadSurd::from_ratio(1, 3)), NumericParams::default()).unwrap();
        assert_eq!(r.kind(), AngleKind::IrrationalPi);
        assert_eq!(r.sin.unwrap().to_string(), "(2/3*sqrt(2))");
        let r = resolve_angle(&AngleSpec::radians(-PI / 2.0), NumericParams::default()).unwrap();
        assert_eq!(r.kind(), AngleKind::RationalPi { p: 3, q: 2 });
        assert!((r.theta - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn config_round_trip() {
        let c = EngineConfig::default();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<EngineConfig>(&s).unwrap(), c);
        let partial: EngineConfig = serde_json::from_str(r#"{"q_max": 50}"#).unwrap();
        assert_eq!(partial.q_max, 50);
        assert_eq!(partial.substitution_depth, 2);
    }
}
