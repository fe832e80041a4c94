//! The single output format: an envelope naming its schema and kind, the
//! tool version, the configuration in force, and a kind-specific body.

use beamsplit_core::matrix::ExactMatrix;
use beamsplit_core::RotationMatrix;
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Settings;

pub const SCHEMA_ID: &str = "https://beamsplit.invalid/schema/document-v1.json";
pub const SCHEMA: &str = include_str!("../schema/document.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Verdict,
    AngleClass,
    Orbit,
    Closure,
    GeneratingSet,
    Density,
    IdentitySearch,
}

#[derive(Serialize)]
struct Envelope<'a, B: Serialize> {
    schema: &'static str,
    kind: Kind,
    tool_version: &'static str,
    config: &'a Settings,
    body: B,
}

pub fn render<B: Serialize>(kind: Kind, config: &Settings, body: B) -> String {
    let env = Envelope { schema: SCHEMA_ID, kind, tool_version: env!("CARGO_PKG_VERSION"), config, body };
    let mut s = serde_json::to_string_pretty(&env).expect("documents serialize");
    s.push('\n');
    s
}

/// Exact matrices serialize entries as strings, floating ones as numbers.
pub fn matrix_value(m: &DMatrix<f64>, exact: Option<&ExactMatrix>) -> Value {
    let (r, c) = m.shape();
    match exact {
        Some(e) => json!({
            "mode": "exact",
            "rows": (0..r).map(|i| (0..c).map(|j| e[(i, j)].to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        None => json!({
            "mode": "float",
            "rows": (0..r).map(|i| (0..c).map(|j| m[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    }
}

pub fn rotation_value(r: &RotationMatrix) -> Value {
    matrix_value(r.matrix(), r.exact())
}
