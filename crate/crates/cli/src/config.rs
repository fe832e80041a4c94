//! TOML configuration: engine tolerances and caps, word budget, and an
//! optional external geodetic table.
//!
//! ```toml
//! geodetic_table_path = "geodetic.txt"   # relative to this file
//! word_budget = 10000000
//!
//! [engine]
//! q_max = 10000
//! angle_tol = 1e-9
//! ```

use std::path::{Path, PathBuf};

use beamsplit_core::engine::{EngineConfig, GeodeticTable};
use beamsplit_core::words::DEFAULT_BUDGET;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    engine: EngineConfig,
    geodetic_table_path: Option<PathBuf>,
    word_budget: Option<u64>,
}

/// The resolved configuration, echoed into every output document.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub source: Option<String>,
    pub word_budget: u64,
    pub engine: EngineConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Self { source: None, word_budget: DEFAULT_BUDGET as u64, engine: EngineConfig::default() }
    }
}

impl Settings {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let fail = |message: String| CliError::Config { path: path.to_path_buf(), message };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        let file: ConfigFile = toml::from_str(&text).map_err(|e| fail(e.to_string()))?;
        let mut engine = file.engine;
        if let Some(table) = file.geodetic_table_path {
            let table = path.parent().map_or(table.clone(), |dir| dir.join(&table));
            let src =
                std::fs::read_to_string(&table).map_err(|source| CliError::Io { path: table.clone(), source })?;
            engine.geodetic = src
                .parse::<GeodeticTable>()
                .map_err(|e| fail(format!("geodetic table {}: {e}", table.display())))?;
        }
        if file.word_budget == Some(0) {
            return Err(fail("word_budget must be positive".into()));
        }
        Ok(Self {
            source: Some(path.display().to_string()),
            word_budget: file.word_budget.unwrap_or(DEFAULT_BUDGET as u64),
            engine,
        })
    }
}
