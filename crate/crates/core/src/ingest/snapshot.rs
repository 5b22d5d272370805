use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IngestError, Scenario, ScenarioConfig};
use crate::model::AllocationPolicy;

const FORMAT_VERSION: u32 = 1;

/// A scenario frozen to disk as TOML, optionally with a solved policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSnapshot {
    pub format_version: u32,
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<Vec<Vec<f64>>>,
}

impl ScenarioSnapshot {
    pub fn new(config: ScenarioConfig, scenario: Scenario, policy: Option<&AllocationPolicy>) -> Self {
        ScenarioSnapshot { format_version: FORMAT_VERSION, config, scenario, policy: policy.map(|p| p.to_rows()) }
    }

    pub fn policy(&self) -> Result<Option<AllocationPolicy>, IngestError> {
        self.policy.as_deref().map(AllocationPolicy::from_rows).transpose().map_err(IngestError::from)
    }
}

pub fn write_snapshot(path: impl AsRef<Path>, snapshot: &ScenarioSnapshot) -> Result<(), IngestError> {
    let path = path.as_ref();
    let text = toml::to_string(snapshot).map_err(|e| IngestError::Snapshot(e.to_string()))?;
    fs::write(path, text).map_err(|source| IngestError::Io { path: path.display().to_string(), source })
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<ScenarioSnapshot, IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    let snapshot: ScenarioSnapshot = toml::from_str(&text).map_err(|e| IngestError::Snapshot(e.to_string()))?;
    if snapshot.format_version != FORMAT_VERSION {
        return Err(IngestError::Snapshot(format!("unsupported format version {}", snapshot.format_version)));
    }
    Ok(snapshot)
}
