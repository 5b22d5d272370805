//! Cell-tower ingestion, cluster extraction and scenario generation.

mod cluster;
mod scenario;
mod snapshot;
mod towers;

pub use cluster::{build_cluster, project, Cluster, Region, Site};
pub use scenario::{
    generate_scenario, AccessRate, AreaBasis, Scenario, ScenarioConfig, SlotVariation, RESOURCE_ELEMENTS_PER_RB,
};
pub use snapshot::{read_snapshot, write_snapshot, ScenarioSnapshot};
pub use towers::{parse_towers, parse_towers_from_reader, Radio, TowerRecord, TowerSet};

use thiserror::Error;

use crate::capacity::CapacityError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("no valid tower rows ({skipped} skipped)")]
    NoRecords { skipped: usize },
    #[error("region holds {available} towers but {requested} were requested")]
    InsufficientTowers { requested: usize, available: usize },
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
    #[error("every RRH has zero QoE capacity under this configuration")]
    NoCapacity,
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("snapshot encoding: {0}")]
    Snapshot(String),
}
