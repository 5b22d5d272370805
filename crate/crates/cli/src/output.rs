//! Writes a run's CSV, JSON summary, SVG plots and scenario snapshot.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ranslice::ingest::ScenarioSnapshot;
use serde_json::json;

use crate::experiments::{plotted_metrics, Outcome};
use crate::plot::{emit_plot, AxesSpec};
use crate::spec::ExperimentSpec;

/// Writes every artifact of `outcome` into `dir` and returns their paths.
pub fn write_outputs(spec: &ExperimentSpec, outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let hash = spec.hash();
    let mut written = Vec::new();

    let csv_path = dir.join(format!("{}.csv", spec.name));
    let file = fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    outcome.table.write_csv(file, &hash, spec.seed)?;
    written.push(csv_path);

    let json_path = dir.join(format!("{}.json", spec.name));
    let summary = json!({
        "spec_hash": hash,
        "seed": spec.seed,
        "kind": spec.kind.name(),
        "spec": spec,
        "table": outcome.table,
        "details": outcome.details,
    });
    fs::write(&json_path, serde_json::to_string_pretty(&summary)? + "\n")?;
    written.push(json_path);

    for metrics in plotted_metrics(spec.kind) {
        let path = dir.join(format!("{}_{}.svg", spec.name, metrics[0]));
        let mut axes = AxesSpec::new(format!("{} ({})", spec.name, spec.kind.name()), spec.kind.x_label(), &metrics);
        axes.comment = format!("spec_hash {hash} seed {}", spec.seed);
        emit_plot(&outcome.table, &axes, &path)?;
        written.push(path);
    }

    if let Some((config, scenario, policy)) = &outcome.sample {
        let path = dir.join(format!("{}_scenario.toml", spec.name));
        let snapshot = ScenarioSnapshot::new(config.clone(), scenario.clone(), Some(policy));
        let body = toml::to_string(&snapshot)?;
        fs::write(&path, format!("# spec_hash {hash} seed {}\n{body}", spec.seed))?;
        written.push(path);
    }
    Ok(written)
}
