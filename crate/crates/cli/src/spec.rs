//! Experiment descriptions, as read from TOML.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ranslice::equilibrium::{SolveOptions, StepRule};
use ranslice::ingest::{AccessRate, Radio, Region, ScenarioConfig, SlotVariation};
use ranslice::pricing::{PricingPolicyKind, DEFAULT_COST_PER_USER, DEFAULT_SIGMA};
use ranslice::GameInstance;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PoaVsRatio,
    PoaVsWeight,
    RuntimeCompare,
    StepsizeSweep,
    CongestionVsRatio,
    CongestionVsMu,
    CongestionVsWeight,
    ProfitVsPrice,
    DynamicTracking,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PoaVsRatio => "poa_vs_ratio",
            ExperimentKind::PoaVsWeight => "poa_vs_weight",
            ExperimentKind::RuntimeCompare => "runtime_compare",
            ExperimentKind::StepsizeSweep => "stepsize_sweep",
            ExperimentKind::CongestionVsRatio => "congestion_vs_ratio",
            ExperimentKind::CongestionVsMu => "congestion_vs_mu",
            ExperimentKind::CongestionVsWeight => "congestion_vs_weight",
            ExperimentKind::ProfitVsPrice => "profit_vs_price",
            ExperimentKind::DynamicTracking => "dynamic_tracking",
        }
    }

    /// Meaning of the grid values.
    pub fn x_label(self) -> &'static str {
        match self {
            ExperimentKind::PoaVsRatio | ExperimentKind::CongestionVsRatio => "R/M",
            ExperimentKind::PoaVsWeight | ExperimentKind::CongestionVsWeight => "price weight bound",
            ExperimentKind::RuntimeCompare => "R",
            ExperimentKind::StepsizeSweep => "step size",
            ExperimentKind::CongestionVsMu => "access rate",
            ExperimentKind::ProfitVsPrice => "mean price (PU)",
            ExperimentKind::DynamicTracking => "iteration",
        }
    }
}

/// Where tower data comes from. Without a path the bundled synthetic Boston
/// table is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSource {
    pub towers: Option<PathBuf>,
    pub radios: Vec<Radio>,
    pub region: Region,
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource {
            towers: None,
            radios: vec![Radio::Lte],
            region: Region::BoundingBox { min_lat: 42.33, min_lon: -71.105, max_lat: 42.385, max_lon: -71.035 },
        }
    }
}

/// Per-series changes to the base scenario and solver setup.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Series {
    pub label: String,
    pub mvnos: Option<usize>,
    pub rrhs: Option<usize>,
    pub n_rb: Option<u32>,
    pub bandwidth_mhz: Option<f64>,
    pub sinr_min_db: Option<f64>,
    pub mu: Option<AccessRate>,
    pub price_weight_max: Option<f64>,
    pub price_mean: Option<f64>,
    pub pricing: Option<PricingPolicyKind>,
}

impl Series {
    pub fn apply(&self, base: &ScenarioConfig) -> ScenarioConfig {
        let mut c = base.clone();
        if let Some(v) = self.mvnos {
            c.mvnos = v;
        }
        if let Some(v) = self.rrhs {
            c.rrhs = v;
        }
        if let Some(v) = self.n_rb {
            c.n_rb = v;
            c.bandwidth_mhz = bandwidth_for(v).unwrap_or(c.bandwidth_mhz);
        }
        if let Some(v) = self.bandwidth_mhz {
            c.bandwidth_mhz = v;
        }
        if let Some(v) = self.sinr_min_db {
            c.sinr_min_db = v;
        }
        if let Some(v) = self.mu {
            c.mu = v;
        }
        if let Some(v) = self.price_weight_max {
            c.price_weight_max = v;
        }
        if let Some(v) = self.price_mean {
            c.price_mean = v;
        }
        c
    }
}

/// LTE channel bandwidth (MHz) carrying `n_rb` resource blocks.
pub fn bandwidth_for(n_rb: u32) -> Option<f64> {
    match n_rb {
        25 => Some(5.0),
        50 => Some(10.0),
        100 => Some(20.0),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepUnit {
    /// The value is the step itself.
    Absolute,
    /// Multiples of `Σ N_r / Σ n_m`.
    Congestion,
    /// Multiples of the inverse-Lipschitz step.
    InverseLipschitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Fixed,
    Decaying,
}

/// Step schedule of the learning dynamics, in instance-relative units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepSetting {
    pub kind: StepKind,
    pub unit: StepUnit,
    /// Fixed step, or first step of a decaying rule, in `unit`s.
    pub value: f64,
    pub beta: f64,
    pub offset: f64,
}

impl Default for StepSetting {
    fn default() -> Self {
        StepSetting { kind: StepKind::Fixed, unit: StepUnit::Congestion, value: 0.5, beta: 0.75, offset: 1e4 }
    }
}

impl StepSetting {
    pub fn with_value(self, value: f64) -> Self {
        StepSetting { value, ..self }
    }

    pub fn rule(&self, game: &GameInstance) -> Result<StepRule> {
        let unit = match self.unit {
            StepUnit::Absolute => 1.0,
            StepUnit::Congestion => StepRule::congestion_unit(game),
            StepUnit::InverseLipschitz => StepRule::inverse_lipschitz(game),
        };
        let gamma = self.value * unit;
        Ok(match self.kind {
            StepKind::Fixed => StepRule::fixed(gamma)?,
            StepKind::Decaying => StepRule::decaying_from(gamma, self.beta, self.offset)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub brd_tol: f64,
    pub brd_max_rounds: usize,
    pub learning_tol: f64,
    pub learning_max_iters: usize,
    pub social_tol: f64,
    pub social_max_iters: usize,
    pub step: StepSetting,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let brd = SolveOptions::brd();
        let learning = SolveOptions::learning();
        let social = SolveOptions::social();
        SolverSettings {
            brd_tol: brd.tol,
            brd_max_rounds: brd.max_iters,
            learning_tol: learning.tol,
            learning_max_iters: learning.max_iters,
            social_tol: social.tol,
            social_max_iters: social.max_iters,
            step: StepSetting::default(),
        }
    }
}

impl SolverSettings {
    pub fn brd(&self) -> SolveOptions {
        SolveOptions::brd().with_tol(self.brd_tol).with_max_iters(self.brd_max_rounds)
    }

    pub fn learning(&self) -> SolveOptions {
        SolveOptions::learning().with_tol(self.learning_tol).with_max_iters(self.learning_max_iters)
    }

    pub fn social(&self) -> SolveOptions {
        SolveOptions::social().with_tol(self.social_tol).with_max_iters(self.social_max_iters)
    }
}

/// Slot loop of the pricing experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PricingSettings {
    pub sigma: f64,
    pub cost_per_user: f64,
    pub slots: usize,
    /// Profit is averaged over this many final slots.
    pub steady_slots: usize,
    pub variation: SlotVariation,
}

impl Default for PricingSettings {
    fn default() -> Self {
        PricingSettings {
            sigma: DEFAULT_SIGMA,
            cost_per_user: DEFAULT_COST_PER_USER,
            slots: 40,
            steady_slots: 20,
            variation: SlotVariation::default(),
        }
    }
}

/// Reshuffled network for the tracking experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSettings {
    pub segments: usize,
    pub segment_length: usize,
    /// Radius around the current equilibrium, relative to `max(1, n_m)`.
    pub neighborhood: f64,
    pub step: StepSetting,
    pub variation: SlotVariation,
}

impl Default for DynamicsSettings {
    fn default() -> Self {
        DynamicsSettings {
            segments: 20,
            segment_length: 50,
            neighborhood: 1e-3,
            step: StepSetting::default(),
            variation: SlotVariation::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub repetitions: usize,
    /// Grid of x values; unused by `dynamic_tracking`.
    #[serde(default)]
    pub x: Vec<f64>,
    #[serde(default)]
    pub data: DataSource,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub series: Vec<Series>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub pricing: PricingSettings,
    #[serde(default)]
    pub dynamics: DynamicsSettings,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).context("parsing experiment spec")?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a spec file; a relative tower path is taken relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut spec = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        if let (Some(towers), Some(dir)) = (&spec.data.towers, path.parent()) {
            if towers.is_relative() {
                spec.data.towers = Some(dir.join(towers));
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.kind != ExperimentKind::DynamicTracking && self.x.is_empty() {
            bail!("the x grid of a {} experiment must not be empty", self.kind.name());
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            bail!("x grid values must be finite");
        }
        match self.kind {
            ExperimentKind::PoaVsRatio | ExperimentKind::CongestionVsRatio | ExperimentKind::RuntimeCompare => {
                if self.x.iter().any(|&v| v <= 0.0) {
                    bail!("x values must be positive for {}", self.kind.name());
                }
            }
            ExperimentKind::CongestionVsMu => {
                if self.x.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
                    bail!("access rates must lie in (0, 1]");
                }
            }
            ExperimentKind::PoaVsWeight | ExperimentKind::CongestionVsWeight => {
                if self.x.iter().any(|&v| v < 0.0) {
                    bail!("price weight bounds must be non-negative");
                }
            }
            ExperimentKind::StepsizeSweep | ExperimentKind::ProfitVsPrice => {
                if self.x.iter().any(|&v| v <= 0.0) {
                    bail!("x values must be positive for {}", self.kind.name());
                }
            }
            ExperimentKind::DynamicTracking => {
                if self.dynamics.segments == 0 || self.dynamics.segment_length == 0 {
                    bail!("dynamics needs at least one segment of positive length");
                }
            }
        }
        if self.kind == ExperimentKind::ProfitVsPrice {
            let p = &self.pricing;
            if p.slots < 2 || p.steady_slots == 0 || p.steady_slots > p.slots {
                bail!("pricing needs slots >= 2 and 1 <= steady_slots <= slots");
            }
            if self.series().iter().any(|s| s.pricing.is_none()) {
                bail!("every profit_vs_price series must name a pricing policy");
            }
        }
        for s in &self.series {
            if let Some(n) = s.n_rb {
                if bandwidth_for(n).is_none() {
                    bail!("series {:?}: n_rb must be 25, 50 or 100", s.label);
                }
            }
        }
        Ok(())
    }

    /// The configured series, or a single unnamed one.
    pub fn series(&self) -> Vec<Series> {
        if self.series.is_empty() {
            vec![Series { label: "default".into(), ..Series::default() }]
        } else {
            self.series.clone()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
