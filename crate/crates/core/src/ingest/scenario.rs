use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Cluster, IngestError};
use crate::capacity::{expected_qoe_users, DistanceDensity, RadioParams};
use crate::exec::{self, Execution};
use crate::model::{GameInstance, Mvno, Rrh};

/// OFDM symbols × subcarriers in one LTE resource block.
pub const RESOURCE_ELEMENTS_PER_RB: f64 = 7.0 * 12.0;

const PRICE_STREAM: u64 = 1;
const WEIGHT_STREAM: u64 = 2;
const ACCESS_STREAM: u64 = 3;

/// Access rate `μ`: pinned, or drawn uniformly from (0, 1] per scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AccessRateRepr", into = "AccessRateRepr")]
pub enum AccessRate {
    Fixed(f64),
    Random,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AccessRateRepr {
    Value(f64),
    Name(String),
}

impl TryFrom<AccessRateRepr> for AccessRate {
    type Error = String;
    fn try_from(r: AccessRateRepr) -> Result<Self, String> {
        match r {
            AccessRateRepr::Value(v) => Ok(AccessRate::Fixed(v)),
            AccessRateRepr::Name(s) if s == "random" => Ok(AccessRate::Random),
            AccessRateRepr::Name(s) => Err(format!("access rate must be a number or \"random\", got {s:?}")),
        }
    }
}

impl From<AccessRate> for AccessRateRepr {
    fn from(a: AccessRate) -> Self {
        match a {
            AccessRate::Fixed(v) => AccessRateRepr::Value(v),
            AccessRate::Random => AccessRateRepr::Name("random".into()),
        }
    }
}

/// Which area the device density is spread over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaBasis {
    /// Bounding box of every tower in the region.
    Region,
    /// Bounding box of the selected towers only.
    Selected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mvnos: usize,
    pub rrhs: usize,
    /// Resource blocks per RRH: 25, 50 or 100.
    pub n_rb: u32,
    /// Channel bandwidth in MHz: 5, 10 or 20.
    pub bandwidth_mhz: f64,
    pub sinr_min_db: f64,
    pub mu: AccessRate,
    /// Upper bound `π^P` of the per-MVNO price weights.
    pub price_weight_max: f64,
    pub price_mean: f64,
    pub price_std: f64,
    pub device_density_per_km2: f64,
    pub area_basis: AreaBasis,
    /// Replaces `Λ_r = N_RB · 7 · 12` when set.
    pub capacity_override: Option<f64>,
    /// Coverage disk radius for towers without a range, meters.
    pub default_radius_m: f64,
    pub min_radius_m: f64,
    pub max_radius_m: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mvnos: 20,
            rrhs: 20,
            n_rb: 100,
            bandwidth_mhz: 20.0,
            sinr_min_db: -5.0,
            mu: AccessRate::Random,
            price_weight_max: 5e-4,
            price_mean: 10.0,
            price_std: 4.0,
            device_density_per_km2: 5000.0,
            area_basis: AreaBasis::Region,
            capacity_override: None,
            default_radius_m: 1000.0,
            min_radius_m: 100.0,
            max_radius_m: 3000.0,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        let fail = |msg: String| Err(IngestError::InvalidConfig(msg));
        if self.mvnos == 0 || self.rrhs == 0 {
            return fail("mvnos and rrhs must be positive".into());
        }
        if ![25, 50, 100].contains(&self.n_rb) {
            return fail(format!("n_rb must be 25, 50 or 100, got {}", self.n_rb));
        }
        if ![5.0, 10.0, 20.0].contains(&self.bandwidth_mhz) {
            return fail(format!("bandwidth_mhz must be 5, 10 or 20, got {}", self.bandwidth_mhz));
        }
        if let AccessRate::Fixed(mu) = self.mu {
            if !(mu > 0.0 && mu <= 1.0) {
                return fail(format!("mu must lie in (0, 1], got {mu}"));
            }
        }
        if !(self.price_weight_max >= 0.0) || !(self.price_mean > 0.0) || !(self.price_std >= 0.0) {
            return fail("price parameters must be non-negative with a positive mean".into());
        }
        if !(self.device_density_per_km2 >= 0.0) {
            return fail("device density must be non-negative".into());
        }
        if let Some(c) = self.capacity_override {
            if !(c > 0.0) {
                return fail(format!("capacity_override must be positive, got {c}"));
            }
        }
        if !(self.min_radius_m > 0.0 && self.min_radius_m <= self.default_radius_m && self.default_radius_m <= self.max_radius_m) {
            return fail("coverage radii must satisfy 0 < min <= default <= max".into());
        }
        Ok(())
    }

    /// `Λ_r` in resource elements.
    pub fn resource_capacity(&self) -> f64 {
        self.capacity_override.unwrap_or(self.n_rb as f64 * RESOURCE_ELEMENTS_PER_RB)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// How much a scenario changes between slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlotVariation {
    /// Each MVNO's demand is scaled by a factor drawn from `[1 - s, 1 + s]`.
    pub demand_spread: f64,
    /// Each RRH's coverage radius is scaled by a factor drawn from `[1 - s, 1 + s]`.
    pub radius_spread: f64,
}

impl Default for SlotVariation {
    fn default() -> Self {
        SlotVariation { demand_spread: 0.3, radius_spread: 0.3 }
    }
}

/// A generated game plus the radio model it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub game: GameInstance,
    pub radio: RadioParams,
    pub densities: Vec<DistanceDensity>,
    /// `Λ_r`, identical for every RRH.
    pub resource_capacity: f64,
    pub area_km2: f64,
    /// Demand `n_m` shared by every MVNO.
    pub demand_per_mvno: f64,
    /// RRHs whose coverage disk reaches beyond the SINR feasibility radius.
    pub infeasible_rrhs: usize,
}

impl Scenario {
    /// A new network configuration for the next slot: demands and coverage
    /// radii are jittered, capacities recomputed; prices are kept.
    pub fn perturbed(&self, variation: &SlotVariation, rng: &mut impl Rng, exec: Execution) -> Result<GameInstance, IngestError> {
        let demands: Vec<f64> = (0..self.game.num_players())
            .map(|_| self.demand_per_mvno * jitter(rng, variation.demand_spread))
            .collect();
        let densities: Vec<DistanceDensity> = self
            .densities
            .iter()
            .map(|d| match *d {
                DistanceDensity::UniformDisk { radius } => {
                    DistanceDensity::UniformDisk { radius: radius * jitter(rng, variation.radius_spread) }
                }
                other => other,
            })
            .collect();
        let (qoe, _) = capacities(&self.radio, self.resource_capacity, &densities, exec)?;
        if qoe.iter().any(|&n| n <= 0.0) {
            return Err(IngestError::NoCapacity);
        }
        Ok(self.game.with_demands(&demands)?.with_qoe_users(&qoe)?)
    }
}

fn jitter(rng: &mut impl Rng, spread: f64) -> f64 {
    if spread <= 0.0 {
        1.0
    } else {
        rng.random_range(1.0 - spread..=1.0 + spread)
    }
}

fn capacities(
    radio: &RadioParams,
    capacity: f64,
    densities: &[DistanceDensity],
    exec: Execution,
) -> Result<(Vec<f64>, usize), IngestError> {
    let estimates = exec::map(densities, exec, |d| expected_qoe_users(radio, capacity, d));
    let mut qoe = Vec::with_capacity(estimates.len());
    let mut infeasible = 0;
    for e in estimates {
        let e = e?;
        infeasible += usize::from(e.has_infeasible_region());
        qoe.push(e.users);
    }
    Ok((qoe, infeasible))
}

/// Builds a priced, capacity-annotated game on `cluster`.
///
/// Every random draw comes from a seeded stream dedicated to one quantity
/// (prices, weights, access rate), so changing one parameter leaves the
/// other draws untouched. Prices are drawn for every tower in the region and
/// then restricted to the selection.
pub fn generate_scenario(cluster: &Cluster, config: &ScenarioConfig, exec: Execution) -> Result<Scenario, IngestError> {
    config.validate()?;
    if cluster.sites.len() != config.rrhs {
        return Err(IngestError::InvalidConfig(format!(
            "cluster has {} sites but config asks for {} RRHs",
            cluster.sites.len(),
            config.rrhs
        )));
    }

    let mut price_rng = config.rng(PRICE_STREAM);
    let region_prices: Vec<f64> = (0..cluster.region_size)
        .map(|_| loop {
            let z: f64 = StandardNormal.sample(&mut price_rng);
            let p = config.price_mean + config.price_std * z;
            if p >= 0.0 {
                break p;
            }
        })
        .collect();

    let mu = match config.mu {
        AccessRate::Fixed(mu) => mu,
        AccessRate::Random => 1.0 - config.rng(ACCESS_STREAM).random::<f64>(),
    };
    let radio = RadioParams::lte(config.bandwidth_mhz * 1e6, config.sinr_min_db, mu)?;
    let resource_capacity = config.resource_capacity();
    let densities: Vec<DistanceDensity> = cluster
        .sites
        .iter()
        .map(|s| DistanceDensity::UniformDisk {
            radius: s.range.unwrap_or(config.default_radius_m).clamp(config.min_radius_m, config.max_radius_m),
        })
        .collect();
    let (qoe, infeasible_rrhs) = capacities(&radio, resource_capacity, &densities, exec)?;
    if qoe.iter().all(|&n| n <= 0.0) {
        return Err(IngestError::NoCapacity);
    }
    if qoe.iter().any(|&n| n <= 0.0) {
        return Err(IngestError::InvalidConfig("an RRH has zero QoE capacity; shrink max_radius_m".into()));
    }

    let rrhs: Vec<Rrh> = cluster
        .sites
        .iter()
        .zip(&qoe)
        .map(|(s, &n)| Rrh {
            id: s.id.clone(),
            position: s.position,
            class_id: s.class_id,
            price: region_prices[s.region_index],
            capacity: resource_capacity,
            qoe_users: n,
        })
        .collect();

    let area_km2 = match config.area_basis {
        AreaBasis::Region => cluster.region_area_km2,
        AreaBasis::Selected => cluster.selected_area_km2,
    };
    let demand_per_mvno = config.device_density_per_km2 * area_km2 / config.mvnos as f64;
    let mut weight_rng = config.rng(WEIGHT_STREAM);
    let mvnos: Vec<Mvno> = (0..config.mvnos)
        .map(|m| Mvno::new(format!("mvno-{m}"), demand_per_mvno, config.price_weight_max * weight_rng.random::<f64>()))
        .collect();

    Ok(Scenario {
        game: GameInstance::new(rrhs, mvnos)?,
        radio,
        densities,
        resource_capacity,
        area_km2,
        demand_per_mvno,
        infeasible_rrhs,
    })
}
