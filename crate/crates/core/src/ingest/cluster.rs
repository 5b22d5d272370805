use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{IngestError, TowerRecord};

const EARTH_RADIUS_M: f64 = 6_371_008.8;
pub(crate) const SELECTION_STREAM: u64 = 0;

/// Geographic area from which a cluster's towers are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    BoundingBox { min_lat: f64, min_lon: f64, max_lat: f64, max_lon: f64 },
    Circle { lat: f64, lon: f64, radius_m: f64 },
}

impl Region {
    fn center(&self) -> (f64, f64) {
        match *self {
            Region::BoundingBox { min_lat, min_lon, max_lat, max_lon } => {
                (0.5 * (min_lat + max_lat), 0.5 * (min_lon + max_lon))
            }
            Region::Circle { lat, lon, .. } => (lat, lon),
        }
    }

    fn contains(&self, lat: f64, lon: f64) -> bool {
        match *self {
            Region::BoundingBox { min_lat, min_lon, max_lat, max_lon } => {
                (min_lat..=max_lat).contains(&lat) && (min_lon..=max_lon).contains(&lon)
            }
            Region::Circle { lat: clat, lon: clon, radius_m } => {
                let (x, y) = project((clat, clon), lat, lon);
                x.hypot(y) <= radius_m
            }
        }
    }
}

/// Equirectangular projection of `(lat, lon)` to meters east/north of `origin`.
pub fn project(origin: (f64, f64), lat: f64, lon: f64) -> (f64, f64) {
    let (lat0, lon0) = origin;
    let x = EARTH_RADIUS_M * (lon - lon0).to_radians() * lat0.to_radians().cos();
    let y = EARTH_RADIUS_M * (lat - lat0).to_radians();
    (x, y)
}

/// A selected tower, in local planar coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: String,
    pub position: (f64, f64),
    pub lat: f64,
    pub lon: f64,
    pub range: Option<f64>,
    pub class_id: u32,
    /// Index among all towers of the region, in canonical order.
    pub region_index: usize,
}

/// Coarse cell class from the coverage range: 0 macro, 1 micro, 2 pico, 3 femto.
fn class_from_range(range: Option<f64>) -> u32 {
    match range {
        Some(r) if r < 200.0 => 3,
        Some(r) if r < 1_000.0 => 2,
        Some(r) if r < 3_000.0 => 1,
        _ => 0,
    }
}

/// The RRH skeleton of a cluster before prices and capacities are assigned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub sites: Vec<Site>,
    /// Number of towers inside the region.
    pub region_size: usize,
    /// Bounding-box area of every tower in the region, km².
    pub region_area_km2: f64,
    /// Bounding-box area of the selected towers, km².
    pub selected_area_km2: f64,
}

fn bbox_area_km2<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if x1 < x0 {
        return 0.0;
    }
    (x1 - x0) * (y1 - y0) / 1e6
}

/// Picks `count` towers of `region` uniformly without replacement.
///
/// Towers are first put in a canonical order (latitude, longitude, id) and
/// then shuffled with `seed`; the selection is the shuffled prefix, so for a
/// fixed seed a smaller cluster is always a subset of a larger one. Sites
/// come back in canonical order.
pub fn build_cluster(records: &[TowerRecord], region: &Region, count: usize, seed: u64) -> Result<Cluster, IngestError> {
    let origin = region.center();
    let mut inside: Vec<&TowerRecord> = records.iter().filter(|t| region.contains(t.lat, t.lon)).collect();
    inside.sort_by(|a, b| a.lat.total_cmp(&b.lat).then(a.lon.total_cmp(&b.lon)).then_with(|| a.id().cmp(&b.id())));
    if count == 0 || count > inside.len() {
        return Err(IngestError::InsufficientTowers { requested: count, available: inside.len() });
    }
    let positions: Vec<(f64, f64)> = inside.iter().map(|t| project(origin, t.lat, t.lon)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SELECTION_STREAM);
    let mut order: Vec<usize> = (0..inside.len()).collect();
    order.shuffle(&mut rng);
    let mut chosen = order[..count].to_vec();
    chosen.sort_unstable();

    let sites: Vec<Site> = chosen
        .iter()
        .map(|&i| {
            let t = inside[i];
            Site {
                id: t.id(),
                position: positions[i],
                lat: t.lat,
                lon: t.lon,
                range: t.range,
                class_id: class_from_range(t.range),
                region_index: i,
            }
        })
        .collect();
    Ok(Cluster {
        region_size: inside.len(),
        region_area_km2: bbox_area_km2(positions.iter()),
        selected_area_km2: bbox_area_km2(sites.iter().map(|s| &s.position)),
        sites,
    })
}
