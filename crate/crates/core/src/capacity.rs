//! QoE-preserving user capacity `N_r` of a radio head.
//!
//! Users at distance `d` receive power `k (d0/d)^α`. The RRH is treated as an
//! M/M/1 queue with service rate `Λ_r` and arrival rate `μ N_r`; requiring
//! the resulting SINR to stay at `sinr_min` yields a closed form for `N_r`.
//! The expected capacity averages that closed form over a distance density.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Transceiver constant for 2.4 GHz LTE with 3 dBi isotropic antennas.
pub const LTE_K: f64 = 9.89e-5;
/// Thermal noise power spectral density in dBm/Hz.
pub const NOISE_DBM_PER_HZ: f64 = -174.0;

const MAX_PANELS: usize = 1 << 20;
const QUAD_RTOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("invalid radio parameter {name} = {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("distance {d} m is inside the reference distance {d0} m")]
    NearField { d: f64, d0: f64 },
    #[error("SINR target unreachable at {d} m (numerator {numerator}, denominator {denominator})")]
    InfeasibleSinr { d: f64, numerator: f64, denominator: f64 },
    #[error("invalid distance density: {0}")]
    InvalidDensity(&'static str),
    #[error("quadrature did not converge within {panels} panels (last relative change {change})")]
    Quadrature { panels: usize, change: f64 },
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Thermal noise over a channel of `bandwidth_hz`, in watts.
pub fn thermal_noise_watts(bandwidth_hz: f64) -> f64 {
    dbm_to_watts(NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transceiver constant (gains, transmit power, frequency).
    pub k: f64,
    /// Far-field reference distance in meters.
    pub d0: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Channel noise power in watts.
    pub noise: f64,
    /// Minimum SINR, linear scale.
    pub sinr_min: f64,
    /// Fraction of `N_r` requesting access (arrival rate `μ N_r`).
    pub mu: f64,
}

impl RadioParams {
    pub fn new(k: f64, d0: f64, alpha: f64, noise: f64, sinr_min: f64, mu: f64) -> Result<Self, CapacityError> {
        let p = RadioParams { k, d0, alpha, noise, sinr_min, mu };
        p.validate()?;
        Ok(p)
    }

    /// Urban LTE setup: `k = 9.89e-5`, `d0 = 1 m`, `α = 3`, thermal noise over
    /// `bandwidth_hz`.
    pub fn lte(bandwidth_hz: f64, sinr_min_db: f64, mu: f64) -> Result<Self, CapacityError> {
        Self::new(LTE_K, 1.0, 3.0, thermal_noise_watts(bandwidth_hz), db_to_linear(sinr_min_db), mu)
    }

    pub fn validate(&self) -> Result<(), CapacityError> {
        let check = |name, value: f64, ok: bool| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(CapacityError::InvalidParam { name, value })
            }
        };
        check("k", self.k, self.k > 0.0)?;
        check("d0", self.d0, self.d0 > 0.0)?;
        check("alpha", self.alpha, self.alpha >= 1.0)?;
        check("noise", self.noise, self.noise > 0.0)?;
        check("sinr_min", self.sinr_min, self.sinr_min > 0.0)?;
        check("mu", self.mu, self.mu > 0.0 && self.mu <= 1.0)?;
        Ok(())
    }

    /// Distance beyond which no user count can meet the SINR target.
    pub fn feasibility_radius(&self) -> f64 {
        let s = self.sinr_min;
        let p_min = s * self.noise / (1.0 + s);
        self.d0 * (self.k / p_min).powf(1.0 / self.alpha)
    }

    /// Distance below which the closed form exceeds `Λ_r` and gets clamped,
    /// if such a region exists.
    pub fn saturation_radius(&self) -> Option<f64> {
        let s = self.sinr_min;
        let slope = 1.0 + s - self.mu * (1.0 + 2.0 * s);
        if slope <= 0.0 {
            return None;
        }
        let p_sat = s * self.noise * (1.0 - self.mu) / slope;
        if p_sat <= 0.0 {
            // μ = 1: ratio < 1 everywhere, never saturates
            return None;
        }
        Some(self.d0 * (self.k / p_sat).powf(1.0 / self.alpha))
    }
}

/// Received power at distance `d`.
pub fn received_power(params: &RadioParams, d: f64) -> Result<f64, CapacityError> {
    if !(d >= params.d0) {
        return Err(CapacityError::NearField { d, d0: params.d0 });
    }
    Ok(params.k * (params.d0 / d).powf(params.alpha))
}

/// Closed-form user capacity at distance `d` before clamping into `[0, Λ_r]`.
pub fn qoe_users_unclamped(params: &RadioParams, capacity: f64, d: f64) -> Result<f64, CapacityError> {
    let p = received_power(params, d)?;
    let s = params.sinr_min;
    let sn = s * params.noise;
    let numerator = p * (1.0 + s) - sn;
    let denominator = p * (1.0 + 2.0 * s) - sn;
    if numerator < 0.0 || denominator <= 0.0 {
        return Err(CapacityError::InfeasibleSinr { d, numerator, denominator });
    }
    Ok(capacity / params.mu * numerator / denominator)
}

/// Maximum number of users served at distance `d` while meeting the SINR
/// target, clamped to the queue-stability limit `Λ_r`.
pub fn qoe_users_at_distance(params: &RadioParams, capacity: f64, d: f64) -> Result<f64, CapacityError> {
    Ok(qoe_users_unclamped(params, capacity, d)?.clamp(0.0, capacity))
}

/// Distribution of the user-to-RRH distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistanceDensity {
    /// Users uniform in a disk of `radius` around the RRH: `f(d) = 2d / radius²`.
    UniformDisk { radius: f64 },
    /// Distance uniform on `[lo, hi]`.
    UniformInterval { lo: f64, hi: f64 },
}

impl DistanceDensity {
    pub fn validate(&self) -> Result<(), CapacityError> {
        match *self {
            DistanceDensity::UniformDisk { radius } if radius > 0.0 && radius.is_finite() => Ok(()),
            DistanceDensity::UniformDisk { .. } => Err(CapacityError::InvalidDensity("disk radius must be positive")),
            DistanceDensity::UniformInterval { lo, hi } if lo >= 0.0 && hi > lo && hi.is_finite() => Ok(()),
            DistanceDensity::UniformInterval { .. } => {
                Err(CapacityError::InvalidDensity("interval must satisfy 0 <= lo < hi"))
            }
        }
    }

    pub fn pdf(&self, d: f64) -> f64 {
        match *self {
            DistanceDensity::UniformDisk { radius } => {
                if (0.0..=radius).contains(&d) {
                    2.0 * d / (radius * radius)
                } else {
                    0.0
                }
            }
            DistanceDensity::UniformInterval { lo, hi } => {
                if (lo..=hi).contains(&d) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }

    /// `[lower, upper]` support bounds.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            DistanceDensity::UniformDisk { radius } => (0.0, radius),
            DistanceDensity::UniformInterval { lo, hi } => (lo, hi),
        }
    }

    /// Inverse CDF, for sampling.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            DistanceDensity::UniformDisk { radius } => radius * u.sqrt(),
            DistanceDensity::UniformInterval { lo, hi } => lo + (hi - lo) * u,
        }
    }
}

/// Result of averaging the capacity over a distance density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QoeEstimate {
    pub users: f64,
    /// Probability mass where the SINR target is unreachable (contributes 0).
    pub infeasible_mass: f64,
    /// Panels per piece used by the final Simpson pass.
    pub panels: usize,
}

impl QoeEstimate {
    pub fn has_infeasible_region(&self) -> bool {
        self.infeasible_mass > 0.0
    }
}

/// Capacity at distance `d` as used inside the expectation: near-field
/// distances are evaluated at `d0` and unreachable distances contribute 0.
fn capacity_integrand(params: &RadioParams, capacity: f64, d: f64) -> f64 {
    qoe_users_at_distance(params, capacity, d.max(params.d0)).unwrap_or(0.0)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Expected capacity `∫ f(τ) N_r(τ) dτ` by composite Simpson quadrature.
///
/// The support is split at the reference distance, the saturation radius and
/// the feasibility radius so each piece is smooth; panel counts double until
/// the relative change drops below 1e-8.
pub fn expected_qoe_users(
    params: &RadioParams,
    capacity: f64,
    density: &DistanceDensity,
) -> Result<QoeEstimate, CapacityError> {
    params.validate()?;
    density.validate()?;
    let (lo, hi) = density.support();
    let feasible_edge = params.feasibility_radius();
    let mut cuts = vec![lo, hi, params.d0, feasible_edge];
    cuts.extend(params.saturation_radius());
    cuts.retain(|c| (lo..=hi).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let pieces: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    let integrand = |d: f64| density.pdf(d) * capacity_integrand(params, capacity, d);
    let pdf = |d: f64| density.pdf(d);

    let infeasible_mass: f64 = pieces
        .iter()
        .filter(|(a, _)| *a >= feasible_edge)
        .map(|&(a, b)| simpson(&pdf, a, b, 64))
        .sum();

    let total = |panels: usize| -> f64 { pieces.iter().map(|&(a, b)| simpson(&integrand, a, b, panels)).sum() };

    let max_per_piece = (MAX_PANELS / pieces.len().max(1)).max(2);
    let mut panels = 8;
    let mut prev = total(panels);
    let mut change = f64::INFINITY;
    while panels * 2 <= max_per_piece {
        panels *= 2;
        let next = total(panels);
        change = (next - prev).abs() / next.abs().max(f64::MIN_POSITIVE);
        if next == 0.0 || change < QUAD_RTOL {
            return Ok(QoeEstimate { users: next.clamp(0.0, capacity), infeasible_mass, panels });
        }
        prev = next;
    }
    Err(CapacityError::Quadrature { panels, change })
}
