//! Congestion levels, player costs and the exact potential of the slicing game.
//!
//! Player `m` pays `c_{m,r} = φ_r + π_m p_r` per user routed through RRH
//! `r`, where `φ_r = X_r / N_r` is the congestion level of `r`.

use serde::{Deserialize, Serialize};

use crate::model::{AllocationPolicy, GameInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub congestion_cost: f64,
    pub monetary_cost: f64,
    pub total: f64,
}

/// `φ_r = (1/N_r) Σ_m ξ_{m,r}`.
pub fn congestion_level(game: &GameInstance, policy: &AllocationPolicy, r: usize) -> f64 {
    let load: f64 = (0..game.num_players()).map(|m| policy.get(m, r)).sum();
    load * game.inv_qoe()[r]
}

/// Congestion level of every RRH.
pub fn congestion_levels(game: &GameInstance, policy: &AllocationPolicy) -> Vec<f64> {
    policy
        .column_sums()
        .iter()
        .zip(game.inv_qoe())
        .map(|(x, inv)| x * inv)
        .collect()
}

/// Per-user cost `c_{m,r}` given the RRH's aggregate load.
#[inline]
pub(crate) fn unit_cost(game: &GameInstance, load: f64, m: usize, r: usize) -> f64 {
    load * game.inv_qoe()[r] + game.eta(m, r)
}

/// `v_{m,r} = c_{m,r} + ξ_{m,r}/N_r`, the partial derivative of
/// `ξ_{m,r} c_{m,r}` with respect to `ξ_{m,r}`.
pub fn marginal_cost(game: &GameInstance, policy: &AllocationPolicy, m: usize, r: usize) -> f64 {
    let load: f64 = (0..game.num_players()).map(|k| policy.get(k, r)).sum();
    unit_cost(game, load, m, r) + policy.get(m, r) * game.inv_qoe()[r]
}

/// Fills `out` (row-major, M×R) with every player's marginal cost, reusing
/// precomputed loads.
pub(crate) fn marginal_costs_into(game: &GameInstance, policy: &AllocationPolicy, loads: &[f64], out: &mut [f64]) {
    let rrhs = game.num_rrhs();
    for m in 0..game.num_players() {
        let row = policy.row(m);
        for r in 0..rrhs {
            out[m * rrhs + r] = unit_cost(game, loads[r], m, r) + row[r] * game.inv_qoe()[r];
        }
    }
}

pub fn player_cost(game: &GameInstance, policy: &AllocationPolicy, m: usize) -> CostBreakdown {
    let loads = policy.column_sums();
    player_cost_with_loads(game, policy, &loads, m)
}

pub(crate) fn player_cost_with_loads(
    game: &GameInstance,
    policy: &AllocationPolicy,
    loads: &[f64],
    m: usize,
) -> CostBreakdown {
    let weight = game.mvnos()[m].price_weight;
    let mut congestion_cost = 0.0;
    let mut spend = 0.0;
    for (r, &x) in policy.row(m).iter().enumerate() {
        congestion_cost += x * loads[r] * game.inv_qoe()[r];
        spend += x * game.rrhs()[r].price;
    }
    let monetary_cost = weight * spend;
    CostBreakdown { congestion_cost, monetary_cost, total: congestion_cost + monetary_cost }
}

/// Unweighted amount player `m` pays the operator, `Σ_r ξ_{m,r} p_r`.
pub fn deployment_spend(game: &GameInstance, policy: &AllocationPolicy, m: usize) -> f64 {
    policy.row(m).iter().zip(game.rrhs()).map(|(x, r)| x * r.price).sum()
}

/// Total cost over all players.
pub fn social_welfare(game: &GameInstance, policy: &AllocationPolicy) -> f64 {
    let loads = policy.column_sums();
    (0..game.num_players())
        .map(|m| player_cost_with_loads(game, policy, &loads, m).total)
        .sum()
}

/// Exact potential of the game:
/// `Σ_r Σ_m [ξ_{m,r}²/N_r + η_{m,r} ξ_{m,r} + (1/N_r) Σ_{k<m} ξ_{m,r} ξ_{k,r}]`.
pub fn potential(game: &GameInstance, policy: &AllocationPolicy) -> f64 {
    let rrhs = game.num_rrhs();
    let mut before = vec![0.0; rrhs];
    let mut total = 0.0;
    for m in 0..game.num_players() {
        for (r, &x) in policy.row(m).iter().enumerate() {
            total += (x * x + x * before[r]) * game.inv_qoe()[r] + game.eta(m, r) * x;
            before[r] += x;
        }
    }
    total
}
