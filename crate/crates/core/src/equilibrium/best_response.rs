use serde::{Deserialize, Serialize};

use crate::model::{AllocationPolicy, GameInstance};

/// A player's cost-minimizing row together with its KKT multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub row: Vec<f64>,
    /// Common marginal cost `λ` on every used RRH.
    pub multiplier: f64,
}

/// Unique minimizer of player `m`'s cost against the other rows of `policy`
/// (row `m` itself is ignored).
pub fn best_response(game: &GameInstance, policy: &AllocationPolicy, m: usize) -> Vec<f64> {
    best_response_with_multiplier(game, policy, m).row
}

pub fn best_response_with_multiplier(game: &GameInstance, policy: &AllocationPolicy, m: usize) -> BestResponse {
    let loads = policy.column_sums();
    let others: Vec<f64> = loads.iter().zip(policy.row(m)).map(|(x, own)| x - own).collect();
    let mut row = vec![0.0; game.num_rrhs()];
    let mut scratch = Scratch::default();
    let multiplier = best_response_into(game, m, &others, &mut row, &mut scratch);
    BestResponse { row, multiplier }
}

#[derive(Default)]
pub(crate) struct Scratch {
    linear: Vec<f64>,
    order: Vec<usize>,
}

/// Best response of player `m` given the opponents' load on each RRH.
///
/// The cost restricted to row `m` is `Σ_r f_r ξ_r + ξ_r²/N_r` with
/// `f_r = others_r/N_r + η_{m,r}`. Stationarity on the scaled simplex gives
/// `ξ_r = max(0, (λ - f_r) N_r/2)`; `λ` is found by scanning the breakpoints
/// `f_r` in increasing order. Returns `λ`.
pub(crate) fn best_response_into(
    game: &GameInstance,
    m: usize,
    others: &[f64],
    out: &mut [f64],
    scratch: &mut Scratch,
) -> f64 {
    let rrhs = game.num_rrhs();
    let inv = game.inv_qoe();
    scratch.linear.clear();
    scratch.linear.extend((0..rrhs).map(|r| others[r].max(0.0) * inv[r] + game.eta(m, r)));
    let f = &scratch.linear;
    scratch.order.clear();
    scratch.order.extend(0..rrhs);
    scratch.order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));

    let demand = game.demand(m);
    // active set is a prefix of `order`; weights w_r = N_r / 2
    let mut weight_sum = 0.0;
    let mut weighted_f = 0.0;
    let mut lambda = f[scratch.order[0]];
    for (k, &r) in scratch.order.iter().enumerate() {
        let w = 0.5 * game.qoe_users(r);
        weight_sum += w;
        weighted_f += w * f[r];
        lambda = (demand + weighted_f) / weight_sum;
        if let Some(&next) = scratch.order.get(k + 1) {
            if lambda <= f[next] {
                break;
            }
        }
    }
    for r in 0..rrhs {
        out[r] = ((lambda - f[r]) * 0.5 * game.qoe_users(r)).max(0.0);
    }
    lambda
}
