#![allow(dead_code)]

use proptest::prelude::*;
use ranslice::{AllocationPolicy, GameInstance};

/// Game parameters: QoE capacities, prices, demands, price weights.
#[derive(Debug, Clone)]
pub struct Params {
    pub qoe: Vec<f64>,
    pub prices: Vec<f64>,
    pub demands: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Params {
    pub fn game(&self) -> GameInstance {
        GameInstance::from_parameters(&self.qoe, &self.prices, &self.demands, &self.weights).unwrap()
    }
}

pub fn params(players: std::ops::RangeInclusive<usize>, rrhs: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Params> {
    (players, rrhs).prop_flat_map(|(m, r)| {
        (
            prop::collection::vec(100.0..8400.0f64, r),
            prop::collection::vec(0.0..25.0f64, r),
            prop::collection::vec(100.0..20_000.0f64, m),
            prop::collection::vec(0.0..0.1f64, m),
        )
            .prop_map(|(qoe, prices, demands, weights)| Params { qoe, prices, demands, weights })
    })
}

/// Game together with a feasible policy built from positive row shares.
pub fn game_and_policy(
    players: std::ops::RangeInclusive<usize>,
    rrhs: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (GameInstance, AllocationPolicy)> {
    params(players, rrhs).prop_flat_map(|p| {
        let (m, r) = (p.demands.len(), p.qoe.len());
        prop::collection::vec(prop::collection::vec(0.0..1.0f64, r), m).prop_map(move |shares| {
            let game = p.game();
            (game.clone(), policy_from_shares(&game, &shares))
        })
    })
}

pub fn policy_from_shares(game: &GameInstance, shares: &[Vec<f64>]) -> AllocationPolicy {
    let rows: Vec<Vec<f64>> = shares
        .iter()
        .enumerate()
        .map(|(m, s)| {
            let total: f64 = s.iter().sum();
            if total <= 0.0 {
                vec![game.demand(m) / s.len() as f64; s.len()]
            } else {
                s.iter().map(|v| game.demand(m) * v / total).collect()
            }
        })
        .collect();
    AllocationPolicy::from_rows(&rows).unwrap()
}

/// Player `m`'s cost written out term by term.
pub fn cost_oracle(game: &GameInstance, policy: &AllocationPolicy, m: usize) -> f64 {
    let (players, rrhs) = game.shape();
    let mut c = 0.0;
    for r in 0..rrhs {
        let load: f64 = (0..players).map(|k| policy.get(k, r)).sum();
        let rrh = &game.rrhs()[r];
        c += policy.get(m, r) * (load / rrh.qoe_users + game.mvnos()[m].price_weight * rrh.price);
    }
    c
}

/// Sum of every player's cost.
pub fn social_oracle(game: &GameInstance, policy: &AllocationPolicy) -> f64 {
    (0..game.num_players()).map(|m| cost_oracle(game, policy, m)).sum()
}

/// Euclidean projection onto `{x >= 0, Σx = total}`, by sorting.
pub fn project(v: &[f64], total: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let (mut acc, mut theta) = (0.0, 0.0);
    for (i, x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - total) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Best response of `m` by projected gradient on its own cost.
pub fn best_response_oracle(game: &GameInstance, policy: &AllocationPolicy, m: usize) -> Vec<f64> {
    let (players, rrhs) = game.shape();
    let others: Vec<f64> = (0..rrhs).map(|r| (0..players).filter(|&k| k != m).map(|k| policy.get(k, r)).sum()).collect();
    let n: Vec<f64> = game.rrhs().iter().map(|r| r.qoe_users).collect();
    let w = game.mvnos()[m].price_weight;
    let step = 0.5 * n.iter().copied().fold(f64::INFINITY, f64::min);
    let mut x = vec![game.demand(m) / rrhs as f64; rrhs];
    for _ in 0..200_000 {
        let g: Vec<f64> = (0..rrhs).map(|r| (others[r] + 2.0 * x[r]) / n[r] + w * game.rrhs()[r].price).collect();
        let next = project(&(0..rrhs).map(|r| x[r] - step * g[r]).collect::<Vec<_>>(), game.demand(m));
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if moved <= 1e-13 * game.demand(m) {
            break;
        }
    }
    x
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
