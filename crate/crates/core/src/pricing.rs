//! Operator pricing: served load at equilibrium, operator profit, and the
//! slot-by-slot adaptive price update.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AllocationPolicy, GameInstance};

pub const DEFAULT_SIGMA: f64 = 0.1;
pub const DEFAULT_COST_PER_USER: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PricingError {
    #[error("price step must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("operator cost coefficient must be non-negative, got {0}")]
    InvalidCost(f64),
    #[error("mean price must be positive, got {0}")]
    InvalidMeanPrice(f64),
    #[error("price {value} at RRH {index} is negative or not finite")]
    InvalidPrice { index: usize, value: f64 },
    #[error("expected {expected} per-RRH values, got {got}")]
    Length { expected: usize, got: usize },
}

/// Users served by each RRH, `n_r = Σ_m ξ_{m,r}`.
pub fn served_load(game: &GameInstance, policy: &AllocationPolicy) -> Vec<f64> {
    debug_assert_eq!(policy.shape(), game.shape());
    policy.column_sums()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingState {
    /// Current per-RRH prices `p_r(t)`.
    pub prices: Vec<f64>,
    /// `n_r(t-1)`, once observed.
    pub previous_load: Option<Vec<f64>>,
    /// `n_r(t)`, once observed.
    pub current_load: Option<Vec<f64>>,
    pub sigma: f64,
    pub slot: usize,
    /// `c₀` in the operator cost `C(n) = c₀ n`.
    pub to_cost_coeff: f64,
}

impl PricingState {
    pub fn new(prices: Vec<f64>, sigma: f64, to_cost_coeff: f64) -> Result<Self, PricingError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(PricingError::InvalidSigma(sigma));
        }
        if !(to_cost_coeff >= 0.0 && to_cost_coeff.is_finite()) {
            return Err(PricingError::InvalidCost(to_cost_coeff));
        }
        if let Some((index, &value)) = prices.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(PricingError::InvalidPrice { index, value });
        }
        Ok(PricingState { prices, previous_load: None, current_load: None, sigma, slot: 0, to_cost_coeff })
    }

    /// Operator cost `C(n)` of serving `n` users at one RRH.
    pub fn operator_cost(&self, users: f64) -> f64 {
        self.to_cost_coeff * users
    }

    /// Lowest admissible price after serving `users`: the per-user price at
    /// which `p n - C(n)` is zero. `C` is linear, so this is `c₀` for every
    /// `n`; returned directly since `c₀ n / n` can round below `c₀`.
    pub fn price_floor(&self, _users: f64) -> f64 {
        self.to_cost_coeff
    }
}

/// Operator profit `Π = Σ_r p_r n_r - C(n_r)`.
pub fn profit(state: &PricingState, load: &[f64]) -> f64 {
    state
        .prices
        .iter()
        .zip(load)
        .map(|(p, &n)| p * n - state.operator_cost(n))
        .sum()
}

/// Records the load observed in the current slot and moves prices for the
/// next one: `p_r(t+1) = max(floor, p_r(t) + σ [n_r(t) - n_r(t-1)])`.
/// The first observed slot only records its load.
pub fn update_prices(state: &PricingState, new_load: &[f64]) -> Result<PricingState, PricingError> {
    if new_load.len() != state.prices.len() {
        return Err(PricingError::Length { expected: state.prices.len(), got: new_load.len() });
    }
    let mut next = state.clone();
    if let Some(previous) = &state.current_load {
        for ((p, &now), &before) in next.prices.iter_mut().zip(new_load).zip(previous) {
            let proposed = *p + state.sigma * (now - before);
            *p = proposed.max(state.price_floor(now));
        }
    }
    next.previous_load = state.current_load.clone();
    next.current_load = Some(new_load.to_vec());
    next.slot += 1;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingPolicyKind {
    /// Every RRH priced at the mean.
    Uniform,
    /// Price proportional to QoE capacity, topping out at the mean.
    Weighted,
    /// Starts uniform, then follows [`update_prices`] each slot.
    Adaptive,
}

impl PricingPolicyKind {
    pub const ALL: [PricingPolicyKind; 3] = [Self::Uniform, Self::Weighted, Self::Adaptive];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Weighted => "weighted",
            Self::Adaptive => "adaptive",
        }
    }
}

/// Initial per-RRH prices for a pricing scheme with mean level `mean_price`.
pub fn make_policy(kind: PricingPolicyKind, game: &GameInstance, mean_price: f64) -> Result<Vec<f64>, PricingError> {
    if !(mean_price > 0.0 && mean_price.is_finite()) {
        return Err(PricingError::InvalidMeanPrice(mean_price));
    }
    Ok(match kind {
        PricingPolicyKind::Uniform | PricingPolicyKind::Adaptive => vec![mean_price; game.num_rrhs()],
        PricingPolicyKind::Weighted => {
            let best = game.rrhs().iter().map(|r| r.qoe_users).fold(0.0, f64::max);
            game.rrhs().iter().map(|r| mean_price * r.qoe_users / best).collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game() -> GameInstance {
        GameInstance::from_parameters(&[50.0, 100.0, 25.0], &[1.0; 3], &[10.0, 5.0], &[0.1, 0.1]).unwrap()
    }

    #[test]
    fn served_load_conserves_demand() {
        let g = GameInstance::from_parameters(&[10.0], &[1.0], &[10.0], &[0.0]).unwrap();
        let p = AllocationPolicy::from_rows(&[vec![10.0]]).unwrap();
        assert_eq!(served_load(&g, &p), vec![10.0]);
        let g = game();
        let p = AllocationPolicy::from_rows(&[vec![2.0, 3.0, 5.0], vec![1.0, 1.0, 3.0]]).unwrap();
        let load = served_load(&g, &p);
        assert_eq!(load, vec![3.0, 4.0, 8.0]);
        assert_eq!(load.iter().sum::<f64>(), g.total_demand());
    }

    #[test]
    fn profit_examples() {
        let s = PricingState::new(vec![3.0, 4.0], 0.1, 0.0).unwrap();
        assert_eq!(profit(&s, &[2.0, 5.0]), 26.0);
        let s = PricingState::new(vec![2.5, 2.5], 0.1, 2.5).unwrap();
        assert_eq!(profit(&s, &[7.0, 11.0]), 0.0);
    }

    #[test]
    fn first_slot_only_records() {
        let s = PricingState::new(vec![10.0, 10.0], 0.1, 1.0).unwrap();
        let s1 = update_prices(&s, &[5.0, 7.0]).unwrap();
        assert_eq!(s1.prices, s.prices);
        assert_eq!(s1.slot, 1);
        assert_eq!(s1.current_load.as_deref(), Some(&[5.0, 7.0][..]));
    }

    #[test]
    fn price_follows_load() {
        let s = PricingState::new(vec![10.0, 10.0, 10.0], 0.5, 1.0).unwrap();
        let s = update_prices(&s, &[5.0, 5.0, 5.0]).unwrap();
        let s = update_prices(&s, &[5.0, 9.0, 4.0]).unwrap();
        assert_eq!(s.prices, vec![10.0, 12.0, 9.5]);
        assert_eq!(s.previous_load.as_deref(), Some(&[5.0, 5.0, 5.0][..]));
        // with σ = 5 a drop of 4 users proposes 9.5 - 20 < 0; floor is c0 = 1
        let steep = PricingState { sigma: 5.0, ..s };
        let s = update_prices(&steep, &[5.0, 9.0, 0.0]).unwrap();
        assert_eq!(s.prices, vec![10.0, 12.0, 1.0]);
    }

    #[test]
    fn policies() {
        let g = game();
        assert_eq!(make_policy(PricingPolicyKind::Uniform, &g, 10.0).unwrap(), vec![10.0; 3]);
        assert_eq!(make_policy(PricingPolicyKind::Adaptive, &g, 10.0).unwrap(), vec![10.0; 3]);
        let w = make_policy(PricingPolicyKind::Weighted, &g, 10.0).unwrap();
        assert_eq!(w, vec![5.0, 10.0, 2.5]);
        let flat = GameInstance::from_parameters(&[7.0; 4], &[1.0; 4], &[1.0], &[0.0]).unwrap();
        assert_eq!(make_policy(PricingPolicyKind::Weighted, &flat, 10.0).unwrap(), vec![10.0; 4]);
        assert!(make_policy(PricingPolicyKind::Uniform, &g, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_state() {
        assert!(PricingState::new(vec![1.0], 0.0, 1.0).is_err());
        assert!(PricingState::new(vec![1.0], 0.1, -1.0).is_err());
        assert!(PricingState::new(vec![-1.0], 0.1, 1.0).is_err());
        let s = PricingState::new(vec![1.0], 0.1, 1.0).unwrap();
        assert!(update_prices(&s, &[1.0, 2.0]).is_err());
    }
}
