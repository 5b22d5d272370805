use serde::{Deserialize, Serialize};

use super::{solve_brd, solve_social_optimum, EquilibriumError, SolveOptions, SolveReport};
use crate::costs::social_welfare;
use crate::model::{feasible_uniform, GameInstance};

const MIN_WELFARE: f64 = 1e-12;

/// Worst-case inefficiency `(3M + 1) / (2M + 2)` for `M` players.
pub fn poa_bound(players: usize) -> f64 {
    let m = players as f64;
    (3.0 * m + 1.0) / (2.0 * m + 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoaReport {
    pub poa: f64,
    pub bound: f64,
    pub cost_ne: f64,
    pub cost_opt: f64,
    pub equilibrium: SolveReport,
    pub optimum: SolveReport,
}

/// Ratio of total cost at the equilibrium to total cost at the social
/// optimum, with the closed-form upper bound for this many players.
///
/// The equilibrium comes from BRD started at the uniform policy; the
/// optimum solver is warm-started at the equilibrium.
pub fn price_of_anarchy(
    game: &GameInstance,
    brd_options: SolveOptions,
    social_options: SolveOptions,
) -> Result<PoaReport, EquilibriumError> {
    let equilibrium = solve_brd(game, &feasible_uniform(game), brd_options)?;
    let optimum = solve_social_optimum(game, Some(&equilibrium.final_policy), social_options)?;
    let cost_ne = social_welfare(game, &equilibrium.final_policy);
    let cost_opt = social_welfare(game, &optimum.final_policy);
    if !(cost_opt > MIN_WELFARE) {
        return Err(EquilibriumError::DegenerateWelfare(cost_opt));
    }
    Ok(PoaReport {
        poa: cost_ne / cost_opt,
        bound: poa_bound(game.num_players()),
        cost_ne,
        cost_opt,
        equilibrium,
        optimum,
    })
}
