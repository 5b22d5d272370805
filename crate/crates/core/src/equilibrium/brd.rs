use super::best_response::{best_response_into, Scratch};
use super::{SolveOptions, SolveReport};
use crate::model::{AllocationPolicy, GameInstance};

/// Sequential best-response dynamics over a working policy.
///
/// Players move one at a time in canonical order; every move lowers (or
/// keeps) the potential.
pub struct BestResponseDynamics<'g> {
    game: &'g GameInstance,
    policy: AllocationPolicy,
    loads: Vec<f64>,
    others: Vec<f64>,
    row: Vec<f64>,
    scratch: Scratch,
}

impl<'g> BestResponseDynamics<'g> {
    pub fn new(game: &'g GameInstance, start: AllocationPolicy) -> Result<Self, super::EquilibriumError> {
        start.check_feasible(game, 1e-9)?;
        let loads = start.column_sums();
        let rrhs = game.num_rrhs();
        Ok(BestResponseDynamics {
            game,
            policy: start,
            loads,
            others: vec![0.0; rrhs],
            row: vec![0.0; rrhs],
            scratch: Scratch::default(),
        })
    }

    pub fn policy(&self) -> &AllocationPolicy {
        &self.policy
    }

    pub fn into_policy(self) -> AllocationPolicy {
        self.policy
    }

    /// Replaces row `m` with its best response. Returns the largest change of
    /// an entry, relative to `max(1, n_m)`.
    pub fn update_player(&mut self, m: usize) -> f64 {
        let current = self.policy.row(m);
        for ((o, x), own) in self.others.iter_mut().zip(&self.loads).zip(current) {
            *o = x - own;
        }
        best_response_into(self.game, m, &self.others, &mut self.row, &mut self.scratch);
        let scale = 1.0 / self.game.demand(m).max(1.0);
        let mut change: f64 = 0.0;
        let target = self.policy.row_mut(m);
        for (((t, &new), load), &other) in target.iter_mut().zip(&self.row).zip(&mut self.loads).zip(&self.others) {
            change = change.max((new - *t).abs() * scale);
            *t = new;
            *load = other + new;
        }
        change
    }

    /// One full pass over all players. Returns the largest relative change.
    pub fn round(&mut self) -> f64 {
        let mut change: f64 = 0.0;
        for m in 0..self.game.num_players() {
            change = change.max(self.update_player(m));
        }
        // drop accumulated rounding in the incremental loads
        self.loads = self.policy.column_sums();
        change
    }
}

/// Runs sequential BRD from `start` until a full round moves no entry by more
/// than `tol · max(1, n_m)`, or `max_iters` rounds have elapsed.
pub fn solve_brd(
    game: &GameInstance,
    start: &AllocationPolicy,
    options: SolveOptions,
) -> Result<SolveReport, super::EquilibriumError> {
    let mut dynamics = BestResponseDynamics::new(game, start.clone())?;
    let mut trajectory = Vec::new();
    SolveReport::record(options.trace, &mut trajectory, game, dynamics.policy(), 0);
    let mut residual = f64::INFINITY;
    let mut rounds = 0;
    while rounds < options.max_iters {
        residual = dynamics.round();
        rounds += 1;
        SolveReport::record(options.trace, &mut trajectory, game, dynamics.policy(), rounds);
        if residual <= options.tol {
            break;
        }
    }
    Ok(SolveReport {
        converged: residual <= options.tol,
        final_policy: dynamics.into_policy(),
        iterations: rounds,
        residual,
        trajectory,
    })
}
