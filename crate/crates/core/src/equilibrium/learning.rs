use serde::{Deserialize, Serialize};

use super::{EquilibriumError, SolveOptions, SolveReport};
use crate::costs::marginal_costs_into;
use crate::model::{AllocationPolicy, GameInstance};

const NORMALIZED_STEP: f64 = 0.3;
const NORMALIZED_OFFSET: f64 = 1e4;

/// Step size schedule `γ_n` of the exponential learning scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepRule {
    Fixed { gamma: f64 },
    /// `γ_n = scale / (offset + n)^beta`, square-summable but not summable
    /// for `beta ∈ (0.5, 1]`. The offset keeps early steps near
    /// `scale / offset^beta` before the decay sets in.
    Decaying {
        scale: f64,
        beta: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl StepRule {
    pub fn fixed(gamma: f64) -> Result<Self, EquilibriumError> {
        let rule = StepRule::Fixed { gamma };
        rule.validate()?;
        Ok(rule)
    }

    /// `γ_n = 1 / n^beta`.
    pub fn decaying(beta: f64) -> Result<Self, EquilibriumError> {
        Self::decaying_scaled(1.0, beta)
    }

    /// `γ_n = scale / n^beta`.
    pub fn decaying_scaled(scale: f64, beta: f64) -> Result<Self, EquilibriumError> {
        Self::decaying_offset(scale, beta, 0.0)
    }

    /// Decaying rule whose first step is `gamma0`, held roughly constant for
    /// about `offset` iterations.
    pub fn decaying_from(gamma0: f64, beta: f64, offset: f64) -> Result<Self, EquilibriumError> {
        Self::decaying_offset(gamma0 * (1.0 + offset).powf(beta), beta, offset)
    }

    pub fn decaying_offset(scale: f64, beta: f64, offset: f64) -> Result<Self, EquilibriumError> {
        let rule = StepRule::Decaying { scale, beta, offset };
        rule.validate()?;
        Ok(rule)
    }

    /// Decaying rule starting at `0.3 · congestion_unit(game)` and held for
    /// about 10⁴ iterations before decaying as `n^-beta`.
    pub fn normalized_decaying(game: &GameInstance, beta: f64) -> Result<Self, EquilibriumError> {
        Self::decaying_from(NORMALIZED_STEP * Self::congestion_unit(game), beta, NORMALIZED_OFFSET)
    }

    /// Fixed step `0.5 / (max_r(1/N_r) · max_m n_m)`.
    pub fn inverse_lipschitz(game: &GameInstance) -> f64 {
        let max_inv = game.inv_qoe().iter().copied().fold(0.0, f64::max);
        let max_demand = game.demands().into_iter().fold(0.0, f64::max).max(1.0);
        0.5 / (max_inv * max_demand)
    }

    /// `Σ_r N_r / Σ_m n_m`, the reciprocal of the mean congestion level.
    ///
    /// Entry `(m, r)` of the policy relaxes at a rate of roughly
    /// `γ · ξ_{m,r} / N_r`, so steps measured in this unit behave alike across
    /// instances of very different size.
    pub fn congestion_unit(game: &GameInstance) -> f64 {
        let capacity: f64 = game.rrhs().iter().map(|r| r.qoe_users).sum();
        capacity / game.total_demand().max(1.0)
    }

    pub fn validate(&self) -> Result<(), EquilibriumError> {
        match *self {
            StepRule::Fixed { gamma } if !(gamma >= 0.0 && gamma.is_finite()) => Err(EquilibriumError::InvalidStep(gamma)),
            StepRule::Decaying { scale, .. } if !(scale > 0.0 && scale.is_finite()) => {
                Err(EquilibriumError::InvalidStep(scale))
            }
            StepRule::Decaying { offset, .. } if !(offset >= 0.0 && offset.is_finite()) => {
                Err(EquilibriumError::InvalidStep(offset))
            }
            StepRule::Decaying { beta, .. } if !(beta > 0.5 && beta <= 1.0) => Err(EquilibriumError::InvalidExponent(beta)),
            _ => Ok(()),
        }
    }

    /// Step size at iteration `n >= 1`.
    pub fn gamma(&self, n: usize) -> f64 {
        match *self {
            StepRule::Fixed { gamma } => gamma,
            StepRule::Decaying { scale, beta, offset } => scale / (offset + n.max(1) as f64).powf(beta),
        }
    }
}

/// Scores `z` (row-major, one row per player) plus the step schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    pub scores: Vec<f64>,
    pub step_rule: StepRule,
    /// Number of steps taken so far.
    pub iteration: usize,
}

impl LearnerState {
    /// All scores zero, so the first policy is uniform.
    pub fn new(game: &GameInstance, step_rule: StepRule) -> Result<Self, EquilibriumError> {
        step_rule.validate()?;
        Ok(LearnerState { scores: vec![0.0; game.num_players() * game.num_rrhs()], step_rule, iteration: 0 })
    }

    /// Scores whose exponential map reproduces an interior `policy`.
    pub fn from_policy(game: &GameInstance, policy: &AllocationPolicy, step_rule: StepRule) -> Result<Self, EquilibriumError> {
        step_rule.validate()?;
        policy.check_feasible(game, 1e-9)?;
        let rrhs = game.num_rrhs();
        let mut scores = vec![0.0; game.num_players() * rrhs];
        for m in 0..game.num_players() {
            if game.demand(m) <= 0.0 {
                continue;
            }
            let row = policy.row(m);
            if let Some(&value) = row.iter().find(|&&x| !(x > 0.0)) {
                return Err(EquilibriumError::NonInteriorStart { row: m, value });
            }
            let z = &mut scores[m * rrhs..(m + 1) * rrhs];
            for (s, x) in z.iter_mut().zip(row) {
                *s = x.ln();
            }
            recenter(z);
        }
        Ok(LearnerState { scores, step_rule, iteration: 0 })
    }

    /// `ξ_{m,r} = n_m e^{z_{m,r}} / Σ_k e^{z_{m,k}}`.
    pub fn policy(&self, game: &GameInstance) -> AllocationPolicy {
        let mut policy = AllocationPolicy::zeros(game.num_players(), game.num_rrhs());
        self.write_policy(game, &mut policy);
        policy
    }

    fn write_policy(&self, game: &GameInstance, policy: &mut AllocationPolicy) {
        let rrhs = game.num_rrhs();
        for m in 0..game.num_players() {
            softmax_scaled(&self.scores[m * rrhs..(m + 1) * rrhs], game.demand(m), policy.row_mut(m));
        }
    }
}

fn recenter(z: &mut [f64]) {
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    z.iter_mut().for_each(|s| *s -= mean);
}

fn softmax_scaled(z: &[f64], total: f64, out: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &s) in out.iter_mut().zip(z) {
        *o = (s - max).exp();
        sum += *o;
    }
    let scale = total / sum;
    out.iter_mut().for_each(|o| *o *= scale);
}

/// One simultaneous update of every player: marginal costs are read at the
/// incoming `policy`, scores move against them, and the exponential map
/// produces the next policy.
pub fn learning_step(
    game: &GameInstance,
    state: &LearnerState,
    policy: &AllocationPolicy,
) -> Result<(LearnerState, AllocationPolicy), EquilibriumError> {
    policy.check_feasible(game, 1e-9)?;
    let mut next = state.clone();
    let mut marginal = vec![0.0; state.scores.len()];
    let loads = policy.column_sums();
    marginal_costs_into(game, policy, &loads, &mut marginal);
    apply_scores(game, &mut next, &marginal);
    let out = next.policy(game);
    Ok((next, out))
}

fn apply_scores(game: &GameInstance, state: &mut LearnerState, marginal: &[f64]) {
    state.iteration += 1;
    let gamma = state.step_rule.gamma(state.iteration);
    let rrhs = game.num_rrhs();
    for (z, v) in state.scores.chunks_exact_mut(rrhs).zip(marginal.chunks_exact(rrhs)) {
        for (s, g) in z.iter_mut().zip(v) {
            *s -= gamma * g;
        }
        recenter(z);
    }
}

/// Stateful exponential learner that reuses its buffers across steps.
///
/// The game may change between steps (demand or capacity reshuffles); the
/// scores carry over and the next policy is re-derived from them.
#[derive(Debug, Clone)]
pub struct Learner {
    state: LearnerState,
    policy: AllocationPolicy,
    previous: AllocationPolicy,
    marginal: Vec<f64>,
}

impl Learner {
    pub fn new(game: &GameInstance, step_rule: StepRule) -> Result<Self, EquilibriumError> {
        Ok(Self::with_state(game, LearnerState::new(game, step_rule)?))
    }

    pub fn from_policy(game: &GameInstance, policy: &AllocationPolicy, step_rule: StepRule) -> Result<Self, EquilibriumError> {
        Ok(Self::with_state(game, LearnerState::from_policy(game, policy, step_rule)?))
    }

    fn with_state(game: &GameInstance, state: LearnerState) -> Self {
        let policy = state.policy(game);
        Learner { marginal: vec![0.0; state.scores.len()], previous: policy.clone(), policy, state }
    }

    pub fn policy(&self) -> &AllocationPolicy {
        &self.policy
    }

    pub fn state(&self) -> &LearnerState {
        &self.state
    }

    pub fn set_step_rule(&mut self, rule: StepRule) -> Result<(), EquilibriumError> {
        rule.validate()?;
        self.state.step_rule = rule;
        Ok(())
    }

    /// Re-derives the policy after the game's demands changed.
    pub fn rebase(&mut self, game: &GameInstance) {
        self.state.write_policy(game, &mut self.policy);
    }

    /// Advances one step. Returns the largest entry change relative to
    /// `max(1, n_m)`.
    pub fn step(&mut self, game: &GameInstance) -> f64 {
        let loads = self.policy.column_sums();
        marginal_costs_into(game, &self.policy, &loads, &mut self.marginal);
        apply_scores(game, &mut self.state, &self.marginal);
        std::mem::swap(&mut self.policy, &mut self.previous);
        self.state.write_policy(game, &mut self.policy);
        self.policy.max_scaled_diff(&self.previous, game)
    }
}

/// Runs the exponential learning scheme until no entry moves by more than
/// `tol · max(1, n_m)` in one step, or `max_iters` steps have elapsed.
///
/// With `start = None` all scores begin at zero (uniform first iterate);
/// otherwise `start` must be strictly positive on every row with demand.
pub fn solve_learning(
    game: &GameInstance,
    start: Option<&AllocationPolicy>,
    step_rule: StepRule,
    options: SolveOptions,
) -> Result<SolveReport, EquilibriumError> {
    let mut learner = match start {
        Some(policy) => Learner::from_policy(game, policy, step_rule)?,
        None => Learner::new(game, step_rule)?,
    };
    let mut trajectory = Vec::new();
    SolveReport::record(options.trace, &mut trajectory, game, learner.policy(), 0);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < options.max_iters {
        residual = learner.step(game);
        iterations += 1;
        SolveReport::record(options.trace, &mut trajectory, game, learner.policy(), iterations);
        if residual <= options.tol {
            break;
        }
    }
    Ok(SolveReport {
        converged: residual <= options.tol,
        final_policy: learner.policy,
        iterations,
        residual,
        trajectory,
    })
}
