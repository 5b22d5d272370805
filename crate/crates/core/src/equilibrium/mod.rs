//! Nash equilibrium and social optimum solvers.
//!
//! The game is an exact potential game with a strictly convex potential, so
//! its equilibrium is unique. Two distributed dynamics reach it:
//! sequential best responses ([`solve_brd`]) and exponential learning
//! ([`solve_learning`]). [`solve_social_optimum`] minimizes total cost
//! centrally and [`price_of_anarchy`] compares the two.

mod best_response;
mod brd;
mod learning;
mod poa;
mod simplex;
mod social;

pub use best_response::{best_response, best_response_with_multiplier, BestResponse};
pub use brd::{solve_brd, BestResponseDynamics};
pub use learning::{learning_step, solve_learning, Learner, LearnerState, StepRule};
pub use poa::{poa_bound, price_of_anarchy, PoaReport};
pub use simplex::project_onto_scaled_simplex;
pub use social::solve_social_optimum;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::{congestion_levels, potential};
use crate::model::{AllocationPolicy, GameInstance, ModelError};

pub const DEFAULT_BRD_TOL: f64 = 1e-8;
pub const DEFAULT_LEARNING_TOL: f64 = 1e-6;
pub const DEFAULT_SOCIAL_TOL: f64 = 1e-8;
pub const DEFAULT_BRD_ROUNDS: usize = 1_000;
pub const DEFAULT_LEARNING_ITERS: usize = 1_000_000;
pub const DEFAULT_SOCIAL_ITERS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("learning needs a strictly positive start; row {row} has entry {value}")]
    NonInteriorStart { row: usize, value: f64 },
    #[error("decaying step exponent must lie in (0.5, 1], got {0}")]
    InvalidExponent(f64),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("social optimum cost {0} is too small for a price-of-anarchy ratio")]
    DegenerateWelfare(f64),
}

/// What a solver keeps from each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trace {
    #[default]
    Off,
    /// Potential and per-RRH congestion.
    Summary,
    /// Summary plus the full policy.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Convergence threshold on the solver's residual.
    pub tol: f64,
    /// Rounds (BRD) or iterations (learning, social optimum).
    pub max_iters: usize,
    pub trace: Trace,
}

impl SolveOptions {
    pub fn brd() -> Self {
        SolveOptions { tol: DEFAULT_BRD_TOL, max_iters: DEFAULT_BRD_ROUNDS, trace: Trace::Off }
    }

    pub fn learning() -> Self {
        SolveOptions { tol: DEFAULT_LEARNING_TOL, max_iters: DEFAULT_LEARNING_ITERS, trace: Trace::Off }
    }

    pub fn social() -> Self {
        SolveOptions { tol: DEFAULT_SOCIAL_TOL, max_iters: DEFAULT_SOCIAL_ITERS, trace: Trace::Off }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_trace(mut self, trace: Trace) -> Self {
        self.trace = trace;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iteration: usize,
    pub potential: f64,
    pub congestion: Vec<f64>,
    pub policy: Option<AllocationPolicy>,
}

impl Snapshot {
    pub(crate) fn capture(game: &GameInstance, policy: &AllocationPolicy, iteration: usize, trace: Trace) -> Self {
        Snapshot {
            iteration,
            potential: potential(game, policy),
            congestion: congestion_levels(game, policy),
            policy: (trace == Trace::Full).then(|| policy.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub final_policy: AllocationPolicy,
    pub iterations: usize,
    pub converged: bool,
    /// Convergence metric at exit.
    pub residual: f64,
    pub trajectory: Vec<Snapshot>,
}

impl SolveReport {
    fn record(trace: Trace, trajectory: &mut Vec<Snapshot>, game: &GameInstance, policy: &AllocationPolicy, it: usize) {
        if trace != Trace::Off {
            trajectory.push(Snapshot::capture(game, policy, it, trace));
        }
    }
}
