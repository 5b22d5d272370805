//! RAN slicing as a weighted congestion game.
//!
//! MVNOs split their user demand over shared remote radio heads (RRHs). The
//! crate covers the per-RRH QoE capacity model, the cost functions, solvers
//! for the Nash equilibrium and the social optimum, price adaptation and the
//! ingestion of cell-tower data into game instances.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod capacity;
pub mod costs;
pub mod equilibrium;
pub mod exec;
pub mod ingest;
pub mod model;
pub mod pricing;

pub use exec::Execution;
pub use model::{AllocationPolicy, GameInstance, ModelError, Mvno, Rrh};
