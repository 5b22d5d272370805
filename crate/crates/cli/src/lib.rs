//! Experiment harness: specs, seeded trials, result tables and plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiments;
pub mod output;
pub mod plot;
pub mod presets;
pub mod spec;
pub mod stats;
pub mod table;

pub use experiments::{run_experiment, Outcome};
pub use output::write_outputs;
pub use plot::{emit_plot, render_plot, AxesSpec};
pub use spec::{ExperimentKind, ExperimentSpec};
pub use table::Table;
