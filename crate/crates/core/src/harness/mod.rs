//! Replicated experiments, sweeps and their summaries.
//!
//! Replication `i` of sweep cell `c` runs with seed
//! `derive_seed(base_seed, &[c, i])`, so any replication can be rerun alone
//! and parallel execution cannot change results.

mod output;
mod run;
mod spec;

pub use output::{write_json, write_summary, write_summary_csv, write_trace, METRICS};
pub use run::{
    estimate_noise_scale, first_hit, run_cell, run_replications, sweep, CellResult, Replication, Summary,
};
pub use spec::{
    polish_minimizer, set_axis, BuiltObjective, CellPlan, ExperimentSpec, InitRule, ObjectiveSpec, SuccessSpec,
    SweepAxis, AXIS_NAMES,
};
