//! Seeded Monte Carlo experiments and what is computed from them. Exact
//! enumeration of the ladder's readout distribution lives here as well.
//!
//! Trial `t` at integral index `i` of an experiment with master seed `s`
//! draws from the stream at label path `[protocol, i, t]` under `s` (see
//! [`crate::rng`]). Carriers within a trial take further substreams by
//! index. Output is therefore independent of thread count.

mod enumerate;
mod experiment;
mod scaling;
mod stats;
mod table1;

pub use enumerate::{
    enumerate_distribution, enumerate_with_beta, total_variation, MAX_ENUMERATION_STEPS,
};
pub use experiment::{
    read_csv, run_experiment, run_experiment_with_threads, summary_json, write_csv,
    ExperimentResult, ExperimentSpec, ProtocolConfig, ProtocolKind, TrialRecord, ValueStats,
    CSV_HEADER,
};
pub use scaling::{fit_slope, scaling_study, ScalingAxis, ScalingFit, ScalingOptions, ScalingRow};
pub use stats::{nearest_rank, ErrorStats};
pub use table1::{table1_configs, table1_experiment, table1_grid, Table1, Table1Row};
