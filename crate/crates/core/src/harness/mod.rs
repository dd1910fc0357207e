//! Experiment harness: scenario catalog, configuration, seeded runner and
//! CSV output.

pub mod catalog;
pub mod output;
pub mod runner;
pub mod spec;
pub mod units;

pub use catalog::{Scenario, Scheme, SweepVar};
pub use output::{emit_cdf, emit_csv, write_cdf, write_csv, ResultRow};
pub use runner::{run_experiment, CdfSeries, ExperimentOutput};
pub use spec::{ConfigFile, ExperimentSpec, Unit};
pub use units::{dbm_to_linear, paper_config, Scale};
