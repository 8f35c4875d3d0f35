//! Experiment harness: JSON configs, replicated runs, CSV/JSON output and
//! brute-force verification suites.

pub mod bounds;
pub mod config;
pub mod output;
pub mod run;
pub mod verify;

pub use bounds::{rademacher_bound, theoretical_bound};
pub use config::{ExperimentConfig, LearnerKind, PolicyClassSpec, ScaleSetting};
pub use output::{emit_outputs, format_sig9, OutputPaths};
pub use run::{run_experiment, ExperimentResult, RunResult};
pub use verify::{run_suite, CheckOutcome, SuiteSize};
