//! Experiment driver: configuration, the counterexample pipeline and report
//! output.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

pub use config::{ExperimentConfig, Tolerances};
pub use error::CliError;
pub use output::write_outputs;
pub use pipeline::{run_counterexample, run_suite, PipelineReport, Suite, Verdict};
