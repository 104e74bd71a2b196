//! Experiment harness: JSON configs in, convergence reports and CSV tables out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::ExperimentConfig;
pub use error::{HarnessError, HarnessResult};
pub use experiments::{catalogue, run, Experiment};
pub use output::write_report;
