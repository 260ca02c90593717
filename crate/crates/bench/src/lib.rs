//! Benchmark harness for the selectors in `alr-core`.
//!
//! A run splits every dataset into an unlabeled pool and a test set, lets
//! each method pick `M` pool samples for every `M` in the grid, trains the
//! configured models on those samples and scores them on the test set.
//! [`summary::summarize`] turns the records into the AUC and improvement
//! tables and [`output::emit`] writes everything to disk.

pub mod config;
pub mod output;
pub mod runner;
pub mod summary;

pub use config::{ExperimentConfig, Method};
pub use runner::{run_experiment, run_on_datasets, ExperimentOutput, ResultRecord};
pub use summary::{summarize, Summary};
