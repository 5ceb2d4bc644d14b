//! Experiment registry, configuration and CSV output for the `murmur` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod registry;
pub mod run;

pub use config::{ExperimentConfig, Overrides, YGrid, THREADS_ENV};
pub use error::{CliError, Result};
pub use output::{emit_csv, parse_csv, to_csv_string, write_csv, ExperimentResult, Row};
pub use registry::{Experiment, Mode};
pub use run::{run_experiment, with_pool};
