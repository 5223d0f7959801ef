//! Command-line runner for the `arrowlab-core` experiments.
//!
//! Every subcommand maps a validated [`config::ExperimentConfig`] onto core
//! operations and writes a [`record::ResultRecord`] as JSON or CSV. Runs are
//! reproducible: the metric rows depend only on the config.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod record;

pub use cli::{run, EXIT_INVARIANT_FAILED, EXIT_OK, EXIT_USAGE};
pub use config::{validate_config, ConfigError, ExperimentConfig, OutputFormat, Tolerances};
pub use experiments::Experiment;
pub use record::{Cell, Check, ExperimentOutput, ResultRecord};
