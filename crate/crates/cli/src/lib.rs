//! Library side of the `attrib` command: configuration, backend wiring,
//! run manifests and subcommands.

pub mod commands;
pub mod components;
pub mod config;
pub mod error;
pub mod manifest;

pub use commands::{cmd_eval, cmd_reformat, cmd_run, cmd_run_eval, cmd_stats, EvalOptions, RunOptions, Source};
pub use config::PipelineConfig;
pub use error::CliError;
pub use manifest::RunManifest;
