//! Scenario runner, check registry, output formats and CLI support for `semitent-core`.

pub mod config;
pub mod output;
pub mod registry;
pub mod runner;

pub use config::{ConfigError, Format, Scenario};
pub use runner::{exit_code, run_scenario, RunSummary};
