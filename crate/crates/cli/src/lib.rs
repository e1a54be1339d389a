//! Command-line front end for the replicax experiment harness: TOML
//! experiment configs, built-in figure recipes and bound reports.

mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod recipes;

pub use app::run_cli;
pub use commands::{cmd_bounds, cmd_reproduce, cmd_run, cmd_sweep, execute, Options, RunReport};
pub use config::ConfigFile;
pub use error::CliError;
