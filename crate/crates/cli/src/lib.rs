//! Library surface of the CLI: configuration loading and the command
//! implementations, separated from argument parsing so tests can call them
//! directly.

pub mod commands;
pub mod config;

pub use commands::{cmd_compare, cmd_design, cmd_response, cmd_sweep, cmd_validate};
pub use config::{load_config, RunConfig};
