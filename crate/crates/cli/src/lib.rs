//! Command-line front end for `spinaddr`: JSON configuration, the
//! fidelity sweep, and plain-text reports for plans, drives and swaps.

pub mod commands;
pub mod config;
pub mod error;

pub use config::RunConfig;
pub use error::CliError;
