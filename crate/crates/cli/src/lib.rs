//! Command-line companion to `gossip-age`: JSON configs, CSV/JSON output,
//! parallel simulation replications and the cluster-size panel presets.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

pub use error::{CliError, Result};
