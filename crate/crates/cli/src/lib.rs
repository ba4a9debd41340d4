//! Command-line front end for the `extropy` crate: dataset grouping,
//! pairwise divergence matrices, simulation studies and identity checks.

pub mod commands;
pub mod dataset;
pub mod error;
pub mod matrix;
pub mod report;
pub mod verify;

pub use commands::{run, run_args, Cli};
pub use error::{CliError, Result};
