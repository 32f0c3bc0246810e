//! File formats and the command-line front end for `setvalue-core`.

pub mod cli;
pub mod error;
pub mod examples;
pub mod pde_file;
pub mod report;
pub mod spec_file;

pub use error::{CliError, CliResult};
