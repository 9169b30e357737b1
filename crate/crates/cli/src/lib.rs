//! File formats, clocks and the command line for `lastmile-core`.

pub mod artifacts;
pub mod cli;
pub mod clock;
pub mod commands;
pub mod error;
pub mod io;

pub use error::{CliError, CliResult};
