//! Command-line front end: subcommand parsing, handlers and table rendering.

pub mod commands;
pub mod error;
pub mod report;

pub use commands::{run, Cli};
pub use error::CliError;
