//! Command-line front end: parses graphs and matrices, runs the analyses
//! and prints JSON reports or CSV series.

pub mod args;
pub mod commands;
pub mod error;
pub mod parse;

pub use args::Cli;
pub use commands::{run, Outcome};
pub use error::{CliError, CliResult};
