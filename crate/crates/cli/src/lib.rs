//! Command line front end for `depoisson`: argument model, sequence specs,
//! subcommands and row output.

pub mod commands;
pub mod config;
pub mod output;
pub mod spec;

pub use commands::{run, CliError, Outcome};
pub use config::RunConfig;
pub use spec::SequenceSpec;
