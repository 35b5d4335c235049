//! Command line front end: expression language, sessions and subcommands.

pub mod commands;
pub mod error;
pub mod parse;
pub mod session;
pub mod spec;
pub mod value;

pub use commands::{Cli, Outcome, Status, SCHEMA};
pub use error::{CliError, CliResult};
pub use session::{run_args, Exit, Session};
