//! Command-line front end: argument grammar, CSV input, JSON/CSV output.

mod args;
mod commands;
mod data;
mod error;
mod output;

pub use args::{grammar, parse_args, Command, Format, RunConfig, Value};
pub use commands::{execute, meta_path, run, write_report, Diagnostics, Report};
pub use data::read_observations;
pub use error::CliError;
pub use output::{format_real, to_json, write_atomic, Cell, Table};
