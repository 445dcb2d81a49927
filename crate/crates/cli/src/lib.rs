//! Command-line front end: parses jobs, runs them against `thinspec`, and
//! writes JSON/CSV artifacts plus a manifest.

pub mod app;
pub mod coeffs;

pub use app::{run, Cli, CliError, Command, Report};
pub use coeffs::{emit_coefficients, parse_coefficients, ParseError};
