//! Text and JSON forms, the seeded sampler, property suites and the command
//! dispatcher behind the `nsarith` binary.

mod command;
pub mod json;
mod sample;
pub mod suite;
mod text;

pub use command::{run, ArithOp, Cli, Command, Outcome, SeqKind, EXIT_NEGATIVE, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE};
pub use sample::{sample, SampleProfile, Sampler};
pub use text::{
    format_element, format_series, infer_dim, parse_element, parse_series, ParseError, SeriesText, TextError,
};
