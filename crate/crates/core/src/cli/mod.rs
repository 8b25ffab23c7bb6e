//! The `tdg` command line: document format, printer, DOT export and commands.

pub mod dot;
pub mod lexer;
pub mod parse;
pub mod print;
mod run;

pub use parse::{parse_partitions, parse_spec, Document, ParseError};
pub use run::{run, Cli, Command, Format, Outcome};
