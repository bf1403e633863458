//! Command-line front end for the krelab engine: query parsing, CSV
//! ingestion, check drivers, and report rendering.

pub mod commands;
pub mod parser;

pub use commands::{run, Cli};
pub use parser::{parse_query, print_query, ParseError};
