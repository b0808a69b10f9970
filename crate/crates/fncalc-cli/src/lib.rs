//! Text front end for the fncalc engine: a line-oriented declaration and
//! command language, a canonical printer inverse to the parser, a
//! fail-closed fixture registry, and a binary with stable exit codes
//! (0 success, 1 false verdict, 2 usage or parse error, 3 internal error).

pub mod parser;
pub mod printer;
pub mod runner;

pub use parser::{parse_document, Check, Command, Decl, Document, ParseError};
pub use printer::document_text;
pub use runner::{run_document, run_text, Format, RunError, RunOptions, RunOutput};
