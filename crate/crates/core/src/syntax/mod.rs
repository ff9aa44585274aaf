//! Lexing, parsing, validation and canonical formatting of strategy text.

mod ast;
mod diagnostic;
mod format;
mod lexer;
mod parser;
mod validate;

pub use ast::{CallExpr, Kind, Part, Query, SourceLocation, Statement, StatementKind, Strategy, StrategyDoc};
pub use diagnostic::{Code, Diagnostic, Severity};
pub use format::{format, render_parts, render_statement_line};
pub use lexer::{is_ident, is_ident_char};
pub use parser::{parse, parse_file};
pub use validate::{has_errors, validate};
