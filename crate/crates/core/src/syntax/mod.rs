//! Syntax of the supported ASP subset: parsing, canonical printing and
//! normalization.
//!
//! The accepted language is normal rules, integrity constraints and choice
//! rules over predicate atoms and built-in comparisons, with arithmetic terms,
//! intervals, pools, `#const` directives and `%` comments. Anything else
//! (`#show`, aggregates, disjunction, optimization) is rejected.

mod ast;
pub mod lexer;
mod normalize;
mod parser;
mod print;

pub use ast::*;
pub use normalize::{normalize, normalize_atom, normalize_term};
pub use parser::{parse, parse_statement};
pub use print::{join_tokens, print, print_statements, LineToken};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax { offset: usize, expected: String, found: String },
    #[error("predicate `{predicate}` used with different arities {arities:?}")]
    ArityMismatch { predicate: String, arities: Vec<usize> },
    #[error("unsupported construct at byte {offset}: {construct}")]
    Unsupported { offset: usize, construct: String },
}
