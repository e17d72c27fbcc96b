//! Constructor algebra for finitely presented groups: expression trees, the
//! textual grammar, structural normalization and opaque-group annotations.
//!
//! ```text
//! expr  := prod ( "*" prod )*          free product, lowest precedence
//! prod  := power ( "x" power )*        direct product
//! power := atom [ "^" INT ]            iterated direct product
//! atom  := "1" | "Z" | "Z" INT | "F" INT | "Sg" INT | "Sg-" INT | IDENT
//!        | "Amal(" expr "," expr "," INT [ "," idx "," idx ] ")"
//!        | "HNN(" expr "," INT ")" | "Ext(" expr "," expr ")"
//!        | "FI(" expr "," INT ")" | "QFN(" expr "," INT ")"
//!        | "Graph(" json ")" | "(" expr ")"
//! idx   := INT | "inf"
//! ```

mod annotations;
mod decompose;
mod expr;
mod normalize;
mod parse;
mod table;

pub use annotations::{AnnotationSet, Annotations};
pub use decompose::{vertex_decomposition, DecomposeError, Decomposition, Step};
pub(crate) use decompose::split_step;
pub use expr::{GraphEdge, GroupExpr, Index, Order};
pub use normalize::normalize;
pub use parse::{is_valid_name, parse, parse_with};
pub use table::FiniteTable;

pub(crate) use expr::{contract_graph, edge_is_proper};
#[cfg(test)]
pub(crate) use parse::parse_unchecked;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("annotation error (line {line}): {message}")]
    Annotation { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, ExprError>;

pub(crate) fn semantic<T>(message: impl Into<String>) -> Result<T> {
    Err(ExprError::Semantic(message.into()))
}
