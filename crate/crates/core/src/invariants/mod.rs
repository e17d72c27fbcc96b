//! Rule-based invariants of a group expression: ends, semistability,
//! pro-group type, boundary number and rank of `H^2(G; ZG)`. Every
//! determined value carries a trace entry naming the rule that produced it.

mod engine;
mod facts;
mod rules;

pub use engine::{Engine, InvariantReport, TraceEntry};
pub use facts::{EndCount, H2Rank, PNumber, TriState};
pub use rules::{rule, Rule, RULES};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("expression is not 1-ended (ends = {0})")]
    NotOneEnded(EndCount),
    #[error("expression is not known to be properly 3-realizable")]
    NotKnownP3R,
    #[error("invalid graph of groups: {0}")]
    InvalidGraph(String),
}

/// Canonical text of a fact, e.g. `ends(Z^2) = ONE`.
pub fn fact(property: &str, subject: &impl std::fmt::Display, value: &impl std::fmt::Display) -> String {
    format!("{property}({subject}) = {value}")
}
