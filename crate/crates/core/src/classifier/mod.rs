//! Proper 2-equivalence class labels and pairwise comparison with
//! replayable derivations.

mod classify;
mod corpus;
mod label;

pub use classify::{Classification, Classifier};
pub use corpus::{parse_golden, GoldenPair};
pub use label::ClassLabel;

use std::fmt::Write as _;

use serde::Serialize;

/// One rule application: `conclusion` follows from `premises` by `rule`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub rule: String,
    pub cite: String,
    pub subject: String,
    pub conclusion: String,
    pub premises: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    Equivalent,
    Inequivalent,
    Unknown,
}

impl VerdictKind {
    /// CLI exit code: 0 equivalent, 1 inequivalent, 2 unknown.
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictKind::Equivalent => 0,
            VerdictKind::Inequivalent => 1,
            VerdictKind::Unknown => 2,
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictKind::Equivalent => "EQUIVALENT",
            VerdictKind::Inequivalent => "INEQUIVALENT",
            VerdictKind::Unknown => "UNKNOWN",
        })
    }
}

/// An invariant of the relation taking different determined values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separator {
    pub invariant: String,
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    pub expr_a: String,
    pub expr_b: String,
    pub label_a: ClassLabel,
    pub label_b: ClassLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separator: Option<Separator>,
    pub derivation: Vec<DerivationStep>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
}

/// Human-readable account of a verdict, one rule application per line.
pub fn explain(v: &Verdict) -> String {
    let mut out = String::new();
    match (&v.verdict, &v.separator) {
        (VerdictKind::Equivalent, _) => writeln!(
            out,
            "EQUIVALENT: {} and {} are both {}",
            v.expr_a, v.expr_b, v.label_a
        ),
        (VerdictKind::Inequivalent, Some(s)) => writeln!(
            out,
            "INEQUIVALENT: separated by {}: {} vs {}",
            s.invariant, s.a, s.b
        ),
        _ => writeln!(
            out,
            "UNKNOWN: {} is {}, {} is {}",
            v.expr_a, v.label_a, v.expr_b, v.label_b
        ),
    }
    .unwrap();
    for r in &v.reasons {
        writeln!(out, "  blocked: {r}").unwrap();
    }
    out.push_str(&explain_steps(&v.derivation));
    out
}

/// Numbered listing of derivation steps with premises and citations.
pub fn explain_steps(steps: &[DerivationStep]) -> String {
    let mut out = String::new();
    for (i, s) in steps.iter().enumerate() {
        writeln!(out, "{:>3}. [{}] {}", i + 1, s.rule, s.conclusion).unwrap();
        for p in &s.premises {
            writeln!(out, "       from {p}").unwrap();
        }
        writeln!(out, "       by: {}", s.cite).unwrap();
    }
    out
}
