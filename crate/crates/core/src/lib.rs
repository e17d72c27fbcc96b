//! Decision procedures for proper 2-equivalence of finitely presented groups
//! given in a constructor algebra: invariants, tower calculus, a rule-based
//! classifier and two brute-force oracles.

pub mod cayley_oracle;
pub mod classifier;
pub mod free_group;
pub mod group_expr;
pub mod invariants;
pub mod towers;

pub use classifier::{explain, ClassLabel, Classification, Classifier, Verdict, VerdictKind};
pub use free_group::{FreeHom, FreeWord, SubgroupGraph};
pub use group_expr::{normalize, parse, parse_with, Annotations, GroupExpr};
pub use invariants::{EndCount, Engine, H2Rank, InvariantReport, PNumber, TriState};
pub use towers::{ProType, Tower};

/// Package version plus a hash of the engine sources.
pub const ENGINE_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "+",
    env!("PRO2EQ_SOURCE_HASH")
);
