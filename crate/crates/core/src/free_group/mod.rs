//! Finitely generated free groups: reduced words, homomorphisms and folded
//! subgroup graphs.
//!
//! Generators of `F(r)` are indexed `1..=r`; a letter is a signed index, a
//! negative letter being the inverse generator. Words print as `a b A`
//! (capital = inverse), generators past `z` print as `x27` / `X27`.

mod fold;
mod hom;
mod word;

pub use fold::{equal_subgroups, fold, fold_by_random_steps, image, SubgroupGraph};
pub use hom::FreeHom;
pub use word::FreeWord;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeGroupError {
    #[error("letter {letter} out of range for rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("cannot parse word {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

pub type Result<T> = std::result::Result<T, FreeGroupError>;

/// Letter name used by the word syntax.
pub(crate) fn letter_name(letter: i32) -> String {
    let idx = letter.unsigned_abs();
    if idx <= 26 {
        let base = if letter > 0 { b'a' } else { b'A' };
        ((base + (idx - 1) as u8) as char).to_string()
    } else if letter > 0 {
        format!("x{idx}")
    } else {
        format!("X{idx}")
    }
}
