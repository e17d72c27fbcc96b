//! Benchmark inputs shared by the criterion targets.

use pro2eq_core::free_group::FreeWord;
use pro2eq_core::{parse, GroupExpr};

/// Expressions classified by the corpus benchmark.
pub const CORPUS: &[&str] = &[
    "Z^3",
    "Z^2",
    "F2 x Z",
    "Z2 * Z2 * Z2",
    "Z^3 * Z^3",
    "Amal(Z^2, Z2 * Z2 * Z2, 1)",
    "(Z^2 * Z) x Z5",
    "Sg2 x Z",
    "FI(Sg3, 4) x F2",
    "Ext(Z^2, F3)",
    "QFN(Z2 * Z3, 1)",
];

pub fn corpus() -> Vec<GroupExpr> {
    CORPUS.iter().map(|s| parse(s).unwrap()).collect()
}

/// `count` words `g_i^len` conjugated by a short prefix, in `F(rank)`.
pub fn generators(rank: usize, count: usize, len: usize) -> Vec<FreeWord> {
    (0..count)
        .map(|i| {
            let g = (i % rank) as i32 + 1;
            let h = ((i + 1) % rank) as i32 + 1;
            let mut letters = vec![h, g];
            letters.extend(std::iter::repeat_n(g, len));
            letters.push(-h);
            FreeWord::reduce(rank, &letters).unwrap()
        })
        .collect()
}
