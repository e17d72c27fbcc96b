//! Towers (inverse sequences) of finitely generated free groups.
//!
//! Stage `i` carries `F(rank(i))`; bond `i` maps stage `i` to stage `i - 1`.
//! Three descriptors are supported: a finite explicit window, an eventually
//! periodic tower (prefix + repeating block, unrolled on demand) and the
//! standard telescopic towers with basis projections as bonds.

mod analysis;
mod format;

pub use analysis::{
    mittag_leffler, pro_iso_telescopic, pro_trivial, stable_image_ranks, telescopic_type,
    verify_descending, MlVerdict, ProTrivialVerdict, ProTrivialWitness,
};

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::free_group::{FreeGroupError, FreeHom};

/// Default number of stages examined by the window checks.
pub const DEFAULT_DEPTH: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("window exhausted: depth {depth} exceeds explicit window {window}")]
    WindowExhausted { depth: usize, window: usize },
    #[error("tower is not a standard telescopic tower")]
    NotStandard,
    #[error("invalid tower: {0}")]
    Invalid(String),
    #[error("invalid stage selection: {0}")]
    BadSelection(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
}

pub type Result<T> = std::result::Result<T, TowerError>;

/// Pro-isomorphism type of a tower of free groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProType {
    Trivial,
    /// Constant infinite cyclic tower, `STABLE_FREE(1)`.
    ProZ,
    /// Telescopic with infinitely many strict rank increases.
    TelescopicInf,
    /// Stable free of rank `r >= 2`.
    StableFree(usize),
    Other(String),
    Unknown,
}

impl ProType {
    /// Canonical encoding of a stable free tower of rank `r`.
    pub fn stable_free(r: usize) -> Self {
        match r {
            0 => ProType::Trivial,
            1 => ProType::ProZ,
            r => ProType::StableFree(r),
        }
    }

    /// One of the telescopic normal forms (trivial, stable free, or
    /// strictly growing); these are pairwise non-pro-isomorphic.
    pub fn is_canonical(&self) -> bool {
        matches!(
            self,
            ProType::Trivial | ProType::ProZ | ProType::TelescopicInf | ProType::StableFree(_)
        )
    }

    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        Some(match t.to_ascii_uppercase().as_str() {
            "TRIVIAL" => ProType::Trivial,
            "PRO_Z" => ProType::ProZ,
            "TELESCOPIC_INF" => ProType::TelescopicInf,
            "UNKNOWN" => ProType::Unknown,
            u if u.starts_with("STABLE_FREE(") && u.ends_with(')') => {
                let r = u["STABLE_FREE(".len()..u.len() - 1].parse().ok()?;
                ProType::stable_free(r)
            }
            u if u.starts_with("OTHER(") && u.ends_with(')') => {
                ProType::Other(t["OTHER(".len()..t.len() - 1].to_string())
            }
            _ => return None,
        })
    }
}

impl fmt::Display for ProType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProType::Trivial => f.write_str("TRIVIAL"),
            ProType::ProZ => f.write_str("PRO_Z"),
            ProType::TelescopicInf => f.write_str("TELESCOPIC_INF"),
            ProType::StableFree(r) => write!(f, "STABLE_FREE({r})"),
            ProType::Other(tag) => write!(f, "OTHER({tag})"),
            ProType::Unknown => f.write_str("UNKNOWN"),
        }
    }
}

impl Serialize for ProType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// What follows the listed increments of a telescopic tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    /// All increments are zero afterwards.
    Zero,
    /// The block repeats forever.
    Repeat(Vec<usize>),
}

/// Increment sequence of a standard telescopic tower: `increments[i]` new
/// basis elements appear at stage `i` (stage 0 has rank `increments[0]`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Increments {
    pub prefix: Vec<usize>,
    pub tail: Tail,
}

impl Increments {
    pub fn new(prefix: Vec<usize>, tail: Tail) -> Result<Self> {
        if let Tail::Repeat(block) = &tail {
            if block.is_empty() {
                return Err(TowerError::Invalid("empty repeat block".into()));
            }
        }
        Ok(Increments { prefix, tail })
    }

    /// `prefix` followed by its last element forever.
    pub fn repeat_last(prefix: Vec<usize>) -> Result<Self> {
        let last = *prefix
            .last()
            .ok_or_else(|| TowerError::Invalid("nothing to repeat".into()))?;
        Ok(Increments {
            prefix,
            tail: Tail::Repeat(vec![last]),
        })
    }

    pub fn increment(&self, stage: usize) -> usize {
        if stage < self.prefix.len() {
            return self.prefix[stage];
        }
        match &self.tail {
            Tail::Zero => 0,
            Tail::Repeat(block) => block[(stage - self.prefix.len()) % block.len()],
        }
    }

    pub fn total_rank(&self, stage: usize) -> usize {
        (0..=stage).map(|j| self.increment(j)).sum()
    }

    /// Whether increments are positive infinitely often.
    pub fn grows_forever(&self) -> bool {
        matches!(&self.tail, Tail::Repeat(block) if block.iter().any(|&x| x > 0))
    }

    /// Rank the tower settles at, when it stops growing.
    pub fn final_rank(&self) -> Option<usize> {
        if self.grows_forever() {
            None
        } else {
            Some(self.prefix.iter().sum())
        }
    }
}

/// Finite window `F(ranks[0]) <- F(ranks[1]) <- ... <- F(ranks[W])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitTower {
    ranks: Vec<usize>,
    bonds: Vec<FreeHom>,
}

impl ExplicitTower {
    /// `bonds[i - 1]` is the bond from stage `i` to stage `i - 1`.
    pub fn new(ranks: Vec<usize>, bonds: Vec<FreeHom>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(TowerError::Invalid("a tower needs at least one stage".into()));
        }
        if bonds.len() + 1 != ranks.len() {
            return Err(TowerError::Invalid(format!(
                "{} stages need {} bonds, got {}",
                ranks.len(),
                ranks.len() - 1,
                bonds.len()
            )));
        }
        for (i, b) in bonds.iter().enumerate() {
            check_bond(i + 1, b, ranks[i + 1], ranks[i])?;
        }
        Ok(ExplicitTower { ranks, bonds })
    }

    pub fn window(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn bonds(&self) -> &[FreeHom] {
        &self.bonds
    }
}

/// Prefix stages followed by a block of stages repeated forever. The bond
/// into the first block stage comes from the block, so the last prefix stage
/// and the last block stage must have equal rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicTower {
    prefix_ranks: Vec<usize>,
    prefix_bonds: Vec<FreeHom>,
    period_ranks: Vec<usize>,
    period_bonds: Vec<FreeHom>,
}

impl PeriodicTower {
    pub fn new(
        prefix_ranks: Vec<usize>,
        prefix_bonds: Vec<FreeHom>,
        period_ranks: Vec<usize>,
        period_bonds: Vec<FreeHom>,
    ) -> Result<Self> {
        if prefix_ranks.is_empty() || period_ranks.is_empty() {
            return Err(TowerError::Invalid(
                "periodic tower needs a nonempty prefix and block".into(),
            ));
        }
        if prefix_bonds.len() + 1 != prefix_ranks.len() || period_bonds.len() != period_ranks.len()
        {
            return Err(TowerError::Invalid("bond count does not match stage count".into()));
        }
        let last_prefix = *prefix_ranks.last().unwrap();
        if last_prefix != *period_ranks.last().unwrap() {
            return Err(TowerError::Invalid(format!(
                "last prefix rank {} differs from last block rank {}",
                last_prefix,
                period_ranks.last().unwrap()
            )));
        }
        for (i, b) in prefix_bonds.iter().enumerate() {
            check_bond(i + 1, b, prefix_ranks[i + 1], prefix_ranks[i])?;
        }
        let p = prefix_ranks.len();
        for (m, b) in period_bonds.iter().enumerate() {
            let target = if m == 0 {
                last_prefix
            } else {
                period_ranks[m - 1]
            };
            check_bond(p + m, b, period_ranks[m], target)?;
        }
        Ok(PeriodicTower {
            prefix_ranks,
            prefix_bonds,
            period_ranks,
            period_bonds,
        })
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_ranks.len()
    }

    pub fn period(&self) -> usize {
        self.period_ranks.len()
    }

    /// First stage from which the bond data repeats with the period.
    pub fn periodic_from(&self) -> usize {
        self.prefix_ranks.len() - 1
    }
}

fn check_bond(stage: usize, b: &FreeHom, source: usize, target: usize) -> Result<()> {
    if b.source_rank() != source || b.target_rank() != target {
        return Err(TowerError::Invalid(format!(
            "bond {stage} must map F({source}) -> F({target}), got F({}) -> F({})",
            b.source_rank(),
            b.target_rank()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tower {
    Explicit(ExplicitTower),
    Periodic(PeriodicTower),
    Telescopic(Increments),
}

impl Tower {
    pub fn telescopic(increments: Increments) -> Self {
        Tower::Telescopic(increments)
    }

    /// Last available stage, `None` for infinite towers.
    pub fn last_stage(&self) -> Option<usize> {
        match self {
            Tower::Explicit(t) => Some(t.window()),
            _ => None,
        }
    }

    pub fn rank(&self, stage: usize) -> Result<usize> {
        match self {
            Tower::Explicit(t) => t
                .ranks
                .get(stage)
                .copied()
                .ok_or(TowerError::WindowExhausted {
                    depth: stage,
                    window: t.window(),
                }),
            Tower::Periodic(t) => Ok(if stage < t.prefix_ranks.len() {
                t.prefix_ranks[stage]
            } else {
                t.period_ranks[(stage - t.prefix_ranks.len()) % t.period()]
            }),
            Tower::Telescopic(inc) => Ok(inc.total_rank(stage)),
        }
    }

    /// Bond from `stage` to `stage - 1`; `stage >= 1`.
    pub fn bond(&self, stage: usize) -> Result<FreeHom> {
        if stage == 0 {
            return Err(TowerError::BadSelection("stage 0 has no bond".into()));
        }
        match self {
            Tower::Explicit(t) => {
                t.bonds
                    .get(stage - 1)
                    .cloned()
                    .ok_or(TowerError::WindowExhausted {
                        depth: stage,
                        window: t.window(),
                    })
            }
            Tower::Periodic(t) => Ok(if stage < t.prefix_ranks.len() {
                t.prefix_bonds[stage - 1].clone()
            } else {
                t.period_bonds[(stage - t.prefix_ranks.len()) % t.period()].clone()
            }),
            Tower::Telescopic(inc) => Ok(FreeHom::projection(
                inc.total_rank(stage),
                inc.total_rank(stage - 1),
            )?),
        }
    }

    /// Composite bond from stage `from` down to stage `to` (`to <= from`).
    pub fn composite(&self, from: usize, to: usize) -> Result<FreeHom> {
        if to > from {
            return Err(TowerError::BadSelection(format!(
                "no bond from stage {from} up to stage {to}"
            )));
        }
        let mut comp = FreeHom::identity(self.rank(from)?);
        for k in (to + 1..=from).rev() {
            comp = self.bond(k)?.compose(&comp)?;
        }
        Ok(comp)
    }

    /// Explicit window on stages `0..=last`.
    pub fn unroll(&self, last: usize) -> Result<ExplicitTower> {
        let stages: Vec<usize> = (0..=last).collect();
        match self.reindex(&stages)? {
            Tower::Explicit(t) => Ok(t),
            _ => unreachable!("reindex yields an explicit tower"),
        }
    }

    /// Pass to the subsequence of the selected stages; bonds become the
    /// composites between consecutive selected stages.
    pub fn reindex(&self, stages: &[usize]) -> Result<Tower> {
        if stages.is_empty() {
            return Err(TowerError::BadSelection("empty selection".into()));
        }
        if stages.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TowerError::BadSelection(
                "selection must be strictly increasing".into(),
            ));
        }
        if let Some(w) = self.last_stage() {
            let last = *stages.last().unwrap();
            if last > w {
                return Err(TowerError::WindowExhausted {
                    depth: last,
                    window: w,
                });
            }
        }
        let ranks = stages
            .iter()
            .map(|&s| self.rank(s))
            .collect::<Result<Vec<_>>>()?;
        let bonds = stages
            .windows(2)
            .map(|w| self.composite(w[1], w[0]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tower::Explicit(ExplicitTower::new(ranks, bonds)?))
    }

    /// Subsequence `start, start + gaps[0], ...` with the gap pattern repeated
    /// forever. For a periodic tower whose block length divides the sum of
    /// the gaps and with `start` in the periodic range, the result is again
    /// periodic.
    pub fn reindex_periodic(&self, start: usize, gaps: &[usize]) -> Result<Tower> {
        let Tower::Periodic(t) = self else {
            return Err(TowerError::BadSelection(
                "periodic reindexing needs a periodic tower".into(),
            ));
        };
        if gaps.is_empty() || gaps.contains(&0) {
            return Err(TowerError::BadSelection("gaps must be positive".into()));
        }
        let total: usize = gaps.iter().sum();
        if !total.is_multiple_of(t.period()) {
            return Err(TowerError::BadSelection(format!(
                "gap sum {total} is not a multiple of the period {}",
                t.period()
            )));
        }
        if start < t.periodic_from() {
            return Err(TowerError::BadSelection(format!(
                "start {start} precedes the periodic range (from {})",
                t.periodic_from()
            )));
        }
        let mut stages = vec![start];
        for g in gaps {
            stages.push(stages.last().unwrap() + g);
        }
        let period_ranks = stages[1..]
            .iter()
            .map(|&s| self.rank(s))
            .collect::<Result<Vec<_>>>()?;
        let period_bonds = stages
            .windows(2)
            .map(|w| self.composite(w[1], w[0]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tower::Periodic(PeriodicTower::new(
            vec![self.rank(start)?],
            Vec::new(),
            period_ranks,
            period_bonds,
        )?))
    }

    pub fn parse(text: &str) -> Result<Tower> {
        format::parse(text)
    }

    pub fn to_text(&self) -> String {
        format::print(self)
    }
}
