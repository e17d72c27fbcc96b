use std::fmt;

use super::{letter_name, FreeGroupError, FreeWord, Result};

/// Homomorphism `F(source_rank) -> F(target_rank)` given by the images of
/// the basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeHom {
    source_rank: usize,
    target_rank: usize,
    images: Vec<FreeWord>,
}

impl FreeHom {
    pub fn new(source_rank: usize, target_rank: usize, images: Vec<FreeWord>) -> Result<Self> {
        if images.len() != source_rank {
            return Err(FreeGroupError::RankMismatch {
                expected: source_rank,
                found: images.len(),
            });
        }
        for w in &images {
            if w.rank() != target_rank {
                return Err(FreeGroupError::RankMismatch {
                    expected: target_rank,
                    found: w.rank(),
                });
            }
        }
        Ok(FreeHom {
            source_rank,
            target_rank,
            images,
        })
    }

    pub fn identity(rank: usize) -> Self {
        let images = (1..=rank as i32)
            .map(|i| FreeWord::from_reduced(rank, vec![i]))
            .collect();
        FreeHom {
            source_rank: rank,
            target_rank: rank,
            images,
        }
    }

    /// Basis projection `F(source) -> F(target)`, `target <= source`: the first
    /// `target` generators map to themselves, the rest to 1.
    pub fn projection(source_rank: usize, target_rank: usize) -> Result<Self> {
        if target_rank > source_rank {
            return Err(FreeGroupError::RankMismatch {
                expected: source_rank,
                found: target_rank,
            });
        }
        let images = (1..=source_rank)
            .map(|i| {
                if i <= target_rank {
                    FreeWord::from_reduced(target_rank, vec![i as i32])
                } else {
                    FreeWord::identity(target_rank)
                }
            })
            .collect();
        Ok(FreeHom {
            source_rank,
            target_rank,
            images,
        })
    }

    /// Basis inclusion `F(source) -> F(target)`, `source <= target`.
    pub fn inclusion(source_rank: usize, target_rank: usize) -> Result<Self> {
        if source_rank > target_rank {
            return Err(FreeGroupError::RankMismatch {
                expected: target_rank,
                found: source_rank,
            });
        }
        let images = (1..=source_rank)
            .map(|i| FreeWord::from_reduced(target_rank, vec![i as i32]))
            .collect();
        Ok(FreeHom {
            source_rank,
            target_rank,
            images,
        })
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(FreeWord::is_identity)
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        if w.rank() != self.source_rank {
            return Err(FreeGroupError::RankMismatch {
                expected: self.source_rank,
                found: w.rank(),
            });
        }
        let mut out: Vec<i32> = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            let push = |out: &mut Vec<i32>, x: i32| {
                if out.last() == Some(&-x) {
                    out.pop();
                } else {
                    out.push(x);
                }
            };
            if l > 0 {
                for &x in img.letters() {
                    push(&mut out, x);
                }
            } else {
                for &x in img.letters().iter().rev() {
                    push(&mut out, -x);
                }
            }
        }
        Ok(FreeWord::from_reduced(self.target_rank, out))
    }

    /// `f.compose(g)` is `f ∘ g`: apply `g` first. Requires
    /// `g.target_rank == f.source_rank`.
    pub fn compose(&self, g: &FreeHom) -> Result<FreeHom> {
        if g.target_rank != self.source_rank {
            return Err(FreeGroupError::RankMismatch {
                expected: self.source_rank,
                found: g.target_rank,
            });
        }
        let images = g
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeHom {
            source_rank: g.source_rank,
            target_rank: self.target_rank,
            images,
        })
    }

    /// Parse `a->a a, b->1` (missing generators map to 1).
    pub fn parse(source_rank: usize, target_rank: usize, text: &str) -> Result<Self> {
        let err = |reason: String| FreeGroupError::Parse {
            text: text.to_string(),
            reason,
        };
        let mut images = vec![FreeWord::identity(target_rank); source_rank];
        for clause in text.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            let (lhs, rhs) = clause
                .split_once("->")
                .ok_or_else(|| err(format!("missing '->' in {clause:?}")))?;
            let gen = FreeWord::parse(source_rank, lhs)?;
            match gen.letters() {
                [l] if *l > 0 => {
                    images[*l as usize - 1] = FreeWord::parse(target_rank, rhs)?;
                }
                _ => return Err(err(format!("left side {lhs:?} is not a generator"))),
            }
        }
        Ok(FreeHom {
            source_rank,
            target_rank,
            images,
        })
    }
}

impl fmt::Display for FreeHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", letter_name(i as i32 + 1), w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: usize, s: &str) -> FreeWord {
        FreeWord::parse(rank, s).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let f = FreeHom::parse(2, 3, "a->a b, b->C").unwrap();
        assert_eq!(FreeHom::identity(3).compose(&f).unwrap(), f);
        assert_eq!(f.compose(&FreeHom::identity(2)).unwrap(), f);
    }

    #[test]
    fn projection_after_inclusion() {
        let p = FreeHom::projection(2, 1).unwrap();
        let i = FreeHom::inclusion(1, 2).unwrap();
        assert_eq!(p.compose(&i).unwrap(), FreeHom::identity(1));
    }

    #[test]
    fn doubling_squared() {
        let d = FreeHom::parse(1, 1, "a->a a").unwrap();
        let dd = d.compose(&d).unwrap();
        assert_eq!(dd.images()[0], w(1, "aaaa"));
    }

    #[test]
    fn rank_mismatch() {
        let f = FreeHom::identity(2);
        let g = FreeHom::identity(3);
        assert!(matches!(
            f.compose(&g),
            Err(FreeGroupError::RankMismatch { .. })
        ));
        assert!(f.apply(&w(3, "c")).is_err());
    }

    #[test]
    fn apply_inverse_letters() {
        let f = FreeHom::parse(2, 2, "a->a b, b->b").unwrap();
        assert_eq!(f.apply(&w(2, "A")).unwrap(), w(2, "B A"));
        assert_eq!(f.apply(&w(2, "a B")).unwrap(), w(2, "a"));
    }

    #[test]
    fn display_round_trip() {
        let f = FreeHom::parse(2, 2, "a->a b, b->1").unwrap();
        assert_eq!(f.to_string(), "a->a b, b->1");
        assert_eq!(FreeHom::parse(2, 2, &f.to_string()).unwrap(), f);
    }
}
