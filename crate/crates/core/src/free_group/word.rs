use std::fmt;

use super::{letter_name, FreeGroupError, Result};

/// A freely reduced word in `F(rank)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        FreeWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// The generator with 1-based index `index`.
    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        Self::reduce(rank, &[index as i32])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(rank: usize, letters: &[i32]) -> Result<Self> {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(FreeGroupError::LetterOutOfRange { letter: l, rank });
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(FreeWord { rank, letters: out })
    }

    /// Caller guarantees the letters are in range and reduced.
    pub(crate) fn from_reduced(rank: usize, letters: Vec<i32>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != -w[1]));
        FreeWord { rank, letters }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn mul(&self, other: &FreeWord) -> Result<Self> {
        if self.rank != other.rank {
            return Err(FreeGroupError::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(FreeWord {
            rank: self.rank,
            letters: out,
        })
    }

    /// Reinterpret the word in a larger (or equal) rank context.
    pub fn widen(&self, rank: usize) -> Result<Self> {
        if let Some(&l) = self.letters.iter().find(|l| l.unsigned_abs() as usize > rank) {
            return Err(FreeGroupError::LetterOutOfRange { letter: l, rank });
        }
        Ok(FreeWord {
            rank,
            letters: self.letters.clone(),
        })
    }

    /// Parse `a b A`, `abA`, `x27 X3` or `1` (identity).
    pub fn parse(rank: usize, text: &str) -> Result<Self> {
        let err = |reason: &str| FreeGroupError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = text.trim();
        if trimmed == "1" || trimmed.is_empty() {
            return Ok(Self::identity(rank));
        }
        let chars: Vec<char> = trimmed.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(err(&format!("unexpected character {c:?}")));
            }
            let sign = if c.is_ascii_lowercase() { 1 } else { -1 };
            i += 1;
            let index = if (c == 'x' || c == 'X') && i < chars.len() && chars[i].is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                digits.parse::<i32>().map_err(|_| err("bad generator index"))?
            } else {
                (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1
            };
            letters.push(sign * index);
        }
        Self::reduce(rank, &letters)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, &l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&letter_name(l))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Repeatedly scan for an adjacent cancelling pair until none is left.
    fn naive_reduce(letters: &[i32]) -> Vec<i32> {
        let mut w = letters.to_vec();
        loop {
            let pos = w.windows(2).position(|p| p[0] == -p[1]);
            match pos {
                Some(i) => {
                    w.drain(i..i + 2);
                }
                None => return w,
            }
        }
    }

    #[test]
    fn cancellation() {
        let w = FreeWord::reduce(2, &[1, -1]).unwrap();
        assert!(w.is_identity());
        let w = FreeWord::reduce(2, &[1, 2, -2, 1]).unwrap();
        assert_eq!(w.letters(), &[1, 1]);
    }

    #[test]
    fn out_of_range() {
        assert_eq!(
            FreeWord::reduce(2, &[3]),
            Err(FreeGroupError::LetterOutOfRange { letter: 3, rank: 2 })
        );
        assert!(FreeWord::reduce(2, &[0]).is_err());
    }

    #[test]
    fn parse_and_print() {
        let w = FreeWord::parse(3, "a b A").unwrap();
        assert_eq!(w.letters(), &[1, 2, -1]);
        assert_eq!(w.to_string(), "a b A");
        assert_eq!(FreeWord::parse(3, "abBc").unwrap().letters(), &[1, 3]);
        assert!(FreeWord::parse(2, "1").unwrap().is_identity());
        let big = FreeWord::parse(30, "x27 X30 a").unwrap();
        assert_eq!(big.letters(), &[27, -30, 1]);
        assert_eq!(big.to_string(), "x27 X30 a");
        assert!(FreeWord::parse(2, "c").is_err());
        assert!(FreeWord::parse(2, "a+b").is_err());
    }

    proptest! {
        #[test]
        fn reduce_matches_naive_scan(raw in proptest::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 0..40)) {
            let w = FreeWord::reduce(3, &raw).unwrap();
            let expected = naive_reduce(&raw);
            prop_assert_eq!(w.letters(), expected.as_slice());
            let again = FreeWord::reduce(3, w.letters()).unwrap();
            prop_assert_eq!(again, w);
        }

        #[test]
        fn inverse_cancels(raw in proptest::collection::vec(prop_oneof![-2i32..=-1, 1i32..=2], 0..20)) {
            let w = FreeWord::reduce(2, &raw).unwrap();
            prop_assert!(w.mul(&w.inverse()).unwrap().is_identity());
        }

        #[test]
        fn print_parse_round_trip(raw in proptest::collection::vec(prop_oneof![-30i32..=-1, 1i32..=30], 0..20)) {
            let w = FreeWord::reduce(30, &raw).unwrap();
            prop_assert_eq!(FreeWord::parse(30, &w.to_string()).unwrap(), w);
        }
    }
}
