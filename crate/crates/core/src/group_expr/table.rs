use super::{semantic, Result};

/// Largest table accepted; associativity is checked exhaustively.
pub const MAX_TABLE_ORDER: usize = 256;

/// Finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteTable {
    name: String,
    elements: Vec<String>,
    mult: Vec<Vec<usize>>,
    identity: usize,
}

impl FiniteTable {
    /// Validates closure, identity, inverses and associativity.
    pub fn new(name: &str, elements: Vec<String>, mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return semantic(format!("{name}: table has no elements"));
        }
        if n > MAX_TABLE_ORDER {
            return semantic(format!(
                "{name}: table order {n} exceeds {MAX_TABLE_ORDER}"
            ));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = elements.iter().find(|e| !seen.insert(e.as_str())) {
            return semantic(format!("{name}: duplicate element {dup:?}"));
        }
        if mult.len() != n || mult.iter().any(|row| row.len() != n) {
            return semantic(format!("{name}: table must be {n} x {n}"));
        }
        if mult.iter().flatten().any(|&x| x >= n) {
            return semantic(format!("{name}: table is not closed"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mult[e][a] == a && mult[a][e] == a))
            .ok_or_else(|| super::ExprError::Semantic(format!("{name}: no identity element")))?;
        for a in 0..n {
            if !(0..n).any(|b| mult[a][b] == identity && mult[b][a] == identity) {
                return semantic(format!("{name}: {} has no inverse", elements[a]));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mult[a][b];
                for c in 0..n {
                    if mult[ab][c] != mult[a][mult[b][c]] {
                        return semantic(format!(
                            "{name}: nonassociative at ({}, {}, {})",
                            elements[a], elements[b], elements[c]
                        ));
                    }
                }
            }
        }
        Ok(FiniteTable {
            name: name.to_string(),
            elements,
            mult,
            identity,
        })
    }

    /// Rows separated by `;`, entries by whitespace, labels from `elements`.
    pub fn from_text(name: &str, elements: &str, table: &str) -> Result<Self> {
        let elements: Vec<String> = elements.split_whitespace().map(str::to_string).collect();
        let index = |label: &str| {
            elements
                .iter()
                .position(|e| e == label)
                .ok_or_else(|| super::ExprError::Semantic(format!("{name}: unknown element {label:?}")))
        };
        let mult = table
            .split(';')
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(|row| row.split_whitespace().map(index).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FiniteTable::new(name, elements, mult)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.mult[a][b] == self.identity)
            .expect("validated group")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_four() {
        let t = FiniteTable::from_text(
            "V4",
            "e a b c",
            "e a b c; a e c b; b c e a; c b a e",
        )
        .unwrap();
        assert_eq!(t.order(), 4);
        assert_eq!(t.identity(), 0);
        assert_eq!(t.inverse(3), 3);
        assert_eq!(t.mul(1, 2), 3);
    }

    #[test]
    fn rejects_non_groups() {
        // no inverses
        assert!(FiniteTable::from_text("M", "e a", "e a; a a").is_err());
        // not closed over labels
        assert!(FiniteTable::from_text("M", "e a", "e a; a q").is_err());
        // Latin square without associativity
        let r = FiniteTable::from_text(
            "Q",
            "e a b c d",
            "e a b c d; a e c d b; b d e a c; c b d e a; d c a b e",
        );
        assert!(r.is_err());
    }
}
