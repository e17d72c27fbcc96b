use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

/// Canonical descriptor of a proper 2-equivalence class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    /// Finite groups.
    Fin,
    /// 2-ended groups.
    Z,
    /// 1-ended, simply connected at infinity: the class of `Z^3`.
    Z3,
    /// 1-ended with constant pro-group `Z`: the class of `Z^2`.
    Z2,
    /// 1-ended with strictly growing telescopic pro-group: the class of `F2 x Z`.
    F2xZ,
    /// 1-ended outside the three classes above, or not known to be in one.
    /// Only a pinned tag names a class.
    OneOther { tag: String, pinned: bool },
    /// Infinitely many ends, by the set of 1-ended vertex classes.
    Inf(BTreeSet<ClassLabel>),
    Unknown,
}

impl ClassLabel {
    /// Names a single class: not unknown and free of unpinned tags.
    pub fn is_determined(&self) -> bool {
        match self {
            ClassLabel::Unknown => false,
            ClassLabel::OneOther { pinned, .. } => *pinned,
            ClassLabel::Inf(s) => s.iter().all(ClassLabel::is_determined),
            _ => true,
        }
    }

    /// Whether the vertex class disappears inside an infinitely ended group.
    pub fn merges_away(&self) -> bool {
        matches!(self, ClassLabel::Fin | ClassLabel::Z | ClassLabel::Z3)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Fin => f.write_str("C_FIN"),
            ClassLabel::Z => f.write_str("C_Z"),
            ClassLabel::Z3 => f.write_str("C_Z3"),
            ClassLabel::Z2 => f.write_str("C_Z2"),
            ClassLabel::F2xZ => f.write_str("C_F2xZ"),
            ClassLabel::OneOther { tag, .. } => write!(f, "C_ONE_OTHER({tag})"),
            ClassLabel::Inf(s) => {
                f.write_str("C_INF({")?;
                for (i, l) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str("})")
            }
            ClassLabel::Unknown => f.write_str("C_UNKNOWN"),
        }
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text() {
        assert_eq!(ClassLabel::Inf(BTreeSet::new()).to_string(), "C_INF({})");
        let s: BTreeSet<_> = [ClassLabel::F2xZ, ClassLabel::Z2].into();
        assert_eq!(ClassLabel::Inf(s).to_string(), "C_INF({C_Z2, C_F2xZ})");
        let open = ClassLabel::OneOther {
            tag: "one-of-three".into(),
            pinned: false,
        };
        assert!(!open.is_determined());
        assert!(!ClassLabel::Inf([open].into()).is_determined());
        assert!(ClassLabel::Inf(BTreeSet::new()).is_determined());
    }
}
