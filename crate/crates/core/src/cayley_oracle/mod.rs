//! Empirical ends oracle: metric balls in Cayley graphs of groups built from
//! finite groups, `Z`, free groups, direct and free products, enumerated
//! through compositional normal forms.

mod ball;

pub use ball::{
    ball, ball_dot, estimate_ends, sweep_tsv, BallGraph, EndsEstimate, SweepRow, DEFAULT_BUDGET,
    DEFAULT_MARGIN,
};

use thiserror::Error;

use crate::group_expr::{Annotations, FiniteTable, GroupExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("constructor not supported by the oracle: {0}")]
    UnsupportedConstructor(String),
    #[error("element budget {limit} exceeded after radius {radius}")]
    BudgetExceeded { limit: usize, radius: usize },
    #[error("radius {radius} leaves less than {margin} beyond k = {k}")]
    InsufficientRadius { k: usize, radius: usize, margin: usize },
}

/// Canonical token of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Unit,
    /// Residue or table index.
    Mod(u64),
    Int(i64),
    /// Reduced free word; letter `2i` is generator `i`, `2i + 1` its inverse.
    Word(Vec<u8>),
    Tuple(Vec<Elem>),
    /// Alternating syllables `(factor, non-identity element)`.
    Syllables(Vec<(u16, Elem)>),
}

/// A group with canonical normal forms and a generating set closed under
/// inverses. Generators act by right multiplication.
#[derive(Clone, Debug)]
pub enum NormalFormGroup {
    Trivial,
    Cyclic(u64),
    Table { table: FiniteTable, gens: Vec<usize> },
    Int,
    Free(u8),
    Direct(Vec<NormalFormGroup>),
    FreeProduct(Vec<NormalFormGroup>),
}

impl NormalFormGroup {
    pub fn generator_count(&self) -> usize {
        match self {
            NormalFormGroup::Trivial => 0,
            NormalFormGroup::Cyclic(n) => match n {
                1 => 0,
                2 => 1,
                _ => 2,
            },
            NormalFormGroup::Table { gens, .. } => gens.len(),
            NormalFormGroup::Int => 2,
            NormalFormGroup::Free(n) => 2 * *n as usize,
            NormalFormGroup::Direct(fs) | NormalFormGroup::FreeProduct(fs) => {
                fs.iter().map(NormalFormGroup::generator_count).sum()
            }
        }
    }

    pub fn identity(&self) -> Elem {
        match self {
            NormalFormGroup::Trivial => Elem::Unit,
            NormalFormGroup::Cyclic(_) => Elem::Mod(0),
            NormalFormGroup::Table { table, .. } => Elem::Mod(table.identity() as u64),
            NormalFormGroup::Int => Elem::Int(0),
            NormalFormGroup::Free(_) => Elem::Word(Vec::new()),
            NormalFormGroup::Direct(fs) => Elem::Tuple(fs.iter().map(|f| f.identity()).collect()),
            NormalFormGroup::FreeProduct(_) => Elem::Syllables(Vec::new()),
        }
    }

    /// Index of the inverse of generator `g`.
    pub fn inverse_generator(&self, g: usize) -> usize {
        match self {
            NormalFormGroup::Cyclic(2) => 0,
            NormalFormGroup::Cyclic(_) | NormalFormGroup::Int => 1 - g,
            NormalFormGroup::Table { table, gens } => {
                let inv = table.inverse(gens[g]);
                gens.iter().position(|&x| x == inv).expect("generators closed under inverses")
            }
            NormalFormGroup::Free(_) => g ^ 1,
            NormalFormGroup::Direct(fs) | NormalFormGroup::FreeProduct(fs) => {
                let (i, j) = locate(fs, g);
                offset(fs, i) + fs[i].inverse_generator(j)
            }
            NormalFormGroup::Trivial => unreachable!("trivial group has no generators"),
        }
    }

    /// `x` times generator `g`.
    pub fn apply(&self, x: &Elem, g: usize) -> Elem {
        match (self, x) {
            (NormalFormGroup::Cyclic(n), Elem::Mod(a)) => {
                let step = if g == 0 { 1 } else { n - 1 };
                Elem::Mod((a + step) % n)
            }
            (NormalFormGroup::Table { table, gens }, Elem::Mod(a)) => {
                Elem::Mod(table.mul(*a as usize, gens[g]) as u64)
            }
            (NormalFormGroup::Int, Elem::Int(a)) => Elem::Int(if g == 0 { a + 1 } else { a - 1 }),
            (NormalFormGroup::Free(_), Elem::Word(w)) => {
                let mut w = w.clone();
                let letter = g as u8;
                if w.last() == Some(&(letter ^ 1)) {
                    w.pop();
                } else {
                    w.push(letter);
                }
                Elem::Word(w)
            }
            (NormalFormGroup::Direct(fs), Elem::Tuple(t)) => {
                let (i, j) = locate(fs, g);
                let mut t = t.clone();
                t[i] = fs[i].apply(&t[i], j);
                Elem::Tuple(t)
            }
            (NormalFormGroup::FreeProduct(fs), Elem::Syllables(s)) => {
                let (i, j) = locate(fs, g);
                let mut s = s.clone();
                match s.last_mut() {
                    Some((f, y)) if *f as usize == i => {
                        let z = fs[i].apply(y, j);
                        if z == fs[i].identity() {
                            s.pop();
                        } else {
                            *y = z;
                        }
                    }
                    _ => s.push((i as u16, fs[i].apply(&fs[i].identity(), j))),
                }
                Elem::Syllables(s)
            }
            _ => panic!("element {x:?} does not belong to this group"),
        }
    }
}

fn offset(fs: &[NormalFormGroup], i: usize) -> usize {
    fs[..i].iter().map(NormalFormGroup::generator_count).sum()
}

/// Factor and local generator of a product generator.
fn locate(fs: &[NormalFormGroup], mut g: usize) -> (usize, usize) {
    for (i, f) in fs.iter().enumerate() {
        let n = f.generator_count();
        if g < n {
            return (i, g);
        }
        g -= n;
    }
    panic!("generator index out of range")
}

/// Normal-form model of a supported expression; the generating set is the
/// union of the factors' generators.
pub fn realize(e: &GroupExpr, ann: &Annotations) -> Result<NormalFormGroup, OracleError> {
    let unsupported = |what: &str| Err(OracleError::UnsupportedConstructor(what.to_string()));
    Ok(match e {
        GroupExpr::Trivial => NormalFormGroup::Trivial,
        GroupExpr::FiniteCyclic(n) => NormalFormGroup::Cyclic(*n),
        GroupExpr::FiniteTable(t) => table_group(t.clone()),
        GroupExpr::Int => NormalFormGroup::Int,
        GroupExpr::Free(n) if *n <= 64 => NormalFormGroup::Free(*n as u8),
        GroupExpr::Free(_) => return unsupported("free group of rank above 64"),
        GroupExpr::Surface {
            genus: 1,
            orientable: true,
        } => NormalFormGroup::Direct(vec![NormalFormGroup::Int, NormalFormGroup::Int]),
        GroupExpr::Surface { .. } => return unsupported("surface other than the torus"),
        GroupExpr::DirectProduct(fs) => NormalFormGroup::Direct(
            fs.iter().map(|f| realize(f, ann)).collect::<Result<_, _>>()?,
        ),
        GroupExpr::FreeProduct(fs) => NormalFormGroup::FreeProduct(
            fs.iter().map(|f| realize(f, ann)).collect::<Result<_, _>>()?,
        ),
        GroupExpr::Opaque(name) => match ann.table(name) {
            Some(t) => table_group(t.clone()),
            None => return unsupported(&format!("opaque group {name}")),
        },
        GroupExpr::Amalgam { .. } => return unsupported("Amal"),
        GroupExpr::Hnn { .. } => return unsupported("HNN"),
        GroupExpr::Extension { .. } => return unsupported("Ext"),
        GroupExpr::FiniteIndex { .. } => return unsupported("FI"),
        GroupExpr::QuotientByFiniteNormal { .. } => return unsupported("QFN"),
        GroupExpr::Graph { .. } => return unsupported("Graph"),
    })
}

fn table_group(table: FiniteTable) -> NormalFormGroup {
    let gens = (0..table.order()).filter(|&x| x != table.identity()).collect();
    NormalFormGroup::Table { table, gens }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_expr::parse;

    #[test]
    fn generators_are_involution_closed() {
        for s in ["Z", "Z2", "Z5", "F3", "Z x Z3", "Z2 * Z3 * F2", "Sg1", "(Z * Z2) x Z4"] {
            let g = realize(&parse(s).unwrap(), &Annotations::default()).unwrap();
            let id = g.identity();
            let mut x = id.clone();
            for k in 0..g.generator_count() {
                let inv = g.inverse_generator(k);
                assert_eq!(g.inverse_generator(inv), k, "{s}");
                let y = g.apply(&x, k);
                assert_eq!(g.apply(&y, inv), x, "{s}: generator {k}");
                x = y;
            }
        }
    }

    #[test]
    fn infinite_dihedral_normal_forms() {
        let g = realize(&parse("Z2 * Z2").unwrap(), &Annotations::default()).unwrap();
        assert_eq!(g.generator_count(), 2);
        let st = g.apply(&g.apply(&g.identity(), 0), 1);
        assert_eq!(
            st,
            Elem::Syllables(vec![(0, Elem::Mod(1)), (1, Elem::Mod(1))])
        );
        assert_eq!(g.apply(&g.apply(&st, 1), 0), g.identity());
    }

    #[test]
    fn unsupported() {
        assert_eq!(
            realize(&parse("FI(Z^2, 2)").unwrap(), &Annotations::default()).unwrap_err(),
            OracleError::UnsupportedConstructor("FI".into())
        );
    }
}
