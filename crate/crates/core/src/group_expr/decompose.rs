use serde::Serialize;
use thiserror::Error;

use super::{normalize, parse_with, GroupExpr};
use crate::invariants::{EndCount, Engine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("expression is not known to have infinitely many ends (ends = {0})")]
    NotInfiniteEnded(EndCount),
    #[error("no splitting over finite groups is known for {0}")]
    Undecomposable(String),
}

/// One splitting step: `subject` is replaced by `pieces`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: &'static str,
    pub subject: String,
    pub pieces: Vec<String>,
}

/// Vertex groups (at most one end each) of a splitting over finite groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub vertices: Vec<GroupExpr>,
    pub steps: Vec<Step>,
}

/// Splits an infinitely ended expression down to vertex groups with 0 or 1
/// ends. 2-ended pieces are replaced by the trivial group.
pub fn vertex_decomposition(e: &GroupExpr, engine: &Engine) -> Result<Decomposition, DecomposeError> {
    let e = normalize(e);
    let ends = engine.ends(&e);
    if ends != EndCount::Inf {
        return Err(DecomposeError::NotInfiniteEnded(ends));
    }
    let mut d = Decomposition {
        vertices: Vec::new(),
        steps: Vec::new(),
    };
    split(&e, engine, &mut d)?;
    Ok(d)
}

/// One splitting step of a normalized expression: the rule used and the
/// normalized pieces.
pub(crate) fn split_step(
    e: &GroupExpr,
    engine: &Engine,
) -> Result<(&'static str, Vec<GroupExpr>), DecomposeError> {
    let (rule, pieces): (&'static str, Vec<GroupExpr>) = match e {
        GroupExpr::Free(n) => ("R-FREE", vec![GroupExpr::Int; *n as usize]),
        GroupExpr::FreeProduct(fs) => ("R-FREE", fs.clone()),
        GroupExpr::Amalgam { left, right, .. } => {
            ("R-AMAL", vec![(**left).clone(), (**right).clone()])
        }
        GroupExpr::Hnn { base, .. } => ("R-HNN", vec![(**base).clone(), GroupExpr::Int]),
        GroupExpr::Graph { vertices, .. } => ("R-GRAPH", vertices.clone()),
        GroupExpr::DirectProduct(fs) => ("R-QI1", single_infinite(fs, engine, e)?),
        GroupExpr::Extension { kernel, quotient } => {
            let fs = [(**kernel).clone(), (**quotient).clone()];
            let rule = if engine.ends(kernel) == EndCount::Zero {
                "R-QI2"
            } else {
                "R-QI1"
            };
            (rule, single_infinite(&fs, engine, e)?)
        }
        GroupExpr::FiniteIndex { base, .. } => ("R-QI1", vec![(**base).clone()]),
        GroupExpr::QuotientByFiniteNormal { base, .. } => ("R-QI2", vec![(**base).clone()]),
        GroupExpr::Opaque(name) => {
            let ann = engine.annotations();
            let vs = ann
                .get(name)
                .and_then(|a| a.vertices.clone())
                .ok_or_else(|| DecomposeError::Undecomposable(name.clone()))?;
            let pieces = vs
                .iter()
                .map(|v| parse_with(v, ann).map_err(|_| DecomposeError::Undecomposable(name.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            ("ANN", pieces)
        }
        _ => return Err(DecomposeError::Undecomposable(e.to_string())),
    };
    Ok((rule, pieces.iter().map(normalize).collect()))
}

fn split(e: &GroupExpr, engine: &Engine, d: &mut Decomposition) -> Result<(), DecomposeError> {
    let (rule, pieces) = split_step(e, engine)?;
    d.steps.push(Step {
        rule,
        subject: e.to_string(),
        pieces: pieces.iter().map(ToString::to_string).collect(),
    });
    for p in pieces {
        match engine.ends(&p) {
            EndCount::Two => {
                d.steps.push(Step {
                    rule: "R-2E",
                    subject: p.to_string(),
                    pieces: vec![GroupExpr::Trivial.to_string()],
                });
                d.vertices.push(GroupExpr::Trivial);
            }
            EndCount::Inf => split(&p, engine, d)?,
            _ => d.vertices.push(p),
        }
    }
    Ok(())
}

/// The single infinite factor of a product with one infinite factor.
fn single_infinite(
    fs: &[GroupExpr],
    engine: &Engine,
    whole: &GroupExpr,
) -> Result<Vec<GroupExpr>, DecomposeError> {
    let inf: Vec<&GroupExpr> = fs
        .iter()
        .filter(|f| engine.ends(f) != EndCount::Zero)
        .collect();
    match inf.as_slice() {
        [f] if engine.ends(f) == EndCount::Inf => Ok(vec![(*f).clone()]),
        _ => Err(DecomposeError::Undecomposable(whole.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_expr::{parse, Annotations};

    fn verts(s: &str) -> Vec<String> {
        let d = vertex_decomposition(&parse(s).unwrap(), &Engine::default()).unwrap();
        d.vertices.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn splits_down_to_vertices() {
        assert_eq!(verts("F3"), vec!["1", "1", "1"]);
        assert_eq!(verts("Z^3 * Sg2"), vec!["Sg2", "Z^3"]);
        assert_eq!(verts("Z2 * Z3"), vec!["Z2", "Z3"]);
        assert_eq!(verts("(Z^2 * Z) x Z5"), vec!["1", "Z^2"]);
        assert_eq!(verts("HNN(Z^2, 1)"), vec!["Z^2", "1"]);
        assert_eq!(verts("Amal(Z^2, Z2 * Z2 * Z2, 1)"), vec!["Z2", "Z2", "Z2", "Z^2"]);
        assert_eq!(
            verts(r#"Graph({"vertices": ["Z^3", "Z6", "Z2"], "edges": [[0, 1, 1], [1, 2, 2]]})"#),
            vec!["Z^3", "Z6", "Z2"]
        );
    }

    #[test]
    fn errors() {
        let e = Engine::default();
        assert_eq!(
            vertex_decomposition(&parse("Z^2").unwrap(), &e),
            Err(DecomposeError::NotInfiniteEnded(EndCount::One))
        );
        assert!(vertex_decomposition(&parse("F2 x F2 * Z").unwrap(), &e).is_ok());
        let ann = Annotations::parse("T.ends = inf\nU.ends = inf\nU.vertices = Sg2; Z3\n").unwrap();
        let e = Engine::new(ann.clone(), false);
        assert_eq!(
            vertex_decomposition(&parse_with("T", &ann).unwrap(), &e),
            Err(DecomposeError::Undecomposable("T".into()))
        );
        let d = vertex_decomposition(&parse_with("U * Z", &ann).unwrap(), &e).unwrap();
        let names: Vec<String> = d.vertices.iter().map(ToString::to_string).collect();
        assert_eq!(names, vec!["Sg2", "Z3", "1"]);
    }
}
