use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{Elem, NormalFormGroup, OracleError};
use crate::invariants::EndCount;

pub const DEFAULT_BUDGET: usize = 2_000_000;
/// Minimum gap between the removed ball and the outer radius.
pub const DEFAULT_MARGIN: usize = 3;

/// Exact BFS ball in the Cayley graph.
#[derive(Clone, Debug)]
pub struct BallGraph {
    pub radius: usize,
    /// Elements in BFS order, so distances are non-decreasing.
    pub elements: Vec<Elem>,
    pub dist: Vec<u32>,
    /// `adjacency[x][g]`: index of `x * g` when it lies in the ball.
    pub adjacency: Vec<Vec<Option<u32>>>,
}

impl BallGraph {
    /// `|S(r)|` for `r = 0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &d in &self.dist {
            out[d as usize] += 1;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Ball of radius `radius` about the identity, failing once more than
/// `budget` elements are reached.
pub fn ball(g: &NormalFormGroup, radius: usize, budget: usize) -> Result<BallGraph, OracleError> {
    let gens = g.generator_count();
    let mut index: HashMap<Elem, u32> = HashMap::new();
    let mut elements = vec![g.identity()];
    let mut dist = vec![0u32];
    let mut adjacency: Vec<Vec<Option<u32>>> = Vec::new();
    index.insert(g.identity(), 0);
    let mut layer = 0..1usize;
    for r in 0..=radius {
        let neighbours: Vec<Vec<Elem>> = elements[layer.clone()]
            .par_iter()
            .map(|x| (0..gens).map(|k| g.apply(x, k)).collect())
            .collect();
        let next_start = elements.len();
        for ns in neighbours {
            let mut row = Vec::with_capacity(gens);
            for y in ns {
                let id = match index.get(&y) {
                    Some(&id) => Some(id),
                    None if r < radius => {
                        let id = elements.len() as u32;
                        index.insert(y.clone(), id);
                        elements.push(y);
                        dist.push(r as u32 + 1);
                        Some(id)
                    }
                    None => None,
                };
                row.push(id);
            }
            adjacency.push(row);
        }
        if elements.len() > budget {
            return Err(OracleError::BudgetExceeded {
                limit: budget,
                radius: r,
            });
        }
        layer = next_start..elements.len();
    }
    Ok(BallGraph {
        radius,
        elements,
        dist,
        adjacency,
    })
}

/// Components of `B(R) \ B(k)` for one value of `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub components: usize,
    /// Components meeting the sphere of radius `R`.
    pub touching: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndsEstimate {
    pub verdict: EndCount,
    pub radius: usize,
    pub ball_size: usize,
    pub sweep: Vec<SweepRow>,
}

/// Counts unbounded-candidate components of `B(R) \ B(k)` for
/// `k = 1..=k_max`. The group is exhausted below `R` gives ZERO; one touching
/// component throughout gives ONE, two gives TWO, and strictly growing counts
/// over at least three values give INF.
pub fn estimate_ends(
    g: &NormalFormGroup,
    k_max: usize,
    radius: usize,
    budget: usize,
    margin: usize,
) -> Result<EndsEstimate, OracleError> {
    if k_max == 0 || radius < k_max + margin {
        return Err(OracleError::InsufficientRadius {
            k: k_max,
            radius,
            margin,
        });
    }
    let b = ball(g, radius, budget)?;
    let sweep: Vec<SweepRow> = (1..=k_max).map(|k| sweep_row(&b, k)).collect();
    let spheres = b.sphere_sizes();
    let touching: Vec<usize> = sweep.iter().map(|r| r.touching).collect();
    let verdict = if spheres[radius] == 0 {
        EndCount::Zero
    } else if touching.iter().all(|&c| c == 1) {
        EndCount::One
    } else if touching.iter().all(|&c| c == 2) {
        EndCount::Two
    } else if touching.len() >= 3 && touching.windows(2).all(|w| w[0] < w[1]) {
        EndCount::Inf
    } else {
        EndCount::Unknown
    };
    Ok(EndsEstimate {
        verdict,
        radius,
        ball_size: b.len(),
        sweep,
    })
}

fn sweep_row(b: &BallGraph, k: usize) -> SweepRow {
    let n = b.len();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    let outside = |x: usize| b.dist[x] as usize > k;
    for x in (0..n).filter(|&x| outside(x)) {
        for y in b.adjacency[x].iter().flatten() {
            if outside(*y as usize) {
                let (rx, ry) = (find(&mut parent, x as u32), find(&mut parent, *y));
                if rx != ry {
                    parent[rx.max(ry) as usize] = rx.min(ry);
                }
            }
        }
    }
    let mut roots = std::collections::HashSet::new();
    let mut touching = std::collections::HashSet::new();
    for x in (0..n).filter(|&x| outside(x)) {
        let r = find(&mut parent, x as u32);
        roots.insert(r);
        if b.dist[x] as usize == b.radius {
            touching.insert(r);
        }
    }
    SweepRow {
        k,
        components: roots.len(),
        touching: touching.len(),
    }
}

/// Sweep table as TSV with a header line.
pub fn sweep_tsv(e: &EndsEstimate) -> String {
    let mut out = String::from("k\tcomponents\ttouching\n");
    for r in &e.sweep {
        writeln!(out, "{}\t{}\t{}", r.k, r.components, r.touching).unwrap();
    }
    out
}

/// Ball as an undirected DOT graph; edges are labelled by generator index.
pub fn ball_dot(b: &BallGraph) -> String {
    let mut out = String::from("graph ball {\n");
    for (i, d) in b.dist.iter().enumerate() {
        writeln!(out, "  n{i} [label=\"{d}\"];").unwrap();
    }
    for (x, row) in b.adjacency.iter().enumerate() {
        for (g, y) in row.iter().enumerate() {
            if let Some(y) = y {
                if x < *y as usize {
                    writeln!(out, "  n{x} -- n{y} [label=\"{g}\"];").unwrap();
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley_oracle::realize;
    use crate::group_expr::{parse, Annotations};

    fn group(s: &str) -> NormalFormGroup {
        realize(&parse(s).unwrap(), &Annotations::default()).unwrap()
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(&group("Z"), 5, DEFAULT_BUDGET).unwrap().len(), 11);
        assert_eq!(ball(&group("Z^2"), 2, DEFAULT_BUDGET).unwrap().len(), 13);
        assert_eq!(ball(&group("F2"), 3, DEFAULT_BUDGET).unwrap().len(), 53);
        assert_eq!(ball(&group("Z6"), 10, DEFAULT_BUDGET).unwrap().len(), 6);
    }

    #[test]
    fn budget() {
        assert_eq!(
            ball(&group("F2"), 10, 1000).unwrap_err(),
            OracleError::BudgetExceeded {
                limit: 1000,
                radius: 5
            }
        );
    }

    #[test]
    fn estimates() {
        let est = |s: &str, k, r| {
            estimate_ends(&group(s), k, r, DEFAULT_BUDGET, DEFAULT_MARGIN)
                .unwrap()
                .verdict
        };
        assert_eq!(est("Z", 2, 10), EndCount::Two);
        assert_eq!(est("Z^2", 3, 12), EndCount::One);
        assert_eq!(est("F2", 3, 8), EndCount::Inf);
        assert_eq!(est("Z2 * Z2", 2, 10), EndCount::Two);
        assert_eq!(est("Z6 x Z2", 3, 8), EndCount::Zero);
    }

    #[test]
    fn free_sweep_counts() {
        let e = estimate_ends(&group("F2"), 3, 8, DEFAULT_BUDGET, DEFAULT_MARGIN).unwrap();
        let c: Vec<usize> = e.sweep.iter().map(|r| r.touching).collect();
        // B(R) \ B(k) splits into |S(k + 1)| = 4 * 3^k subtrees
        assert_eq!(c, vec![12, 36, 108]);
        assert!(sweep_tsv(&e).starts_with("k\tcomponents\ttouching\n1\t12\t12\n"));
    }

    #[test]
    fn margin_enforced() {
        assert!(matches!(
            estimate_ends(&group("Z"), 3, 5, DEFAULT_BUDGET, DEFAULT_MARGIN),
            Err(OracleError::InsufficientRadius { .. })
        ));
    }

    #[test]
    fn dot_export() {
        let d = ball_dot(&ball(&group("Z"), 1, 100).unwrap());
        assert_eq!(d.matches(" -- ").count(), 2);
    }
}
