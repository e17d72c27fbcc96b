use std::fmt;

use serde::{Deserialize, Serialize};

use super::{semantic, Annotations, FiniteTable, Result};
use crate::invariants::EndCount;

/// Index of a finite edge group in a side of an amalgam.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Finite(u64),
    Inf,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Inf => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupExpr {
    Trivial,
    FiniteCyclic(u64),
    FiniteTable(FiniteTable),
    Int,
    Free(u64),
    Surface {
        genus: u64,
        orientable: bool,
    },
    DirectProduct(Vec<GroupExpr>),
    FreeProduct(Vec<GroupExpr>),
    Amalgam {
        left: Box<GroupExpr>,
        right: Box<GroupExpr>,
        edge_order: u64,
        left_index: Index,
        right_index: Index,
    },
    Hnn {
        base: Box<GroupExpr>,
        edge_order: u64,
    },
    Extension {
        kernel: Box<GroupExpr>,
        quotient: Box<GroupExpr>,
    },
    /// Some group commensurable with `base` at this index.
    FiniteIndex {
        base: Box<GroupExpr>,
        index: u64,
    },
    QuotientByFiniteNormal {
        base: Box<GroupExpr>,
        order: u64,
    },
    Graph {
        vertices: Vec<GroupExpr>,
        edges: Vec<GraphEdge>,
    },
    /// Named group whose facts come from annotations.
    Opaque(String),
}

/// What is structurally known about the order of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Exactly(u64),
    /// Finite, order not determined (possibly trivial).
    FiniteUnknown,
    Infinite,
    Unknown,
}

impl Order {
    pub fn is_finite(self) -> bool {
        matches!(self, Order::Exactly(_) | Order::FiniteUnknown)
    }

    /// Known to be a nontrivial group.
    pub fn is_nontrivial(self) -> bool {
        matches!(self, Order::Exactly(n) if n >= 2) || self == Order::Infinite
    }
}

impl GroupExpr {
    pub fn direct(a: GroupExpr, b: GroupExpr) -> Self {
        GroupExpr::DirectProduct(vec![a, b])
    }

    pub fn free_product(a: GroupExpr, b: GroupExpr) -> Self {
        GroupExpr::FreeProduct(vec![a, b])
    }

    /// `Z^n` as a flat product spine.
    pub fn int_power(n: usize) -> Self {
        match n {
            0 => GroupExpr::Trivial,
            1 => GroupExpr::Int,
            n => GroupExpr::DirectProduct(vec![GroupExpr::Int; n]),
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&GroupExpr> {
        match self {
            GroupExpr::DirectProduct(fs) | GroupExpr::FreeProduct(fs) => fs.iter().collect(),
            GroupExpr::Amalgam { left, right, .. } => vec![left, right],
            GroupExpr::Hnn { base, .. }
            | GroupExpr::FiniteIndex { base, .. }
            | GroupExpr::QuotientByFiniteNormal { base, .. } => vec![base],
            GroupExpr::Extension { kernel, quotient } => vec![kernel, quotient],
            GroupExpr::Graph { vertices, .. } => vertices.iter().collect(),
            _ => Vec::new(),
        }
    }

    /// Opaque names referenced anywhere in the tree.
    pub fn opaque_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match self {
            GroupExpr::Opaque(n) => out.push(n.clone()),
            GroupExpr::FiniteTable(t) => out.push(t.name().to_string()),
            _ => self.children().iter().for_each(|c| c.collect_names(out)),
        }
    }

    /// Structural order information; opaque groups consult annotations.
    pub fn order(&self, ann: &Annotations) -> Order {
        match self {
            GroupExpr::Trivial => Order::Exactly(1),
            GroupExpr::FiniteCyclic(n) => Order::Exactly(*n),
            GroupExpr::FiniteTable(t) => Order::Exactly(t.order() as u64),
            GroupExpr::Int | GroupExpr::Free(_) | GroupExpr::Surface { .. } => Order::Infinite,
            GroupExpr::Amalgam { .. } | GroupExpr::Hnn { .. } => Order::Infinite,
            GroupExpr::DirectProduct(fs) => {
                let orders: Vec<Order> = fs.iter().map(|f| f.order(ann)).collect();
                if orders.contains(&Order::Infinite) {
                    Order::Infinite
                } else if orders.contains(&Order::Unknown) {
                    Order::Unknown
                } else if orders.iter().all(|o| matches!(o, Order::Exactly(_))) {
                    Order::Exactly(
                        orders
                            .iter()
                            .map(|o| match o {
                                Order::Exactly(n) => *n,
                                _ => 1,
                            })
                            .fold(1u64, |a, b| a.saturating_mul(b)),
                    )
                } else {
                    Order::FiniteUnknown
                }
            }
            GroupExpr::FreeProduct(fs) => {
                let orders: Vec<Order> = fs
                    .iter()
                    .map(|f| f.order(ann))
                    .filter(|o| *o != Order::Exactly(1))
                    .collect();
                let nontrivial = orders.iter().filter(|o| o.is_nontrivial()).count();
                if nontrivial >= 2 || orders.contains(&Order::Infinite) {
                    Order::Infinite
                } else if orders.is_empty() {
                    Order::Exactly(1)
                } else if orders.len() == 1 {
                    orders[0]
                } else {
                    Order::Unknown
                }
            }
            GroupExpr::Extension { kernel, quotient } => {
                match (kernel.order(ann), quotient.order(ann)) {
                    (Order::Infinite, _) | (_, Order::Infinite) => Order::Infinite,
                    (Order::Exactly(a), Order::Exactly(b)) => Order::Exactly(a.saturating_mul(b)),
                    (a, b) if a.is_finite() && b.is_finite() => Order::FiniteUnknown,
                    _ => Order::Unknown,
                }
            }
            GroupExpr::FiniteIndex { base, index } => match base.order(ann) {
                Order::Exactly(n) if *index == 1 => Order::Exactly(n),
                o if o.is_finite() => Order::FiniteUnknown,
                o => o,
            },
            GroupExpr::QuotientByFiniteNormal { base, order } => match base.order(ann) {
                Order::Exactly(n) => Order::Exactly(n / order),
                o => o,
            },
            GroupExpr::Graph { vertices, edges } => graph_order(vertices, edges, ann),
            GroupExpr::Opaque(name) => match ann.get(name).and_then(|a| a.ends) {
                Some(EndCount::Zero) => Order::FiniteUnknown,
                Some(e) if e.is_infinite() => Order::Infinite,
                _ => Order::Unknown,
            },
        }
    }

    /// Structural validity checks that need no invariant computation.
    pub fn validate(&self, ann: &Annotations) -> Result<()> {
        for c in self.children() {
            c.validate(ann)?;
        }
        match self {
            GroupExpr::FiniteCyclic(n) if *n < 2 => semantic(format!("Z{n}: order must be at least 2")),
            GroupExpr::Free(r) if *r < 2 => semantic(format!("F{r}: rank must be at least 2 (write Z for rank 1)")),
            GroupExpr::Surface { genus, orientable } => match (genus, orientable) {
                (0, _) => semantic("surface genus must be at least 1"),
                (1, false) => semantic("Sg-1 is the projective plane, whose group is finite; use Z2"),
                _ => Ok(()),
            },
            GroupExpr::DirectProduct(fs) | GroupExpr::FreeProduct(fs) if fs.is_empty() => {
                semantic("empty product")
            }
            GroupExpr::Amalgam {
                left,
                right,
                edge_order,
                left_index,
                right_index,
            } => {
                check_side(left, *edge_order, *left_index, ann, "left")?;
                check_side(right, *edge_order, *right_index, ann, "right")
            }
            GroupExpr::Hnn { base, edge_order } => {
                if *edge_order == 0 {
                    return semantic("edge order must be at least 1");
                }
                match base.order(ann) {
                    Order::Exactly(n) if n % edge_order != 0 => semantic(format!(
                        "HNN edge order {edge_order} does not divide base order {n}"
                    )),
                    _ => Ok(()),
                }
            }
            GroupExpr::FiniteIndex { index, .. } if *index == 0 => semantic("index must be at least 1"),
            GroupExpr::QuotientByFiniteNormal { base, order } => {
                if *order == 0 {
                    return semantic("normal subgroup order must be at least 1");
                }
                match base.order(ann) {
                    Order::Exactly(n) if n % order != 0 => semantic(format!(
                        "normal subgroup order {order} does not divide {n}"
                    )),
                    _ => Ok(()),
                }
            }
            GroupExpr::Graph { vertices, edges } => validate_graph(vertices, edges, ann),
            _ => Ok(()),
        }
    }
}

fn check_side(side: &GroupExpr, edge: u64, index: Index, ann: &Annotations, which: &str) -> Result<()> {
    if edge == 0 {
        return semantic("edge order must be at least 1");
    }
    if let Index::Finite(k) = index {
        if k < 2 {
            return semantic(format!(
                "{which} index {k}: the edge group must be proper in each side"
            ));
        }
    }
    match (side.order(ann), index) {
        (Order::Exactly(n), _) if n % edge != 0 => semantic(format!(
            "edge order {edge} does not divide {which} side order {n}"
        )),
        (Order::Exactly(n), Index::Finite(k)) if n / edge != k => semantic(format!(
            "{which} index {k} disagrees with side order {n} over edge order {edge}"
        )),
        (o, Index::Inf) if o.is_finite() => {
            semantic(format!("{which} side is finite but its index is inf"))
        }
        (Order::Infinite, Index::Finite(_)) => semantic(format!(
            "{which} side is infinite, so a finite edge group has infinite index"
        )),
        _ => Ok(()),
    }
}

/// Index derived from the side when it is not given explicitly.
pub(crate) fn derive_index(side: &GroupExpr, edge: u64, ann: &Annotations) -> Result<Index> {
    match side.order(ann) {
        Order::Exactly(n) if edge > 0 && n % edge == 0 => Ok(Index::Finite(n / edge)),
        Order::Exactly(n) => semantic(format!("edge order {edge} does not divide side order {n}")),
        Order::Infinite => Ok(Index::Inf),
        _ => semantic(format!(
            "cannot derive the index of the edge group in {side}; give both indices"
        )),
    }
}

fn validate_graph(vertices: &[GroupExpr], edges: &[GraphEdge], ann: &Annotations) -> Result<()> {
    if vertices.is_empty() {
        return semantic("graph of groups needs at least one vertex");
    }
    let n = vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in edges {
        if e.u >= n || e.v >= n {
            return semantic(format!("edge ({}, {}) references a missing vertex", e.u, e.v));
        }
        if e.order == 0 {
            return semantic("edge order must be at least 1");
        }
        for &x in &[e.u, e.v] {
            if let Order::Exactly(k) = vertices[x].order(ann) {
                if k % e.order != 0 {
                    return semantic(format!(
                        "edge order {} does not divide vertex {x} order {k}",
                        e.order
                    ));
                }
            }
        }
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    if (0..n).any(|x| find(&mut parent, x) != root) {
        return semantic("graph of groups is not connected");
    }
    Ok(())
}

/// Graph after contracting degenerate edges (a non-loop edge whose group is
/// all of a finite endpoint). Returns the surviving vertex of each original
/// vertex and the remaining edges as pairs of surviving vertices.
pub(crate) fn contract_graph(
    vertices: &[GroupExpr],
    edges: &[GraphEdge],
    ann: &Annotations,
) -> (Vec<usize>, Vec<GraphEdge>) {
    let n = vertices.len();
    let orders: Vec<Order> = vertices.iter().map(|v| v.order(ann)).collect();
    let mut rep: Vec<usize> = (0..n).collect();
    let resolve = |rep: &[usize], mut x: usize| {
        while rep[x] != x {
            x = rep[x];
        }
        x
    };
    let mut remaining: Vec<bool> = vec![true; edges.len()];
    loop {
        let mut changed = false;
        for (i, e) in edges.iter().enumerate() {
            if !remaining[i] {
                continue;
            }
            let (a, b) = (resolve(&rep, e.u), resolve(&rep, e.v));
            if a == b {
                continue;
            }
            if orders[b] == Order::Exactly(e.order) {
                rep[b] = a;
            } else if orders[a] == Order::Exactly(e.order) {
                rep[a] = b;
            } else {
                continue;
            }
            remaining[i] = false;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let survivors: Vec<usize> = (0..n).map(|x| resolve(&rep, x)).collect();
    let rest = edges
        .iter()
        .zip(&remaining)
        .filter(|(_, keep)| **keep)
        .map(|(e, _)| GraphEdge {
            u: survivors[e.u],
            v: survivors[e.v],
            order: e.order,
        })
        .collect();
    (survivors, rest)
}

/// A remaining edge whose group is certainly proper in both endpoints.
pub(crate) fn edge_is_proper(e: &GraphEdge, orders: &[Order]) -> bool {
    let proper = |o: Order| match o {
        Order::Exactly(k) => k != e.order,
        Order::Infinite => true,
        _ => false,
    };
    e.u == e.v || (proper(orders[e.u]) && proper(orders[e.v]))
}

fn graph_order(vertices: &[GroupExpr], edges: &[GraphEdge], ann: &Annotations) -> Order {
    let orders: Vec<Order> = vertices.iter().map(|v| v.order(ann)).collect();
    if orders.contains(&Order::Infinite) || edges.iter().any(|e| e.u == e.v) {
        return Order::Infinite;
    }
    let (survivors, rest) = contract_graph(vertices, edges, ann);
    if rest.is_empty() {
        return orders[survivors[0]];
    }
    if rest.iter().all(|e| edge_is_proper(e, &orders)) {
        Order::Infinite
    } else {
        Order::Unknown
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct GraphPayload {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize, u64)>,
}

impl GroupExpr {
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        match self {
            GroupExpr::FreeProduct(fs) => {
                if level > 0 {
                    f.write_str("(")?;
                }
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    x.fmt_at(f, 1)?;
                }
                if level > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            GroupExpr::DirectProduct(fs) => {
                if level > 1 {
                    f.write_str("(")?;
                }
                let mut i = 0;
                while i < fs.len() {
                    let mut j = i + 1;
                    while j < fs.len() && fs[j] == fs[i] {
                        j += 1;
                    }
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    fs[i].fmt_at(f, 2)?;
                    if j - i > 1 {
                        write!(f, "^{}", j - i)?;
                    }
                    i = j;
                }
                if level > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            GroupExpr::Trivial => f.write_str("1"),
            GroupExpr::FiniteCyclic(n) => write!(f, "Z{n}"),
            GroupExpr::FiniteTable(t) => f.write_str(t.name()),
            GroupExpr::Int => f.write_str("Z"),
            GroupExpr::Free(r) => write!(f, "F{r}"),
            GroupExpr::Surface { genus, orientable } => {
                if *orientable {
                    write!(f, "Sg{genus}")
                } else {
                    write!(f, "Sg-{genus}")
                }
            }
            GroupExpr::Amalgam {
                left,
                right,
                edge_order,
                left_index,
                right_index,
            } => write!(f, "Amal({left}, {right}, {edge_order}, {left_index}, {right_index})"),
            GroupExpr::Hnn { base, edge_order } => write!(f, "HNN({base}, {edge_order})"),
            GroupExpr::Extension { kernel, quotient } => write!(f, "Ext({kernel}, {quotient})"),
            GroupExpr::FiniteIndex { base, index } => write!(f, "FI({base}, {index})"),
            GroupExpr::QuotientByFiniteNormal { base, order } => write!(f, "QFN({base}, {order})"),
            GroupExpr::Graph { vertices, edges } => {
                let payload = GraphPayload {
                    vertices: vertices.iter().map(|v| v.to_string()).collect(),
                    edges: edges.iter().map(|e| (e.u, e.v, e.order)).collect(),
                };
                let json = serde_json::to_string(&payload).map_err(|_| fmt::Error)?;
                write!(f, "Graph({json})")
            }
            GroupExpr::Opaque(name) => f.write_str(name),
        }
    }
}

/// Prints in the grammar, parenthesizing by precedence; the output parses
/// back to an expression with the same normal form.
impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
