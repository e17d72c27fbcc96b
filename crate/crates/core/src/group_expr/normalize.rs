use super::{GroupExpr, Index};

/// Canonical form: product spines flattened, trivial factors removed and
/// sorted by their printed bytes; degenerate wrappers removed. Idempotent.
pub fn normalize(e: &GroupExpr) -> GroupExpr {
    match e {
        GroupExpr::DirectProduct(fs) => spine(fs, GroupExpr::DirectProduct, |x| match x {
            GroupExpr::DirectProduct(inner) => Some(inner),
            _ => None,
        }),
        GroupExpr::FreeProduct(fs) => spine(fs, GroupExpr::FreeProduct, |x| match x {
            GroupExpr::FreeProduct(inner) => Some(inner),
            _ => None,
        }),
        GroupExpr::FiniteTable(t) if t.order() == 1 => GroupExpr::Trivial,
        GroupExpr::Amalgam {
            left,
            right,
            edge_order,
            left_index,
            right_index,
        } => {
            let (l, r) = (normalize(left), normalize(right));
            let (l, r, li, ri) = if sort_key(&r) < sort_key(&l) {
                (r, l, *right_index, *left_index)
            } else {
                (l, r, *left_index, *right_index)
            };
            amalgam(l, r, *edge_order, li, ri)
        }
        GroupExpr::Hnn { base, edge_order } => GroupExpr::Hnn {
            base: Box::new(normalize(base)),
            edge_order: *edge_order,
        },
        GroupExpr::Extension { kernel, quotient } => GroupExpr::Extension {
            kernel: Box::new(normalize(kernel)),
            quotient: Box::new(normalize(quotient)),
        },
        GroupExpr::FiniteIndex { base, index } => {
            let b = normalize(base);
            if *index == 1 {
                b
            } else {
                GroupExpr::FiniteIndex {
                    base: Box::new(b),
                    index: *index,
                }
            }
        }
        GroupExpr::QuotientByFiniteNormal { base, order } => {
            let b = normalize(base);
            if *order == 1 {
                b
            } else {
                GroupExpr::QuotientByFiniteNormal {
                    base: Box::new(b),
                    order: *order,
                }
            }
        }
        GroupExpr::Graph { vertices, edges } => {
            let vs: Vec<GroupExpr> = vertices.iter().map(normalize).collect();
            if vs.len() == 1 && edges.is_empty() {
                return vs.into_iter().next().unwrap();
            }
            let mut es = edges.clone();
            for e in &mut es {
                if e.v < e.u {
                    std::mem::swap(&mut e.u, &mut e.v);
                }
            }
            es.sort();
            GroupExpr::Graph {
                vertices: vs,
                edges: es,
            }
        }
        other => other.clone(),
    }
}

fn amalgam(l: GroupExpr, r: GroupExpr, edge_order: u64, li: Index, ri: Index) -> GroupExpr {
    GroupExpr::Amalgam {
        left: Box::new(l),
        right: Box::new(r),
        edge_order,
        left_index: li,
        right_index: ri,
    }
}

fn spine(
    factors: &[GroupExpr],
    make: fn(Vec<GroupExpr>) -> GroupExpr,
    inner: fn(&GroupExpr) -> Option<&Vec<GroupExpr>>,
) -> GroupExpr {
    let mut flat = Vec::new();
    for f in factors {
        let n = normalize(f);
        match inner(&n) {
            Some(fs) => flat.extend(fs.iter().cloned()),
            None if n == GroupExpr::Trivial => {}
            None => flat.push(n),
        }
    }
    flat.sort_by_cached_key(sort_key);
    match flat.len() {
        0 => GroupExpr::Trivial,
        1 => flat.pop().unwrap(),
        _ => make(flat),
    }
}

/// Ordering key: the printed form as bytes.
fn sort_key(e: &GroupExpr) -> Vec<u8> {
    e.to_string().into_bytes()
}
