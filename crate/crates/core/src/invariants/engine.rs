use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_rational::Ratio;
use parking_lot::RwLock;
use serde::Serialize;

use super::{fact, rule, EndCount, H2Rank, InvariantError, PNumber, TriState};
use crate::group_expr::{contract_graph, edge_is_proper, normalize, Annotations, GroupExpr, Index, Order};
use crate::towers::ProType;

pub(crate) const ONE_OF_THREE: &str = "one-of-three";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub fact: String,
    pub rule: String,
    pub cite: String,
    pub premises: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub expr: String,
    pub ends: EndCount,
    pub semistable: TriState,
    #[serde(rename = "proType")]
    pub pro_type: ProType,
    #[serde(rename = "pNumber")]
    pub p_number: PNumber,
    pub h2rank: H2Rank,
    pub p3r: TriState,
    pub trace: Vec<TraceEntry>,
}

impl InvariantReport {
    pub fn ends_fact(&self) -> Option<String> {
        self.ends
            .is_known()
            .then(|| fact("ends", &self.expr, &self.ends))
    }

    pub fn semistable_fact(&self) -> Option<String> {
        self.semistable
            .is_known()
            .then(|| fact("semistable", &self.expr, &self.semistable))
    }

    pub fn pro_type_fact(&self) -> Option<String> {
        (self.pro_type != ProType::Unknown).then(|| fact("proType", &self.expr, &self.pro_type))
    }

    pub fn p_number_fact(&self) -> Option<String> {
        (self.p_number != PNumber::Unknown).then(|| fact("pNumber", &self.expr, &self.p_number))
    }

    pub fn h2rank_fact(&self) -> Option<String> {
        self.h2rank
            .is_known()
            .then(|| fact("h2rank", &self.expr, &self.h2rank))
    }

    /// Every premise names a fact established earlier in the trace.
    pub fn audit(&self) -> Result<(), String> {
        let mut seen = HashSet::new();
        for t in &self.trace {
            for p in &t.premises {
                if !seen.contains(p.as_str()) {
                    return Err(format!("{}: premise {p:?} not established", t.fact));
                }
            }
            if rule(&t.rule).cite != t.cite {
                return Err(format!("{}: citation does not match rule {}", t.fact, t.rule));
            }
            seen.insert(t.fact.as_str());
        }
        let mut fields = vec![
            self.ends_fact(),
            self.semistable_fact(),
            self.pro_type_fact(),
            self.p_number_fact(),
            self.h2rank_fact(),
        ];
        if self.p3r.is_known() {
            fields.push(Some(fact("p3r", &self.expr, &self.p3r)));
        }
        for f in fields.into_iter().flatten() {
            if !seen.contains(f.as_str()) {
                return Err(format!("{f} has no trace entry"));
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tracer {
    entries: Vec<TraceEntry>,
    seen: HashSet<String>,
}

impl Tracer {
    fn absorb(&mut self, r: &InvariantReport) {
        for t in &r.trace {
            if self.seen.insert(t.fact.clone()) {
                self.entries.push(t.clone());
            }
        }
    }

    fn emit(&mut self, fact: String, rule_id: &str, premises: Vec<String>) -> String {
        if self.seen.insert(fact.clone()) {
            self.entries.push(TraceEntry {
                fact: fact.clone(),
                rule: rule_id.to_string(),
                cite: rule(rule_id).cite.to_string(),
                premises,
            });
        }
        fact
    }

    fn order(&mut self, e: &GroupExpr, o: Order) -> Option<String> {
        match o {
            Order::Exactly(n) => Some(self.emit(fact("order", e, &n), "E-ORDER", Vec::new())),
            _ => None,
        }
    }
}

struct Node<'a> {
    e: &'a GroupExpr,
    name: String,
    ch: Vec<Arc<InvariantReport>>,
    tr: Tracer,
}

type Derived<T> = (T, &'static str, Vec<String>);

fn facts<'a>(parts: impl IntoIterator<Item = &'a Arc<InvariantReport>>, f: fn(&InvariantReport) -> Option<String>) -> Vec<String> {
    parts.into_iter().filter_map(|r| f(r)).collect()
}

/// Invariant engine over normalized expressions, memoized per expression.
pub struct Engine {
    annotations: Annotations,
    strict: bool,
    memo: RwLock<HashMap<GroupExpr, Arc<InvariantReport>>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Annotations::default(), false)
    }
}

impl Engine {
    /// `strict` disables the quarantined rules.
    pub fn new(annotations: Annotations, strict: bool) -> Self {
        Engine {
            annotations,
            strict,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn annotations(&self) -> &Annotations {
        &self.annotations
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn report(&self, e: &GroupExpr) -> Arc<InvariantReport> {
        self.report_normalized(&normalize(e))
    }

    pub(crate) fn report_normalized(&self, e: &GroupExpr) -> Arc<InvariantReport> {
        let hit = self.memo.read().get(e).cloned();
        if let Some(r) = hit {
            return r;
        }
        let r = Arc::new(self.compute(e));
        self.memo.write().entry(e.clone()).or_insert(r).clone()
    }

    pub fn ends(&self, e: &GroupExpr) -> EndCount {
        self.report(e).ends
    }

    pub fn semistable(&self, e: &GroupExpr) -> TriState {
        self.report(e).semistable
    }

    pub fn pro_type(&self, e: &GroupExpr) -> Result<ProType, InvariantError> {
        let r = self.report(e);
        if r.ends != EndCount::One {
            return Err(InvariantError::NotOneEnded(r.ends));
        }
        Ok(r.pro_type.clone())
    }

    pub fn p_number(&self, e: &GroupExpr) -> Result<PNumber, InvariantError> {
        let r = self.report(e);
        if r.ends != EndCount::One {
            return Err(InvariantError::NotOneEnded(r.ends));
        }
        if r.p3r != TriState::True {
            return Err(InvariantError::NotKnownP3R);
        }
        Ok(r.p_number)
    }

    /// Checks needing invariants: graph-of-groups vertices have at most one end.
    pub fn validate(&self, e: &GroupExpr) -> Result<(), InvariantError> {
        for c in e.children() {
            self.validate(c)?;
        }
        if let GroupExpr::Graph { vertices, .. } = e {
            for (i, v) in vertices.iter().enumerate() {
                let ends = self.ends(v);
                if matches!(ends, EndCount::Two | EndCount::Inf) {
                    return Err(InvariantError::InvalidGraph(format!(
                        "vertex {i} ({v}) has {ends} ends; vertex groups need at most one end"
                    )));
                }
            }
        }
        Ok(())
    }

    fn compute(&self, e: &GroupExpr) -> InvariantReport {
        let ch: Vec<Arc<InvariantReport>> = e
            .children()
            .into_iter()
            .map(|c| self.report_normalized(c))
            .collect();
        let mut tr = Tracer::default();
        for c in &ch {
            tr.absorb(c);
        }
        let mut n = Node {
            e,
            name: e.to_string(),
            ch,
            tr,
        };

        let (ends, r, p) = self.ends_rule(&mut n);
        if ends.is_known() {
            n.tr.emit(fact("ends", &n.name, &ends), r, p);
        }
        let (ss, r, p) = self.semistable_rule(&mut n, ends);
        if ss.is_known() {
            n.tr.emit(fact("semistable", &n.name, &ss), r, p);
        }
        let (pt, r, p) = if ends == EndCount::One {
            self.pro_type_rule(&mut n)
        } else {
            (ProType::Unknown, "", Vec::new())
        };
        if pt != ProType::Unknown {
            n.tr.emit(fact("proType", &n.name, &pt), r, p);
        }
        let (pn, r, p) = self.p_number_rule(&n, ends, ss, &pt);
        let h2 = pn.h2rank();
        if pn != PNumber::Unknown {
            let pf = n.tr.emit(fact("pNumber", &n.name, &pn), r, p);
            n.tr.emit(fact("h2rank", &n.name, &h2), "H2-PN", vec![pf]);
        }
        let (p3r, r, p) = self.p3r_rule(&mut n, ends, ss, &pt);
        if p3r.is_known() {
            n.tr.emit(fact("p3r", &n.name, &p3r), r, p);
        }
        InvariantReport {
            expr: n.name,
            ends,
            semistable: ss,
            pro_type: pt,
            p_number: pn,
            h2rank: h2,
            p3r,
            trace: n.tr.entries,
        }
    }

    fn ends_rule(&self, n: &mut Node) -> Derived<EndCount> {
        use EndCount::*;
        let ann = &self.annotations;
        match n.e {
            GroupExpr::Trivial | GroupExpr::FiniteCyclic(_) | GroupExpr::FiniteTable(_) => {
                (Zero, "E-FIN", Vec::new())
            }
            GroupExpr::Int => (Two, "E-INT", Vec::new()),
            GroupExpr::Free(_) => (Inf, "E-FREE", Vec::new()),
            GroupExpr::Surface { .. } => (One, "E-SURF", Vec::new()),
            GroupExpr::DirectProduct(_) => product_ends(&n.ch, "E-PROD"),
            GroupExpr::Extension { .. } => product_ends(&n.ch, "E-EXT"),
            GroupExpr::FreeProduct(fs) => {
                let mut premises = Vec::new();
                let mut definite = Vec::new();
                let mut maybe = 0;
                for (f, r) in fs.iter().zip(&n.ch) {
                    let o = f.order(ann);
                    if o == Order::Exactly(1) {
                        continue;
                    }
                    premises.extend(n.tr.order(f, o));
                    premises.extend(r.ends_fact());
                    if o.is_nontrivial() {
                        definite.push((o, r.ends));
                    } else {
                        maybe += 1;
                    }
                }
                let all_two = definite.iter().all(|(o, _)| *o == Order::Exactly(2));
                let v = match (maybe, definite.len()) {
                    (0, 0) => Zero,
                    (0, 1) => definite[0].1,
                    (0, 2) if all_two => Two,
                    (0, _) => Inf,
                    (_, d) if d >= 3 || (d == 2 && !all_two) => Inf,
                    _ => Unknown,
                };
                (v, "E-FREEPROD", premises)
            }
            GroupExpr::Amalgam {
                left_index,
                right_index,
                ..
            } => {
                let two = *left_index == Index::Finite(2) && *right_index == Index::Finite(2);
                (if two { Two } else { Inf }, "E-AMAL", Vec::new())
            }
            GroupExpr::Hnn { base, edge_order } => match base.order(ann) {
                Order::Exactly(k) => {
                    let f = n.tr.order(base, Order::Exactly(k)).into_iter().collect();
                    (if k == *edge_order { Two } else { Inf }, "E-HNN", f)
                }
                Order::Infinite => (Inf, "E-HNN", n.ch[0].ends_fact().into_iter().collect()),
                _ => (Unknown, "", Vec::new()),
            },
            GroupExpr::FiniteIndex { .. } => {
                (n.ch[0].ends, "R-QI1", n.ch[0].ends_fact().into_iter().collect())
            }
            GroupExpr::QuotientByFiniteNormal { .. } => {
                (n.ch[0].ends, "R-QI2", n.ch[0].ends_fact().into_iter().collect())
            }
            GroupExpr::Graph { vertices, edges } => {
                let orders: Vec<Order> = vertices.iter().map(|v| v.order(ann)).collect();
                let mut premises = facts(&n.ch, InvariantReport::ends_fact);
                for (v, o) in vertices.iter().zip(&orders) {
                    premises.extend(n.tr.order(v, *o));
                }
                let (survivors, rest) = contract_graph(vertices, edges, ann);
                if rest.is_empty() {
                    return (n.ch[survivors[0]].ends, "E-GRAPH", premises);
                }
                let mut alive: Vec<usize> = survivors.clone();
                alive.sort();
                alive.dedup();
                let exact: Option<Vec<u64>> = alive
                    .iter()
                    .map(|&v| match orders[v] {
                        Order::Exactly(k) => Some(k),
                        _ => None,
                    })
                    .collect();
                let v = if let Some(ks) = exact {
                    let chi: Ratio<i128> = ks
                        .iter()
                        .map(|&k| Ratio::new(1, k as i128))
                        .sum::<Ratio<i128>>()
                        - rest
                            .iter()
                            .map(|e| Ratio::new(1, e.order as i128))
                            .sum::<Ratio<i128>>();
                    match chi.numer().signum() {
                        1 => Zero,
                        0 => Two,
                        _ => Inf,
                    }
                } else if alive.iter().any(|&v| orders[v] == Order::Infinite)
                    && rest.iter().all(|e| edge_is_proper(e, &orders))
                {
                    Inf
                } else {
                    Unknown
                };
                (v, "E-GRAPH", premises)
            }
            GroupExpr::Opaque(name) => match ann.get(name).and_then(|a| a.ends) {
                Some(v) => (v, "ANN", Vec::new()),
                None => (Unknown, "", Vec::new()),
            },
        }
    }

    fn semistable_rule(&self, n: &mut Node, ends: EndCount) -> Derived<TriState> {
        use TriState::*;
        if matches!(ends, EndCount::Zero | EndCount::Two) {
            return (True, "S-FIN", vec![fact("ends", &n.name, &ends)]);
        }
        let unknown = (Unknown, "", Vec::new());
        match n.e {
            GroupExpr::Free(_) => (True, "S-FREE", Vec::new()),
            GroupExpr::Surface { .. } => (True, "S-SURF", Vec::new()),
            GroupExpr::DirectProduct(_) | GroupExpr::Extension { .. } => {
                let inf: Vec<&Arc<InvariantReport>> =
                    n.ch.iter().filter(|r| r.ends.is_infinite()).collect();
                let any_unknown = n.ch.iter().any(|r| !r.ends.is_known());
                if inf.len() >= 2 {
                    (True, "S-PROD", facts(inf, InvariantReport::ends_fact))
                } else if inf.len() == 1 && inf[0].semistable.is_known() {
                    let f = inf[0];
                    let mut premises = facts(&n.ch, InvariantReport::ends_fact);
                    premises.extend(f.semistable_fact());
                    match (any_unknown, f.semistable) {
                        (false, v) => (v, "S-VIRT", premises),
                        (true, True) => (True, "S-PROD", premises),
                        _ => unknown,
                    }
                } else {
                    unknown
                }
            }
            GroupExpr::FiniteIndex { .. } | GroupExpr::QuotientByFiniteNormal { .. } => {
                let c = &n.ch[0];
                (c.semistable, "S-VIRT", c.semistable_fact().into_iter().collect())
            }
            GroupExpr::Graph { vertices, edges } if self.collapses(vertices, edges).is_some() => {
                let c = &n.ch[self.collapses(vertices, edges).unwrap()];
                (c.semistable, "E-GRAPH", c.semistable_fact().into_iter().collect())
            }
            GroupExpr::FreeProduct(_)
            | GroupExpr::Amalgam { .. }
            | GroupExpr::Hnn { .. }
            | GroupExpr::Graph { .. } => {
                if self.strict || n.ch.iter().any(|c| c.semistable != True) {
                    unknown
                } else {
                    (
                        True,
                        "AXIOM-SS-GRAPH",
                        facts(&n.ch, InvariantReport::semistable_fact),
                    )
                }
            }
            GroupExpr::Opaque(name) => {
                let Some(a) = self.annotations.get(name) else {
                    return unknown;
                };
                if let Some(s) = a.semistable {
                    (s.into(), "ANN", Vec::new())
                } else if a.one_relator {
                    let f = n.tr.emit(fact("oneRelator", name, &True), "ANN", Vec::new());
                    (True, "ANN-ONE-RELATOR", vec![f])
                } else if let Some(p) = a.pro_type.as_ref().filter(|p| p.is_canonical()) {
                    let f = n.tr.emit(fact("proTypeAnnotation", name, p), "ANN", Vec::new());
                    (True, "S-PRO", vec![f])
                } else {
                    unknown
                }
            }
            _ => unknown,
        }
    }

    /// Vertex a graph of groups collapses onto when every edge is degenerate.
    fn collapses(&self, vertices: &[GroupExpr], edges: &[crate::group_expr::GraphEdge]) -> Option<usize> {
        let (survivors, rest) = contract_graph(vertices, edges, &self.annotations);
        rest.is_empty().then(|| survivors[0])
    }

    fn pro_type_rule(&self, n: &mut Node) -> Derived<ProType> {
        let unknown = (ProType::Unknown, "", Vec::new());
        let inherit = |c: &Arc<InvariantReport>, rule: &'static str| {
            (c.pro_type.clone(), rule, c.pro_type_fact().into_iter().collect())
        };
        match n.e {
            GroupExpr::Surface { .. } => {
                (ProType::ProZ, "P-SURF", vec![fact("ends", &n.name, &EndCount::One)])
            }
            GroupExpr::DirectProduct(_) => self.product_type(&n.ch, "R-QI1"),
            GroupExpr::Extension { .. } => {
                let finite_kernel = n.ch[0].ends == EndCount::Zero;
                self.product_type(&n.ch, if finite_kernel { "R-QI2" } else { "R-QI1" })
            }
            GroupExpr::FiniteIndex { .. } => inherit(&n.ch[0], "R-QI1"),
            GroupExpr::QuotientByFiniteNormal { .. } => inherit(&n.ch[0], "R-QI2"),
            GroupExpr::Graph { vertices, edges } => match self.collapses(vertices, edges) {
                Some(v) => inherit(&n.ch[v], "E-GRAPH"),
                None => unknown,
            },
            GroupExpr::Opaque(name) => match self.annotations.get(name).and_then(|a| a.pro_type.clone()) {
                Some(p) => (p, "ANN", Vec::new()),
                None => unknown,
            },
            _ => unknown,
        }
    }

    /// Pro-group type of a 1-ended product (or extension) from its factors.
    fn product_type(&self, ch: &[Arc<InvariantReport>], single_rule: &'static str) -> Derived<ProType> {
        let inf: Vec<&Arc<InvariantReport>> = ch.iter().filter(|r| r.ends.is_infinite()).collect();
        let any_unknown = ch.iter().any(|r| !r.ends.is_known());
        let mut premises = facts(ch, InvariantReport::ends_fact);
        if inf.len() == 1 {
            if any_unknown || inf[0].pro_type == ProType::Unknown {
                return (ProType::Unknown, "", Vec::new());
            }
            premises.extend(inf[0].pro_type_fact());
            return (inf[0].pro_type.clone(), single_rule, premises);
        }
        let other = ProType::Other(ONE_OF_THREE.to_string());
        if inf.len() < 2 {
            return (ProType::Unknown, "", Vec::new());
        }
        if any_unknown {
            return (other, "P-ONE-OF-THREE", premises);
        }
        let twos = inf.iter().filter(|r| r.ends == EndCount::Two).count();
        let ones: Vec<&&Arc<InvariantReport>> =
            inf.iter().filter(|r| r.ends == EndCount::One).collect();
        let infs = inf.iter().filter(|r| r.ends == EndCount::Inf).count();
        for o in &ones {
            premises.extend(o.pro_type_fact());
        }
        let sci_stack = |premises| {
            if self.strict {
                (other.clone(), "P-ONE-OF-THREE", premises)
            } else {
                (ProType::Trivial, "R-SCI-STACK", premises)
            }
        };
        match (twos, ones.len(), infs) {
            (2, 0, 0) => (ProType::ProZ, "P-Z2", premises),
            (3, 0, 0) => (ProType::Trivial, "P-Z3", premises),
            (t, 0, 0) if t >= 4 => sci_stack(premises),
            (t, 1, 0)
                if t >= 1 && matches!(ones[0].pro_type, ProType::Trivial | ProType::ProZ) =>
            {
                sci_stack(premises)
            }
            (1, 0, 1) => (ProType::TelescopicInf, "P-F2xZ", premises),
            _ => (other.clone(), "P-ONE-OF-THREE", premises),
        }
    }

    fn p_number_rule(&self, n: &Node, ends: EndCount, ss: TriState, pt: &ProType) -> Derived<PNumber> {
        let unknown = (PNumber::Unknown, "", Vec::new());
        if ends != EndCount::One {
            return unknown;
        }
        if let GroupExpr::FiniteIndex { .. } = n.e {
            let c = &n.ch[0];
            if c.p_number != PNumber::Unknown {
                return (c.p_number, "R-VNP", c.p_number_fact().into_iter().collect());
            }
        }
        if ss != TriState::True {
            return unknown;
        }
        let pn = match pt {
            ProType::Trivial => PNumber::P0,
            ProType::ProZ => PNumber::P2,
            ProType::TelescopicInf => PNumber::PInf,
            _ => return unknown,
        };
        (
            pn,
            "PN-TYPE",
            vec![
                fact("semistable", &n.name, &ss),
                fact("proType", &n.name, pt),
            ],
        )
    }

    fn p3r_rule(&self, n: &mut Node, ends: EndCount, ss: TriState, pt: &ProType) -> Derived<TriState> {
        if let GroupExpr::Opaque(name) = n.e {
            if let Some(a) = self.annotations.get(name) {
                if let Some(p) = a.p3r {
                    return (p.into(), "ANN", Vec::new());
                }
                if a.one_relator {
                    let f = n.tr.emit(fact("oneRelator", name, &TriState::True), "ANN", Vec::new());
                    return (TriState::True, "ANN-ONE-RELATOR", vec![f]);
                }
            }
        }
        let telescopic = matches!(
            pt,
            ProType::Trivial | ProType::ProZ | ProType::TelescopicInf
        ) || *pt == ProType::Other(ONE_OF_THREE.to_string());
        if ends == EndCount::One && ss == TriState::True && telescopic {
            return (
                TriState::True,
                "P3R-TEL",
                vec![
                    fact("semistable", &n.name, &ss),
                    fact("proType", &n.name, pt),
                ],
            );
        }
        (TriState::Unknown, "", Vec::new())
    }
}

fn product_ends(ch: &[Arc<InvariantReport>], rule_id: &'static str) -> Derived<EndCount> {
    let inf: Vec<&Arc<InvariantReport>> = ch.iter().filter(|r| r.ends.is_infinite()).collect();
    let any_unknown = ch.iter().any(|r| !r.ends.is_known());
    if inf.len() >= 2 {
        return (EndCount::One, rule_id, facts(inf, InvariantReport::ends_fact));
    }
    if any_unknown {
        if inf.len() == 1 && inf[0].ends == EndCount::One {
            return (EndCount::One, rule_id, facts(inf, InvariantReport::ends_fact));
        }
        return (EndCount::Unknown, "", Vec::new());
    }
    let premises = facts(ch, InvariantReport::ends_fact);
    match inf.first() {
        Some(r) => (r.ends, rule_id, premises),
        None => (EndCount::Zero, rule_id, premises),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_expr::{parse, parse_with};

    fn rep(s: &str) -> Arc<InvariantReport> {
        Engine::default().report(&parse(s).unwrap())
    }

    #[test]
    fn ends_examples() {
        assert_eq!(rep("Z2").ends, EndCount::Zero);
        assert_eq!(rep("Z x Z").ends, EndCount::One);
        assert_eq!(rep("Z2 * Z2 * Z2").ends, EndCount::Inf);
        assert_eq!(rep("Z2 * Z2").ends, EndCount::Two);
        assert_eq!(rep("Z * Z2").ends, EndCount::Inf);
        assert_eq!(rep("F2 x Z3").ends, EndCount::Inf);
        assert_eq!(rep("Amal(Z4, Z4, 2)").ends, EndCount::Two);
        assert_eq!(rep("Amal(Z4, Z6, 2)").ends, EndCount::Inf);
        assert_eq!(rep("HNN(Z2, 2)").ends, EndCount::Two);
        assert_eq!(rep("HNN(Z2, 1)").ends, EndCount::Inf);
        assert_eq!(rep("FI(Sg2, 3)").ends, EndCount::One);
        assert_eq!(rep("QFN(Z x Z6, 3)").ends, EndCount::Two);
        assert_eq!(rep("Mystery").ends, EndCount::Unknown);
        assert_eq!(rep("Mystery * Z").ends, EndCount::Unknown);
        assert_eq!(rep("Mystery x Z^2").ends, EndCount::One);
        assert_eq!(rep("Mystery x Z").ends, EndCount::Unknown);
    }

    #[test]
    fn graph_ends() {
        let g = |s: &str| rep(&format!("Graph({s})")).ends;
        // Z2 *_1 Z2 via a graph: chi = 1/2 + 1/2 - 1 = 0
        assert_eq!(g(r#"{"vertices": ["Z2", "Z2"], "edges": [[0, 1, 1]]}"#), EndCount::Two);
        assert_eq!(g(r#"{"vertices": ["Z2", "Z3"], "edges": [[0, 1, 1]]}"#), EndCount::Inf);
        // degenerate edge collapses onto the larger vertex
        assert_eq!(g(r#"{"vertices": ["Z6", "Z2"], "edges": [[0, 1, 2]]}"#), EndCount::Zero);
        assert_eq!(g(r#"{"vertices": ["Z^2", "Z2"], "edges": [[0, 1, 2]]}"#), EndCount::One);
        assert_eq!(g(r#"{"vertices": ["Z^3", "Z2"], "edges": [[0, 1, 1]]}"#), EndCount::Inf);
        assert_eq!(g(r#"{"vertices": ["Z3"], "edges": [[0, 0, 3]]}"#), EndCount::Two);
        assert_eq!(g(r#"{"vertices": ["Mystery", "Z^2"], "edges": [[0, 1, 1]]}"#), EndCount::Unknown);
    }

    #[test]
    fn semistability() {
        assert_eq!(rep("F2 x Z").semistable, TriState::True);
        assert_eq!(rep("Ext(F2, F2)").semistable, TriState::True);
        assert_eq!(rep("Mystery").semistable, TriState::Unknown);
        assert_eq!(rep("Z^3 * Z^3").semistable, TriState::True);
        let strict = Engine::new(Annotations::default(), true);
        assert_eq!(strict.semistable(&parse("Z^3 * Z^3").unwrap()), TriState::Unknown);
        assert_eq!(strict.semistable(&parse("Z2 * Z2").unwrap()), TriState::True);
        assert_eq!(strict.semistable(&parse("F3").unwrap()), TriState::True);
    }

    #[test]
    fn pro_types_and_p_numbers() {
        let cases = [
            ("Z x Z", ProType::ProZ, PNumber::P2, H2Rank::One),
            ("Z^3", ProType::Trivial, PNumber::P0, H2Rank::Zero),
            ("F2 x Z", ProType::TelescopicInf, PNumber::PInf, H2Rank::Inf),
            ("Sg2", ProType::ProZ, PNumber::P2, H2Rank::One),
            ("Sg-2", ProType::ProZ, PNumber::P2, H2Rank::One),
            ("Ext(F2, Z)", ProType::TelescopicInf, PNumber::PInf, H2Rank::Inf),
            ("FI(Z^2, 7)", ProType::ProZ, PNumber::P2, H2Rank::One),
            ("Z^2 x Z5", ProType::ProZ, PNumber::P2, H2Rank::One),
        ];
        for (s, pt, pn, h2) in cases {
            let r = rep(s);
            assert_eq!((r.pro_type.clone(), r.p_number, r.h2rank), (pt, pn, h2), "{s}");
            assert_eq!(r.p3r, TriState::True, "{s}");
        }
        let r = rep("Ext(F2, F2)");
        assert_eq!(r.pro_type, ProType::Other(ONE_OF_THREE.into()));
        assert_eq!(r.p_number, PNumber::Unknown);
        assert_eq!(rep("Z^4").pro_type, ProType::Trivial);
        let strict = Engine::new(Annotations::default(), true);
        assert_eq!(
            strict.report(&parse("Z^4").unwrap()).pro_type,
            ProType::Other(ONE_OF_THREE.into())
        );
        assert_eq!(strict.report(&parse("Z^3").unwrap()).pro_type, ProType::Trivial);
    }

    #[test]
    fn non_one_ended_has_no_pro_type() {
        let e = Engine::default();
        assert_eq!(
            e.pro_type(&parse("F2").unwrap()),
            Err(InvariantError::NotOneEnded(EndCount::Inf))
        );
        assert_eq!(
            e.p_number(&parse("Ext(F2, F2)").unwrap()),
            Ok(PNumber::Unknown)
        );
        assert_eq!(e.report(&parse("Z").unwrap()).pro_type, ProType::Unknown);
    }

    #[test]
    fn annotations_feed_facts() {
        let ann = Annotations::parse(
            "M.ends = 1\nM.proType = PRO_Z\nK.oneRelator = true\nK.ends = 1\nS.ends = 1\nS.semistable = false\n",
        )
        .unwrap();
        let e = Engine::new(ann.clone(), false);
        let m = e.report(&parse_with("M", &ann).unwrap());
        assert_eq!((m.semistable, m.p_number), (TriState::True, PNumber::P2));
        let k = e.report(&parse_with("K", &ann).unwrap());
        assert_eq!((k.semistable, k.p3r), (TriState::True, TriState::True));
        let s = e.report(&parse_with("S x Z", &ann).unwrap());
        assert_eq!(s.semistable, TriState::True);
        let s = e.report(&parse_with("S x Z3", &ann).unwrap());
        assert_eq!(s.semistable, TriState::False);
        for r in [m, k, s] {
            r.audit().unwrap();
        }
    }

    #[test]
    fn traces_are_grounded() {
        for s in [
            "Z^3",
            "F2 x Z",
            "Z2 * Z2 * Z2",
            "Z^3 * Z^3",
            "FI(Ext(F2, Z), 4)",
            "Amal(Z^2, Z4, 2)",
            "HNN(Sg2 x Z, 1)",
            r#"Graph({"vertices": ["Z^3", "Z6", "Z2"], "edges": [[0, 1, 1], [1, 2, 2]]})"#,
        ] {
            let r = rep(s);
            r.audit().unwrap_or_else(|err| panic!("{s}: {err}"));
        }
    }

    #[test]
    fn graph_vertices_validated() {
        let e = Engine::default();
        let g = parse(r#"Graph({"vertices": ["Z", "Z2"], "edges": [[0, 1, 1]]})"#).unwrap();
        assert!(matches!(e.validate(&g), Err(InvariantError::InvalidGraph(_))));
        let ok = parse(r#"Graph({"vertices": ["Z^2", "Z2"], "edges": [[0, 1, 1]]})"#).unwrap();
        assert!(e.validate(&ok).is_ok());
    }
}
