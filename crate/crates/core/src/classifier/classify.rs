use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;
use serde::Serialize;

use super::{ClassLabel, DerivationStep, Separator, Verdict, VerdictKind};
use crate::group_expr::{normalize, parse_with, split_step, vertex_decomposition, GroupExpr, Order};
use crate::invariants::{fact, rule, EndCount, Engine, InvariantReport, TriState};
use crate::towers::ProType;

const ONE_OF_THREE: &str = "one-of-three";

/// A class label with the derivation that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub expr: String,
    pub label: ClassLabel,
    pub derivation: Vec<DerivationStep>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
}

#[derive(Default)]
struct Deriv {
    steps: Vec<DerivationStep>,
    seen: HashSet<String>,
    reasons: Vec<String>,
}

impl Deriv {
    fn absorb(&mut self, c: &Classification) {
        for s in &c.derivation {
            if self.seen.insert(s.conclusion.clone()) {
                self.steps.push(s.clone());
            }
        }
        for r in &c.reasons {
            if !self.reasons.contains(r) {
                self.reasons.push(r.clone());
            }
        }
    }

    fn step(&mut self, rule_id: &str, subject: &str, conclusion: String, premises: Vec<String>) {
        if self.seen.insert(conclusion.clone()) {
            self.steps.push(DerivationStep {
                rule: rule_id.to_string(),
                cite: rule(rule_id).cite.to_string(),
                subject: subject.to_string(),
                conclusion,
                premises,
            });
        }
    }

    fn reason(&mut self, r: String) {
        if !self.reasons.contains(&r) {
            self.reasons.push(r);
        }
    }
}

type Outcome = (ClassLabel, &'static str, Vec<String>);

/// Rule-based classifier, memoized per normalized expression.
pub struct Classifier {
    engine: Engine,
    memo: RwLock<HashMap<GroupExpr, Arc<Classification>>>,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier::new(Engine::default())
    }
}

impl Classifier {
    pub fn new(engine: Engine) -> Self {
        Classifier {
            engine,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn classify(&self, e: &GroupExpr) -> Arc<Classification> {
        self.classify_normalized(&normalize(e))
    }

    pub fn classify_batch(&self, es: &[GroupExpr]) -> Vec<Arc<Classification>> {
        es.par_iter().map(|e| self.classify(e)).collect()
    }

    fn classify_normalized(&self, e: &GroupExpr) -> Arc<Classification> {
        let hit = self.memo.read().get(e).cloned();
        if let Some(c) = hit {
            return c;
        }
        let c = Arc::new(self.compute(e));
        self.memo.write().entry(e.clone()).or_insert(c).clone()
    }

    fn compute(&self, e: &GroupExpr) -> Classification {
        let r = self.engine.report_normalized(e);
        let name = r.expr.clone();
        let mut d = Deriv::default();
        let ends_fact = fact("ends", &name, &r.ends);
        let (label, rule_id, mut premises) = match r.ends {
            EndCount::Zero => (ClassLabel::Fin, "R-FIN", Vec::new()),
            EndCount::Two => (ClassLabel::Z, "R-2E", Vec::new()),
            EndCount::One => self.one_ended(e, &r, &mut d),
            EndCount::Inf => self.infinite(e, &mut d),
            EndCount::Unknown => {
                d.reason(format!("ends({name}) is undetermined"));
                for n in e.opaque_names() {
                    if self.engine.annotations().get(&n).is_none() {
                        d.reason(format!("{n} has no annotations"));
                    }
                }
                (ClassLabel::Unknown, "", Vec::new())
            }
        };
        if label != ClassLabel::Unknown {
            if r.ends.is_known() {
                premises.insert(0, ends_fact);
            }
            d.step(rule_id, &name, fact("class", &name, &label), premises);
        }
        Classification {
            expr: name,
            label,
            derivation: d.steps,
            reasons: d.reasons,
        }
    }

    /// Inherits the class of `child` through `rule_id`.
    fn inherit(&self, child: &GroupExpr, rule_id: &'static str, d: &mut Deriv) -> Outcome {
        let c = self.classify_normalized(child);
        d.absorb(&c);
        let premises = vec![fact("class", &c.expr, &c.label)];
        (c.label.clone(), rule_id, premises)
    }

    fn one_ended(&self, e: &GroupExpr, r: &InvariantReport, d: &mut Deriv) -> Outcome {
        match e {
            GroupExpr::FiniteIndex { base, .. } => return self.inherit(base, "R-QI1", d),
            GroupExpr::QuotientByFiniteNormal { base, .. } => return self.inherit(base, "R-QI2", d),
            GroupExpr::Extension { kernel, quotient } => {
                let (ek, eq) = (self.engine.ends(kernel), self.engine.ends(quotient));
                if ek == EndCount::Zero {
                    return self.inherit(quotient, "R-QI2", d);
                }
                if eq == EndCount::Zero {
                    return self.inherit(kernel, "R-QI1", d);
                }
                if ek.is_infinite() && eq.is_infinite() {
                    let prod = normalize(&GroupExpr::DirectProduct(vec![
                        (**kernel).clone(),
                        (**quotient).clone(),
                    ]));
                    let (label, _, mut premises) = self.inherit(&prod, "R-EXT", d);
                    premises.push(fact("ends", &**kernel, &ek));
                    premises.push(fact("ends", &**quotient, &eq));
                    return (label, "R-EXT", premises);
                }
            }
            GroupExpr::DirectProduct(fs) => {
                if let Some(out) = self.by_representatives(e, fs, d) {
                    return out;
                }
            }
            _ => {}
        }
        self.by_pro_type(r, d)
    }

    /// Product of class representatives when every factor class has one.
    fn by_representatives(&self, e: &GroupExpr, fs: &[GroupExpr], d: &mut Deriv) -> Option<Outcome> {
        let mut reps = Vec::new();
        let mut premises = Vec::new();
        let mut classes = Vec::new();
        for f in fs {
            let c = self.classify_normalized(f);
            let rep: Vec<GroupExpr> = match &c.label {
                ClassLabel::Fin => Vec::new(),
                ClassLabel::Z => vec![GroupExpr::Int],
                ClassLabel::Z2 => vec![GroupExpr::Int; 2],
                ClassLabel::Z3 => vec![GroupExpr::Int; 3],
                ClassLabel::F2xZ => vec![GroupExpr::Free(2), GroupExpr::Int],
                ClassLabel::Inf(s) if s.is_empty() => vec![GroupExpr::Free(2)],
                _ => return None,
            };
            premises.push(fact("class", &c.expr, &c.label));
            reps.extend(rep);
            classes.push(c);
        }
        let rep = normalize(&GroupExpr::DirectProduct(reps));
        if rep == *e {
            return None;
        }
        for c in &classes {
            d.absorb(c);
        }
        let c = self.classify_normalized(&rep);
        d.absorb(&c);
        premises.push(fact("class", &c.expr, &c.label));
        Some((c.label.clone(), "R-PROD", premises))
    }

    /// 1-ended label from semistability and the pro-group type.
    fn by_pro_type(&self, r: &InvariantReport, d: &mut Deriv) -> Outcome {
        let premises: Vec<String> = [r.semistable_fact(), r.pro_type_fact()]
            .into_iter()
            .flatten()
            .collect();
        let open = |tag: String| ClassLabel::OneOther { tag, pinned: false };
        let label = match (r.semistable, &r.pro_type) {
            (TriState::True, ProType::Trivial) => ClassLabel::Z3,
            (TriState::True, ProType::ProZ) => ClassLabel::Z2,
            (TriState::True, ProType::TelescopicInf) => ClassLabel::F2xZ,
            (TriState::True, p @ ProType::StableFree(_)) => ClassLabel::OneOther {
                tag: p.to_string(),
                pinned: true,
            },
            (TriState::True, ProType::Other(t)) if t != ONE_OF_THREE => ClassLabel::OneOther {
                tag: t.clone(),
                pinned: true,
            },
            (TriState::False, _) => open("not-semistable".into()),
            (_, ProType::Other(t)) => open(t.clone()),
            (_, ProType::Unknown) => open("undetermined".into()),
            (_, p) => open(p.to_string()),
        };
        if !label.is_determined() {
            d.reason(format!(
                "{} is 1-ended but its class is not pinned ({label})",
                r.expr
            ));
        }
        (label, "R-PRO", premises)
    }

    fn infinite(&self, e: &GroupExpr, d: &mut Deriv) -> Outcome {
        let name = e.to_string();
        let dec = match vertex_decomposition(e, &self.engine) {
            Ok(dec) => dec,
            Err(err) => {
                d.reason(format!("{name}: {err}"));
                return (ClassLabel::Unknown, "", Vec::new());
            }
        };
        let mut graph_premises = Vec::new();
        for s in &dec.steps {
            if s.rule == "R-2E" {
                let conclusion = fact("class", &s.subject, &ClassLabel::Z);
                d.step("R-2E", &s.subject, conclusion, vec![fact("ends", &s.subject, &EndCount::Two)]);
            } else {
                let conclusion = pieces_fact(&s.subject, &s.pieces);
                d.step(s.rule, &s.subject, conclusion.clone(), vec![fact("ends", &s.subject, &EndCount::Inf)]);
                graph_premises.push(conclusion);
            }
        }
        let mut all = BTreeSet::new();
        for v in &dec.vertices {
            let c = self.classify_normalized(v);
            d.absorb(&c);
            if c.label == ClassLabel::Unknown {
                d.reason(format!("vertex group {} is unclassified", c.expr));
                return (ClassLabel::Unknown, "", Vec::new());
            }
            let f = fact("class", &c.expr, &c.label);
            if !graph_premises.contains(&f) {
                graph_premises.push(f);
            }
            all.insert(c.label.clone());
        }
        let classes_fact = fact("vertexClasses", &name, &set_text(&all));
        d.step("R-GRAPH", &name, classes_fact.clone(), graph_premises);
        let kept: BTreeSet<ClassLabel> = all.iter().filter(|l| !l.merges_away()).cloned().collect();
        let rule_id = if kept.len() < all.len() { "R-MERGE" } else { "R-GRAPH" };
        (ClassLabel::Inf(kept), rule_id, vec![classes_fact])
    }

    pub fn compare(&self, a: &GroupExpr, b: &GroupExpr) -> Verdict {
        let (a, b) = (normalize(a), normalize(b));
        let (ca, cb) = (self.classify_normalized(&a), self.classify_normalized(&b));
        let (ra, rb) = (self.engine.report_normalized(&a), self.engine.report_normalized(&b));
        let mut d = Deriv::default();
        d.absorb(&ca);
        d.absorb(&cb);
        let mut v = Verdict {
            verdict: VerdictKind::Unknown,
            expr_a: ca.expr.clone(),
            expr_b: cb.expr.clone(),
            label_a: ca.label.clone(),
            label_b: cb.label.clone(),
            separator: None,
            derivation: Vec::new(),
            reasons: Vec::new(),
        };
        if ca.label == cb.label && ca.label.is_determined() {
            v.verdict = VerdictKind::Equivalent;
            v.derivation = d.steps;
            return v;
        }
        if let Some((inv, va, vb)) = separator(&ra, &rb) {
            let (fa, fb) = (fact(inv, &ra.expr, &va), fact(inv, &rb.expr, &vb));
            let subject = format!("{} ; {}", ra.expr, rb.expr);
            d.step("R-SEP", &subject, format!("{fa} differs from {fb}"), vec![fa, fb]);
            v.verdict = VerdictKind::Inequivalent;
            v.separator = Some(Separator {
                invariant: inv.to_string(),
                a: va,
                b: vb,
            });
            v.derivation = d.steps;
            return v;
        }
        if ca.label.is_determined() && cb.label.is_determined() {
            d.reason(format!(
                "labels {} and {} differ but no invariant separates them",
                ca.label, cb.label
            ));
        }
        v.reasons = d.reasons;
        v.derivation = d.steps;
        v
    }

    /// Re-checks every step: premises are earlier conclusions or facts that
    /// hold now, and each conclusion re-derives.
    pub fn replay(&self, steps: &[DerivationStep]) -> Result<(), String> {
        let mut established: HashSet<&str> = HashSet::new();
        for s in steps {
            if rule(&s.rule).cite != s.cite {
                return Err(format!("{}: citation does not match {}", s.conclusion, s.rule));
            }
            for p in &s.premises {
                if !established.contains(p.as_str()) {
                    self.check_fact(p)
                        .map_err(|e| format!("{}: premise {p}: {e}", s.conclusion))?;
                }
            }
            if s.rule == "R-SEP" {
                let [fa, fb] = s.premises.as_slice() else {
                    return Err(format!("{}: a separation needs two facts", s.conclusion));
                };
                let (pa, _, va) = split_fact(fa)?;
                let (pb, _, vb) = split_fact(fb)?;
                if pa != pb || va == vb {
                    return Err(format!("{}: facts do not separate", s.conclusion));
                }
            } else {
                self.check_fact(&s.conclusion)?;
            }
            established.insert(&s.conclusion);
        }
        Ok(())
    }

    fn check_fact(&self, text: &str) -> Result<(), String> {
        let (prop, subject, value) = split_fact(text)?;
        let ann = self.engine.annotations();
        let e = normalize(&parse_with(subject, ann).map_err(|e| format!("{subject}: {e}"))?);
        let actual = match prop {
            "class" => self.classify_normalized(&e).label.to_string(),
            "ends" | "semistable" | "proType" | "pNumber" | "h2rank" | "p3r" => {
                let r = self.engine.report_normalized(&e);
                match prop {
                    "ends" => r.ends.to_string(),
                    "semistable" => r.semistable.to_string(),
                    "proType" => r.pro_type.to_string(),
                    "pNumber" => r.p_number.to_string(),
                    "h2rank" => r.h2rank.to_string(),
                    _ => r.p3r.to_string(),
                }
            }
            "order" => match e.order(ann) {
                Order::Exactly(n) => n.to_string(),
                _ => "unknown".into(),
            },
            "pieces" => {
                let (_, pieces) = split_step(&e, &self.engine).map_err(|e| e.to_string())?;
                let pieces: Vec<String> = pieces.iter().map(ToString::to_string).collect();
                pieces.join("; ")
            }
            "vertexClasses" => {
                let dec = vertex_decomposition(&e, &self.engine).map_err(|e| e.to_string())?;
                let set: BTreeSet<ClassLabel> = dec
                    .vertices
                    .iter()
                    .map(|v| self.classify_normalized(v).label.clone())
                    .collect();
                set_text(&set)
            }
            other => return Err(format!("unknown property {other:?}")),
        };
        if actual == value {
            Ok(())
        } else {
            Err(format!("{prop}({subject}) is {actual}, not {value}"))
        }
    }
}

/// First determined invariant of the relation on which the reports differ.
fn separator(a: &InvariantReport, b: &InvariantReport) -> Option<(&'static str, String, String)> {
    if a.ends.is_known() && b.ends.is_known() && a.ends != b.ends {
        return Some(("ends", a.ends.to_string(), b.ends.to_string()));
    }
    if a.semistable.is_known() && b.semistable.is_known() && a.semistable != b.semistable {
        return Some(("semistable", a.semistable.to_string(), b.semistable.to_string()));
    }
    let pinned = |r: &InvariantReport| {
        r.ends == EndCount::One && r.semistable == TriState::True && r.pro_type.is_canonical()
    };
    if pinned(a) && pinned(b) && a.pro_type != b.pro_type {
        return Some(("proType", a.pro_type.to_string(), b.pro_type.to_string()));
    }
    if a.h2rank.is_known() && b.h2rank.is_known() && a.h2rank != b.h2rank {
        return Some(("h2rank", a.h2rank.to_string(), b.h2rank.to_string()));
    }
    None
}

fn pieces_fact(subject: &str, pieces: &[String]) -> String {
    format!("pieces({subject}) = {}", pieces.join("; "))
}

fn set_text(s: &BTreeSet<ClassLabel>) -> String {
    let parts: Vec<String> = s.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Splits `prop(subject) = value`.
fn split_fact(text: &str) -> Result<(&str, &str, &str), String> {
    let open = text.find('(').ok_or_else(|| format!("malformed fact {text:?}"))?;
    let close = text.rfind(") = ").ok_or_else(|| format!("malformed fact {text:?}"))?;
    if close < open {
        return Err(format!("malformed fact {text:?}"));
    }
    Ok((&text[..open], &text[open + 1..close], &text[close + 4..]))
}
