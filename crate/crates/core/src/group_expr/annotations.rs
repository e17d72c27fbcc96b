//! User-asserted facts about named groups.
//!
//! ```text
//! # comment
//! [Mystery]
//! ends = 1
//! semistable = true
//! proType = PRO_Z
//!
//! V4.elements = e a b c
//! V4.table = e a b c; a e c b; b c e a; c b a e
//! Knot.oneRelator = true
//! Tree.ends = inf
//! Tree.vertices = Z^3; Z2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{is_valid_name, parse_with, ExprError, FiniteTable, Result};
use crate::invariants::EndCount;
use crate::towers::ProType;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotationSet {
    pub ends: Option<EndCount>,
    pub semistable: Option<bool>,
    pub pro_type: Option<ProType>,
    pub one_relator: bool,
    pub cd_at_most2: bool,
    pub p3r: Option<bool>,
    /// Vertex groups of a splitting over finite groups, as expressions.
    pub vertices: Option<Vec<String>>,
    pub elements: Option<String>,
    pub table: Option<String>,
}

impl AnnotationSet {
    /// Mutual consistency of the asserted facts.
    pub fn check(&self) -> std::result::Result<(), String> {
        let ends = self.ends;
        if matches!(ends, Some(EndCount::Zero | EndCount::Two)) && self.semistable == Some(false) {
            return Err("finite and two-ended groups are semistable".into());
        }
        if let Some(p) = &self.pro_type {
            if ends.is_some_and(|e| e != EndCount::One) {
                return Err("proType applies only to one-ended groups".into());
            }
            if p.is_canonical() && self.semistable == Some(false) {
                return Err(format!("proType {p} is pro-epimorphic, so the group is semistable"));
            }
        }
        if self.one_relator {
            if self.semistable == Some(false) {
                return Err("one-relator groups are semistable".into());
            }
            if self.p3r == Some(false) {
                return Err("one-relator groups are properly 3-realizable".into());
            }
        }
        if self.cd_at_most2 && self.pro_type == Some(ProType::Trivial) {
            return Err("cdAtMost2 forces a boundary number of at least 2, excluding TRIVIAL".into());
        }
        if self.vertices.is_some() && ends != Some(EndCount::Inf) {
            return Err("vertices requires ends = inf".into());
        }
        if self.elements.is_some() != self.table.is_some() {
            return Err("finite tables need both elements and table".into());
        }
        if self.table.is_some() {
            let only_table = AnnotationSet {
                ends: self.ends.filter(|e| *e == EndCount::Zero),
                elements: self.elements.clone(),
                table: self.table.clone(),
                ..Default::default()
            };
            if *self != only_table {
                return Err("a finite table admits no other facts besides ends = 0".into());
            }
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let flag = |v: &str| match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(format!("expected true or false, got {v:?}")),
        };
        match key {
            "ends" => {
                self.ends = Some(
                    EndCount::parse(value)
                        .filter(|e| e.is_known())
                        .ok_or_else(|| format!("ends must be 0, 1, 2 or inf, got {value:?}"))?,
                )
            }
            "semistable" => self.semistable = Some(flag(value)?),
            "proType" => {
                self.pro_type = Some(
                    ProType::parse(value).ok_or_else(|| format!("unknown proType {value:?}"))?,
                )
            }
            "oneRelator" => self.one_relator = flag(value)?,
            "cdAtMost2" => self.cd_at_most2 = flag(value)?,
            "p3r" => self.p3r = Some(flag(value)?),
            "vertices" => {
                let vs: Vec<String> = value
                    .split(';')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(str::to_string)
                    .collect();
                if vs.is_empty() {
                    return Err("vertices needs at least one expression".into());
                }
                self.vertices = Some(vs);
            }
            "elements" => self.elements = Some(value.to_string()),
            "table" => self.table = Some(value.to_string()),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    fn write_to(&self, name: &str, out: &mut String) {
        let mut line = |k: &str, v: String| writeln!(out, "{name}.{k} = {v}").unwrap();
        if let Some(e) = self.ends {
            line("ends", e.to_string());
        }
        if let Some(s) = self.semistable {
            line("semistable", s.to_string());
        }
        if let Some(p) = &self.pro_type {
            line("proType", p.to_string());
        }
        if self.one_relator {
            line("oneRelator", "true".into());
        }
        if self.cd_at_most2 {
            line("cdAtMost2", "true".into());
        }
        if let Some(p) = self.p3r {
            line("p3r", p.to_string());
        }
        if let Some(vs) = &self.vertices {
            line("vertices", vs.join("; "));
        }
        if let Some(e) = &self.elements {
            line("elements", e.clone());
        }
        if let Some(t) = &self.table {
            line("table", t.clone());
        }
    }
}

/// Registry of annotation sets by group name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotations {
    groups: BTreeMap<String, AnnotationSet>,
    tables: BTreeMap<String, FiniteTable>,
}

impl Annotations {
    pub fn parse(text: &str) -> Result<Self> {
        let mut groups: BTreeMap<String, (usize, AnnotationSet)> = BTreeMap::new();
        let mut section: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let fail = |message: String| ExprError::Annotation {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| fail("unterminated section header".into()))?
                    .trim();
                section = Some(name.to_string());
                continue;
            }
            let (lhs, value) = line
                .split_once('=')
                .ok_or_else(|| fail("expected key = value".into()))?;
            let (lhs, value) = (lhs.trim(), value.trim());
            let (name, key) = match lhs.split_once('.') {
                Some((name, key)) => (name.trim().to_string(), key.trim()),
                None => (
                    section
                        .clone()
                        .ok_or_else(|| fail(format!("{lhs:?} outside a [group] section")))?,
                    lhs,
                ),
            };
            if !is_valid_name(&name) {
                return Err(fail(format!("{name:?} is not a usable group name")));
            }
            let entry = groups.entry(name).or_insert((line_no, AnnotationSet::default()));
            entry.1.set(key, value).map_err(fail)?;
        }
        let mut out = Annotations::default();
        for (name, (line, set)) in groups {
            out.insert(&name, set).map_err(|e| match e {
                ExprError::Semantic(message) => ExprError::Annotation { line, message },
                other => other,
            })?;
        }
        out.check_vertices()?;
        Ok(out)
    }

    /// Adds or replaces the facts about `name`.
    pub fn insert(&mut self, name: &str, set: AnnotationSet) -> Result<()> {
        if !is_valid_name(name) {
            return Err(ExprError::Semantic(format!("{name:?} is not a usable group name")));
        }
        set.check()
            .map_err(|m| ExprError::Semantic(format!("{name}: {m}")))?;
        if let (Some(e), Some(t)) = (&set.elements, &set.table) {
            self.tables
                .insert(name.to_string(), FiniteTable::from_text(name, e, t)?);
        } else {
            self.tables.remove(name);
        }
        self.groups.insert(name.to_string(), set);
        Ok(())
    }

    fn check_vertices(&self) -> Result<()> {
        for (name, set) in &self.groups {
            for v in set.vertices.iter().flatten() {
                let e = parse_with(v, self).map_err(|e| {
                    ExprError::Semantic(format!("{name}: vertex {v:?}: {e}"))
                })?;
                if e.opaque_names().contains(name) {
                    return Err(ExprError::Semantic(format!(
                        "{name}: vertex {v:?} refers back to {name}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&AnnotationSet> {
        self.groups.get(name)
    }

    pub fn table(&self, name: &str) -> Option<&FiniteTable> {
        self.tables.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Canonical text form; equal registries print identically.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, set) in &self.groups {
            set.write_to(name, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_expr::{parse_with, GroupExpr};

    const SAMPLE: &str = "\
# sample
[Mystery]
ends = 1
semistable = true
proType = PRO_Z

V4.elements = e a b c
V4.table = e a b c; a e c b; b c e a; c b a e
Knot.oneRelator = true
Tree.ends = inf
Tree.vertices = Z^3; Z2
";

    #[test]
    fn parses_sections_and_dotted_keys() {
        let ann = Annotations::parse(SAMPLE).unwrap();
        let m = ann.get("Mystery").unwrap();
        assert_eq!(m.ends, Some(EndCount::One));
        assert_eq!(m.pro_type, Some(ProType::ProZ));
        assert!(ann.get("Knot").unwrap().one_relator);
        assert_eq!(ann.table("V4").unwrap().order(), 4);
        assert_eq!(
            ann.get("Tree").unwrap().vertices.as_deref(),
            Some(&["Z^3".to_string(), "Z2".to_string()][..])
        );
        assert!(matches!(parse_with("V4 * Z", &ann).unwrap(),
            GroupExpr::FreeProduct(fs) if matches!(fs[0], GroupExpr::FiniteTable(_))));
        assert_eq!(Annotations::parse(&ann.to_text()).unwrap(), ann);
    }

    #[test]
    fn inconsistent_sets_rejected() {
        for bad in [
            "G.ends = 2\nG.semistable = false",
            "G.ends = inf\nG.proType = PRO_Z",
            "G.proType = TRIVIAL\nG.semistable = false",
            "G.oneRelator = true\nG.semistable = false",
            "G.oneRelator = true\nG.p3r = false",
            "G.cdAtMost2 = true\nG.proType = TRIVIAL",
            "G.vertices = Z2",
            "G.elements = e a",
            "G.ends = 3",
            "G.colour = red",
            "Z3.ends = 0",
            "G.ends = inf\nG.vertices = G * Z",
        ] {
            assert!(Annotations::parse(bad).is_err(), "{bad:?} should be rejected");
        }
    }
}
