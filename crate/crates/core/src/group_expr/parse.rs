use super::expr::{derive_index, GraphPayload};
use super::{semantic, Annotations, ExprError, GraphEdge, GroupExpr, Index, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Int(u64),
    Star,
    Cross,
    Caret,
    LParen,
    RParen,
    Comma,
    Minus,
    Payload(String),
}

const KEYWORDS: [&str; 6] = ["Amal", "HNN", "Ext", "FI", "QFN", "Graph"];

/// Word that names a built-in atom on its own (`Z`, `Z3`, `F2`, `Sg2`).
fn is_builtin_word(w: &str) -> bool {
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    w == "Z"
        || w.strip_prefix('Z').is_some_and(digits)
        || w.strip_prefix('F').is_some_and(digits)
        || w.strip_prefix("Sg").is_some_and(digits)
}

/// Whether `name` can be used for an opaque group or finite table.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let first_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    first_ok
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "x"
        && name != "Sg"
        && name != "inf"
        && !is_builtin_word(name)
        && !KEYWORDS.contains(&name)
        && !splits_on_cross(name)
}

fn splits_on_cross(word: &str) -> bool {
    word.contains('x') && word.split('x').all(|p| is_builtin_word(p) || p == "1")
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = src[i..].chars().next().unwrap();
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '*' => out.push((i, Tok::Star)),
            '^' => out.push((i, Tok::Caret)),
            '(' => out.push((i, Tok::LParen)),
            ')' => out.push((i, Tok::RParen)),
            ',' => out.push((i, Tok::Comma)),
            '-' => out.push((i, Tok::Minus)),
            '×' => {
                out.push((i, Tok::Cross));
                i += c.len_utf8();
                continue;
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i].parse().map_err(|_| ExprError::Syntax {
                    position: start,
                    expected: "an integer that fits in 64 bits".into(),
                })?;
                out.push((start, Tok::Int(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &src[start..i];
                if word == "x" {
                    out.push((start, Tok::Cross));
                } else if splits_on_cross(word) {
                    let mut pos = start;
                    for (k, piece) in word.split('x').enumerate() {
                        if k > 0 {
                            out.push((pos, Tok::Cross));
                            pos += 1;
                        }
                        if piece == "1" {
                            out.push((pos, Tok::Int(1)));
                        } else {
                            out.push((pos, Tok::Word(piece.to_string())));
                        }
                        pos += piece.len();
                    }
                } else {
                    out.push((start, Tok::Word(word.to_string())));
                    if word == "Graph" {
                        i = lex_payload(src, i, &mut out)?;
                    }
                }
                continue;
            }
            other if !other.is_ascii() => {
                return Err(ExprError::Syntax {
                    position: i,
                    expected: format!("a group expression, found {other:?}"),
                })
            }
            other => {
                return Err(ExprError::Syntax {
                    position: i,
                    expected: format!("a group expression, found {other:?}"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Captures the raw JSON between `Graph(` and its matching `)`.
fn lex_payload(src: &str, mut i: usize, out: &mut Vec<(usize, Tok)>) -> Result<usize> {
    let bytes = src.as_bytes();
    while i < bytes.len() && (bytes[i] as char).is_whitespace() {
        i += 1;
    }
    if i >= bytes.len() || bytes[i] != b'(' {
        return Err(ExprError::Syntax {
            position: i,
            expected: "'(' after Graph".into(),
        });
    }
    out.push((i, Tok::LParen));
    let start = i + 1;
    let mut depth = 0i32;
    let mut in_string = false;
    let mut escaped = false;
    let mut j = start;
    while j < bytes.len() {
        let b = bytes[j];
        if in_string {
            match (escaped, b) {
                (true, _) => escaped = false,
                (false, b'\\') => escaped = true,
                (false, b'"') => in_string = false,
                _ => {}
            }
        } else {
            match b {
                b'"' => in_string = true,
                b'{' | b'[' | b'(' => depth += 1,
                b'}' | b']' => depth -= 1,
                b')' if depth == 0 => {
                    out.push((start, Tok::Payload(src[start..j].to_string())));
                    out.push((j, Tok::RParen));
                    return Ok(j + 1);
                }
                b')' => depth -= 1,
                _ => {}
            }
        }
        j += 1;
    }
    Err(ExprError::Syntax {
        position: src.len(),
        expected: "')' closing the Graph payload".into(),
    })
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ann: &'a Annotations,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn fail<T>(&self, expected: &str) -> Result<T> {
        Err(ExprError::Syntax {
            position: self.position(),
            expected: expected.to_string(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn int(&mut self, what: &str) -> Result<u64> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.fail(what),
        }
    }

    fn expr(&mut self) -> Result<GroupExpr> {
        let mut items = vec![self.prod()?];
        while self.eat(&Tok::Star) {
            items.push(self.prod()?);
        }
        Ok(right_nest(items, GroupExpr::FreeProduct))
    }

    fn prod(&mut self) -> Result<GroupExpr> {
        let mut items = vec![self.power()?];
        while self.eat(&Tok::Cross) {
            items.push(self.power()?);
        }
        Ok(right_nest(items, GroupExpr::DirectProduct))
    }

    fn power(&mut self) -> Result<GroupExpr> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        match self.int("an exponent")? {
            0 => semantic("exponent must be at least 1"),
            k => Ok(right_nest(vec![base; k as usize], GroupExpr::DirectProduct)),
        }
    }

    fn atom(&mut self) -> Result<GroupExpr> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.fail("a group"),
        };
        self.pos += 1;
        match tok {
            Tok::Int(1) => Ok(GroupExpr::Trivial),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Word(w) => self.word(&w),
            _ => {
                self.pos -= 1;
                self.fail("a group")
            }
        }
    }

    fn word(&mut self, w: &str) -> Result<GroupExpr> {
        if KEYWORDS.contains(&w) && self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let e = self.constructor(w)?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(e);
        }
        let digits = |s: &str| s.parse::<u64>().ok();
        if w == "Z" {
            if let Some(Tok::Int(n)) = self.peek() {
                let n = *n;
                self.pos += 1;
                return cyclic(n);
            }
            return Ok(GroupExpr::Int);
        }
        if let Some(n) = w.strip_prefix('Z').and_then(digits) {
            return cyclic(n);
        }
        if let Some(r) = w.strip_prefix('F').and_then(digits) {
            return free(r);
        }
        if w == "F" {
            if let Some(Tok::Int(_)) = self.peek() {
                let r = self.int("a rank")?;
                return free(r);
            }
        }
        if let Some(g) = w.strip_prefix("Sg").and_then(digits) {
            return surface(g, true);
        }
        if w == "Sg" {
            let orientable = !self.eat(&Tok::Minus);
            let g = self.int("a surface genus")?;
            return surface(g, orientable);
        }
        if !is_valid_name(w) {
            self.pos -= 1;
            return self.fail("a group");
        }
        Ok(match self.ann.table(w) {
            Some(t) => GroupExpr::FiniteTable(t.clone()),
            None => GroupExpr::Opaque(w.to_string()),
        })
    }

    fn constructor(&mut self, kw: &str) -> Result<GroupExpr> {
        match kw {
            "Amal" => {
                let left = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let right = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let edge_order = self.int("an edge order")?;
                let (left_index, right_index) = if self.eat(&Tok::Comma) {
                    let l = self.index()?;
                    self.expect(Tok::Comma, "','")?;
                    (l, self.index()?)
                } else {
                    (
                        derive_index(&left, edge_order, self.ann)?,
                        derive_index(&right, edge_order, self.ann)?,
                    )
                };
                Ok(GroupExpr::Amalgam {
                    left: Box::new(left),
                    right: Box::new(right),
                    edge_order,
                    left_index,
                    right_index,
                })
            }
            "HNN" => {
                let base = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let edge_order = self.int("an edge order")?;
                Ok(GroupExpr::Hnn {
                    base: Box::new(base),
                    edge_order,
                })
            }
            "Ext" => {
                let kernel = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let quotient = self.expr()?;
                Ok(GroupExpr::Extension {
                    kernel: Box::new(kernel),
                    quotient: Box::new(quotient),
                })
            }
            "FI" | "QFN" => {
                let base = Box::new(self.expr()?);
                self.expect(Tok::Comma, "','")?;
                let n = self.int("an integer")?;
                Ok(if kw == "FI" {
                    GroupExpr::FiniteIndex { base, index: n }
                } else {
                    GroupExpr::QuotientByFiniteNormal { base, order: n }
                })
            }
            "Graph" => {
                let (pos, raw) = match self.toks.get(self.pos) {
                    Some((p, Tok::Payload(raw))) => (*p, raw.clone()),
                    _ => return self.fail("a graph payload"),
                };
                self.pos += 1;
                let payload: GraphPayload =
                    serde_json::from_str(&raw).map_err(|e| ExprError::Syntax {
                        position: pos,
                        expected: format!(
                            "{{\"vertices\": [...], \"edges\": [[u, v, order], ...]}} ({e})"
                        ),
                    })?;
                let vertices = payload
                    .vertices
                    .iter()
                    .map(|v| parse_with(v, self.ann))
                    .collect::<Result<Vec<_>>>()?;
                let edges = payload
                    .edges
                    .into_iter()
                    .map(|(u, v, order)| GraphEdge { u, v, order })
                    .collect();
                Ok(GroupExpr::Graph { vertices, edges })
            }
            _ => unreachable!("keyword list"),
        }
    }

    fn index(&mut self) -> Result<Index> {
        match self.peek() {
            Some(Tok::Word(w)) if w == "inf" => {
                self.pos += 1;
                Ok(Index::Inf)
            }
            Some(Tok::Int(_)) => Ok(Index::Finite(self.int("an index")?)),
            _ => self.fail("an index (integer or inf)"),
        }
    }
}

fn right_nest(mut items: Vec<GroupExpr>, make: fn(Vec<GroupExpr>) -> GroupExpr) -> GroupExpr {
    let mut acc = items.pop().expect("at least one item");
    while let Some(prev) = items.pop() {
        acc = make(vec![prev, acc]);
    }
    acc
}

fn cyclic(n: u64) -> Result<GroupExpr> {
    match n {
        0 => semantic("Z0: write Z for the infinite cyclic group"),
        1 => semantic("Z1 is trivial: write 1"),
        n => Ok(GroupExpr::FiniteCyclic(n)),
    }
}

fn free(r: u64) -> Result<GroupExpr> {
    match r {
        0 => semantic("F0 is trivial: write 1"),
        1 => semantic("F1: write Z for the free group of rank 1"),
        r => Ok(GroupExpr::Free(r)),
    }
}

fn surface(genus: u64, orientable: bool) -> Result<GroupExpr> {
    let e = GroupExpr::Surface { genus, orientable };
    e.validate(&Annotations::default())?;
    Ok(e)
}

/// Parse without annotations: every identifier becomes an opaque group.
pub fn parse(text: &str) -> Result<GroupExpr> {
    parse_with(text, &Annotations::default())
}

/// Parse resolving identifiers against `ann` (finite tables are inlined).
pub fn parse_with(text: &str, ann: &Annotations) -> Result<GroupExpr> {
    let e = parse_unchecked(text, ann)?;
    e.validate(ann)?;
    Ok(e)
}

/// Parse without the structural validity checks.
pub(crate) fn parse_unchecked(text: &str, ann: &Annotations) -> Result<GroupExpr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        ann,
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.fail("end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use GroupExpr::*;

    fn p(s: &str) -> GroupExpr {
        parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(p("Z^3"), DirectProduct(vec![Int, DirectProduct(vec![Int, Int])]));
        assert_eq!(
            p("Z2 * Z2 * Z2"),
            FreeProduct(vec![
                FiniteCyclic(2),
                FreeProduct(vec![FiniteCyclic(2), FiniteCyclic(2)])
            ])
        );
        assert_eq!(p("F2 x Z"), DirectProduct(vec![Free(2), Int]));
    }

    #[test]
    fn precedence_and_spacing() {
        assert_eq!(
            p("Z x Z * Z2"),
            FreeProduct(vec![DirectProduct(vec![Int, Int]), FiniteCyclic(2)])
        );
        assert_eq!(p("ZxZ"), p("Z x Z"));
        assert_eq!(p("F2xZ"), p("F2 x Z"));
        assert_eq!(p("Z 3"), FiniteCyclic(3));
        assert_eq!(p("Sg-2"), Surface { genus: 2, orientable: false });
        assert_eq!(p("Sg 3"), Surface { genus: 3, orientable: true });
        assert_eq!(p("(Z*Z2)^2"), DirectProduct(vec![p("Z*Z2"), p("Z*Z2")]));
        assert_eq!(p("Z × Z"), p("Z x Z"));
    }

    #[test]
    fn constructors() {
        assert_eq!(
            p("Amal(Z4, Z6, 2)"),
            Amalgam {
                left: Box::new(FiniteCyclic(4)),
                right: Box::new(FiniteCyclic(6)),
                edge_order: 2,
                left_index: Index::Finite(2),
                right_index: Index::Finite(3),
            }
        );
        assert_eq!(
            p("Amal(Z^2, Z2, 1)"),
            Amalgam {
                left: Box::new(p("Z^2")),
                right: Box::new(FiniteCyclic(2)),
                edge_order: 1,
                left_index: Index::Inf,
                right_index: Index::Finite(2),
            }
        );
        assert!(matches!(p("HNN(Z2, 2)"), Hnn { edge_order: 2, .. }));
        assert!(matches!(p("Ext(F2, F2)"), Extension { .. }));
        assert!(matches!(p("FI(Z^2, 7)"), FiniteIndex { index: 7, .. }));
        assert!(matches!(p("QFN(Z x Z6, 3)"), QuotientByFiniteNormal { order: 3, .. }));
        let g = p(r#"Graph({"vertices": ["Z^3", "Z2"], "edges": [[0, 1, 1]]})"#);
        assert_eq!(
            g,
            Graph {
                vertices: vec![p("Z^3"), FiniteCyclic(2)],
                edges: vec![GraphEdge { u: 0, v: 1, order: 1 }]
            }
        );
        assert_eq!(p("Mystery * Z"), FreeProduct(vec![Opaque("Mystery".into()), Int]));
    }

    #[test]
    fn semantic_errors() {
        for bad in ["Z1", "F1", "F0", "Sg0", "Sg-1", "Z^0", "Amal(Z4, Z6, 3)", "Amal(Z2, Z2, 2)"] {
            assert!(
                matches!(parse(bad), Err(ExprError::Semantic(_))),
                "{bad} should be a semantic error"
            );
        }
        assert!(matches!(parse("Amal(Mystery, Z2, 1)"), Err(ExprError::Semantic(_))));
        assert!(parse("Amal(Mystery, Z2, 1, inf, 2)").is_ok());
        assert!(matches!(parse("Amal(Z, Z2, 1, 3, 2)"), Err(ExprError::Semantic(_))));
        assert!(matches!(
            parse(r#"Graph({"vertices": ["Z", "Z"], "edges": []})"#),
            Err(ExprError::Semantic(_))
        ));
        assert!(matches!(
            parse(r#"Graph({"vertices": ["Z4", "Z6"], "edges": [[0, 1, 4]]})"#),
            Err(ExprError::Semantic(_))
        ));
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(
            parse("Z x"),
            Err(ExprError::Syntax {
                position: 3,
                expected: "a group".into()
            })
        );
        assert!(matches!(parse("(Z"), Err(ExprError::Syntax { position: 2, .. })));
        assert!(matches!(parse("Z $ Z"), Err(ExprError::Syntax { position: 2, .. })));
        assert!(matches!(parse("Graph({)"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("Z Z"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn names() {
        assert!(is_valid_name("Mystery"));
        assert!(is_valid_name("Fox"));
        assert!(!is_valid_name("ZxZ"));
        assert!(!is_valid_name("F3"));
        assert!(!is_valid_name("Amal"));
        assert!(!is_valid_name("x"));
    }
}
