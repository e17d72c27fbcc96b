//! Golden comparison corpus: one pair per line,
//! `expected | expected with strict rules | a | b`, `#` comments.

use super::VerdictKind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenPair {
    pub line: usize,
    pub expected: VerdictKind,
    pub expected_strict: VerdictKind,
    pub a: String,
    pub b: String,
}

fn verdict(text: &str) -> Option<VerdictKind> {
    match text {
        "EQUIVALENT" => Some(VerdictKind::Equivalent),
        "INEQUIVALENT" => Some(VerdictKind::Inequivalent),
        "UNKNOWN" => Some(VerdictKind::Unknown),
        _ => None,
    }
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenPair>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        let [e, s, a, b] = cols.as_slice() else {
            return Err(format!("line {}: expected 4 columns separated by '|'", n + 1));
        };
        let bad = |v: &str| format!("line {}: unknown verdict {v:?}", n + 1);
        out.push(GoldenPair {
            line: n + 1,
            expected: verdict(e).ok_or_else(|| bad(e))?,
            expected_strict: verdict(s).ok_or_else(|| bad(s))?,
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let g = parse_golden("# c\nEQUIVALENT | UNKNOWN | Z^4 | Z^3\n").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].line, 2);
        assert_eq!(g[0].expected_strict, VerdictKind::Unknown);
        assert!(parse_golden("EQUIVALENT | Z | Z").is_err());
        assert!(parse_golden("SAME | SAME | Z | Z").is_err());
    }
}
