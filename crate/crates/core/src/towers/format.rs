//! Line-oriented tower text format.
//!
//! ```text
//! tower periodic
//! rank 1        # stage 0
//! period
//! rank 1        # stage 1, repeated forever
//! bond 1: a->a a
//! ```
//!
//! Telescopic towers use a single line: `increments 1 1 repeat` repeats the
//! last listed increment, `increments 1 0 repeat 5 0` repeats the given block
//! and `increments 2 1` has all later increments zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ExplicitTower, Increments, PeriodicTower, Result, Tail, Tower, TowerError};
use crate::free_group::FreeHom;

fn err(line: usize, message: impl Into<String>) -> TowerError {
    TowerError::Format {
        line,
        message: message.into(),
    }
}

pub(super) fn parse(text: &str) -> Result<Tower> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty tower file"))?;
    let kind = header
        .strip_prefix("tower")
        .map(str::trim)
        .ok_or_else(|| err(hline, "expected `tower explicit|periodic|telescopic`"))?;
    match kind {
        "telescopic" => parse_telescopic(lines),
        "explicit" | "periodic" => parse_staged(kind == "periodic", lines),
        other => Err(err(hline, format!("unknown tower kind {other:?}"))),
    }
}

fn parse_telescopic<'a>(mut lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Tower> {
    let (n, line) = lines
        .next()
        .ok_or_else(|| err(0, "missing `increments` line"))?;
    let rest = line
        .strip_prefix("increments")
        .ok_or_else(|| err(n, "expected `increments ...`"))?;
    if let Some((m, _)) = lines.next() {
        return Err(err(m, "unexpected line after increments"));
    }
    let number = |tok: &str| {
        tok.parse::<usize>()
            .map_err(|_| err(n, format!("bad increment {tok:?}")))
    };
    let mut tokens = rest.split_whitespace();
    let mut prefix = Vec::new();
    let mut repeat = None;
    for tok in tokens.by_ref() {
        if tok == "repeat" {
            repeat = Some(());
            break;
        }
        prefix.push(number(tok)?);
    }
    let block = tokens.map(number).collect::<Result<Vec<_>>>()?;
    let inc = match repeat {
        None => Increments::new(prefix, Tail::Zero)?,
        Some(()) if block.is_empty() => {
            Increments::repeat_last(prefix).map_err(|e| err(n, e.to_string()))?
        }
        Some(()) => Increments::new(prefix, Tail::Repeat(block))?,
    };
    Ok(Tower::Telescopic(inc))
}

fn parse_staged<'a>(
    periodic: bool,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Tower> {
    let mut ranks = Vec::new();
    let mut period_start = None;
    let mut bond_text: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    for (n, line) in lines {
        if line == "period" {
            if !periodic {
                return Err(err(n, "`period` only applies to periodic towers"));
            }
            if period_start.replace(ranks.len()).is_some() {
                return Err(err(n, "duplicate `period` marker"));
            }
        } else if let Some(r) = line.strip_prefix("rank") {
            let r = r
                .trim()
                .parse::<usize>()
                .map_err(|_| err(n, format!("bad rank in {line:?}")))?;
            ranks.push(r);
        } else if let Some(rest) = line.strip_prefix("bond") {
            let (idx, body) = rest
                .split_once(':')
                .ok_or_else(|| err(n, "expected `bond i: ...`"))?;
            let idx = idx
                .trim()
                .parse::<usize>()
                .map_err(|_| err(n, format!("bad bond index in {line:?}")))?;
            if bond_text.insert(idx, (n, body.to_string())).is_some() {
                return Err(err(n, format!("bond {idx} given twice")));
            }
        } else {
            return Err(err(n, format!("unrecognized line {line:?}")));
        }
    }
    if ranks.is_empty() {
        return Err(err(0, "no stages given"));
    }
    let mut bonds = Vec::with_capacity(ranks.len() - 1);
    for i in 1..ranks.len() {
        let (n, body) = bond_text
            .remove(&i)
            .ok_or_else(|| err(0, format!("missing bond {i}")))?;
        let hom = FreeHom::parse(ranks[i], ranks[i - 1], &body).map_err(|e| err(n, e.to_string()))?;
        bonds.push(hom);
    }
    if let Some((&i, (n, _))) = bond_text.iter().next() {
        return Err(err(*n, format!("bond {i} has no matching stage")));
    }
    if !periodic {
        return Ok(Tower::Explicit(ExplicitTower::new(ranks, bonds)?));
    }
    let p = period_start.ok_or_else(|| err(0, "periodic tower needs a `period` marker"))?;
    if p == 0 {
        return Err(err(0, "periodic tower needs at least one stage before `period`"));
    }
    let period_ranks = ranks.split_off(p);
    let period_bonds = bonds.split_off(p - 1);
    Ok(Tower::Periodic(PeriodicTower::new(
        ranks,
        bonds,
        period_ranks,
        period_bonds,
    )?))
}

pub(super) fn print(t: &Tower) -> String {
    let mut out = String::new();
    match t {
        Tower::Telescopic(inc) => {
            out.push_str("tower telescopic\nincrements");
            for x in &inc.prefix {
                write!(out, " {x}").unwrap();
            }
            if let Tail::Repeat(block) = &inc.tail {
                out.push_str(" repeat");
                for x in block {
                    write!(out, " {x}").unwrap();
                }
            }
            out.push('\n');
        }
        Tower::Explicit(e) => {
            out.push_str("tower explicit\n");
            staged(&mut out, e.ranks(), None, e.bonds());
        }
        Tower::Periodic(p) => {
            out.push_str("tower periodic\n");
            let mut ranks = p.prefix_ranks.clone();
            ranks.extend(&p.period_ranks);
            let mut bonds = p.prefix_bonds.clone();
            bonds.extend(p.period_bonds.iter().cloned());
            staged(&mut out, &ranks, Some(p.prefix_ranks.len()), &bonds);
        }
    }
    out
}

fn staged(out: &mut String, ranks: &[usize], period_start: Option<usize>, bonds: &[FreeHom]) {
    for (i, r) in ranks.iter().enumerate() {
        if Some(i) == period_start {
            out.push_str("period\n");
        }
        writeln!(out, "rank {r}").unwrap();
    }
    for (i, b) in bonds.iter().enumerate() {
        writeln!(out, "bond {}: {}", i + 1, b).unwrap();
    }
}
