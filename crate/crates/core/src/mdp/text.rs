//! Plain-text timeline format.
//!
//! ```text
//! S A H gamma T
//! @init p_0 .. p_{S-1}          (optional, uniform when absent)
//! @t <change-time>
//! r(0,0)                        S*A reward lines, row-major by (s, a)
//! ...
//! p(0|0,0) .. p(S-1|0,0)        S*A transition rows
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use super::{MdpTables, Segment, TimeVaryingMdp};
use crate::{fmt_f64, Error, Result};

pub fn write_timeline(mdp: &TimeVaryingMdp) -> String {
    let mut out = String::new();
    let (ns, na) = (mdp.num_states(), mdp.num_actions());
    let _ = writeln!(out, "{ns} {na} {} {} {}", mdp.horizon(), fmt_f64(mdp.discount()), mdp.total_time());
    let _ = writeln!(out, "@init {}", join(mdp.initial_dist()));
    for seg in mdp.segments() {
        let _ = writeln!(out, "@t {}", seg.start);
        for r in seg.tables.rewards() {
            let _ = writeln!(out, "{}", fmt_f64(*r));
        }
        for row in seg.tables.transitions().chunks(ns) {
            let _ = writeln!(out, "{}", join(row));
        }
    }
    out
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" ")
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).map(|(_, l)| *l)
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        let item = self.items.get(self.pos).copied().ok_or_else(|| Error::Parse {
            line: self.items.last().map_or(1, |(n, _)| n + 1),
            msg: "unexpected end of input".into(),
        })?;
        self.pos += 1;
        Ok(item)
    }
}

fn parse_nums<T: std::str::FromStr>(line: usize, s: &str, expect: usize) -> Result<Vec<T>> {
    let v: Vec<T> = s
        .split_whitespace()
        .map(|tok| tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad number {tok:?}") }))
        .collect::<Result<_>>()?;
    if v.len() != expect {
        return Err(Error::Parse { line, msg: format!("expected {expect} values, got {}", v.len()) });
    }
    Ok(v)
}

pub fn read_timeline(text: &str) -> Result<TimeVaryingMdp> {
    let items = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut lines = Lines { items, pos: 0 };

    let (n, header) = lines.next()?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 {
        return Err(Error::Parse { line: n, msg: "header must be `S A H gamma T`".into() });
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse { line: n, msg: format!("bad integer {s:?}") });
    let (ns, na, horizon) = (int(toks[0])?, int(toks[1])?, int(toks[2])?);
    let gamma: f64 = toks[3].parse().map_err(|_| Error::Parse { line: n, msg: "bad gamma".into() })?;
    let total = int(toks[4])?;

    let mut init = vec![1.0 / ns.max(1) as f64; ns];
    if let Some(rest) = lines.peek().and_then(|l| l.strip_prefix("@init")) {
        let (n, _) = lines.next()?;
        init = parse_nums(n, rest, ns)?;
    }

    let mut segments = Vec::new();
    while lines.peek().is_some() {
        let (n, l) = lines.next()?;
        let start = l
            .strip_prefix("@t")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse { line: n, msg: "expected `@t <time>`".into() })?;
        let mut rewards = Vec::with_capacity(ns * na);
        for _ in 0..ns * na {
            let (n, l) = lines.next()?;
            rewards.push(parse_nums::<f64>(n, l, 1)?[0]);
        }
        let mut transitions = Vec::with_capacity(ns * na * ns);
        for _ in 0..ns * na {
            let (n, l) = lines.next()?;
            transitions.extend(parse_nums::<f64>(n, l, ns)?);
        }
        segments.push(Segment { start, tables: MdpTables::new(ns, na, rewards, transitions)? });
    }
    TimeVaryingMdp::new(horizon, gamma, total, init, segments)
}
