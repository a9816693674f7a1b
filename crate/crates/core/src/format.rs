//! Line-oriented text formats: `sftkit 1` (SFTs and Wang tilesets),
//! `sbc 1` (sliding block codes), `tm 1` (Turing machines) and verdict
//! reports.
//!
//! A line whose first token ends with `:` opens a section; symbol names can
//! never end with `:`, so this is unambiguous. Blank lines and lines
//! starting with `#` are ignored. Nested documents (stages of a composition,
//! the guard and inner code of a star code) are indented by two spaces
//! under their header.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Symbol};
use crate::codes::{Rule, SlidingBlockCode, StarRule};
use crate::error::{parse_err, Result, SftError};
use crate::geom::Point;
use crate::pattern::Pattern;
use crate::sft::{SftBuilder, SftSpec, ShapeGroup};
use crate::tm::{Move, TuringMachine};
use crate::verdict::{Budget, Verdict};
use crate::wang::{WangTile, WangTileset};

pub const SFT_HEADER: &str = "sftkit 1";
pub const CODE_HEADER: &str = "sbc 1";
pub const TM_HEADER: &str = "tm 1";

/// A section: header name, text after the colon, body lines with numbers.
struct Section {
    name: String,
    arg: String,
    line: usize,
    body: Vec<(usize, String)>,
}

fn header_of(l: &str) -> Option<(String, String)> {
    let first = l.split_whitespace().next()?;
    let name = first.strip_suffix(':')?;
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_lowercase() || c == '-') {
        return None;
    }
    Some((name.to_string(), l[first.len()..].trim().to_string()))
}

/// Splits a document into its header line and sections. Indented lines
/// belong verbatim (minus two spaces) to the current section body.
fn sections(text: &str, header: &str, base: usize) -> Result<Vec<Section>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1 + base, l));
    let mut first = None;
    for (n, l) in lines.by_ref() {
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        first = Some((n, t));
        break;
    }
    match first {
        Some((_, t)) if t == header => {}
        Some((n, t)) => return parse_err(n, format!("expected header {header:?}, found {t:?}")),
        None => return parse_err(base + 1, format!("missing header {header:?}")),
    }
    let mut out: Vec<Section> = Vec::new();
    for (n, l) in lines {
        if let Some(rest) = l.strip_prefix("  ") {
            match out.last_mut() {
                Some(s) => s.body.push((n, rest.to_string())),
                None => return parse_err(n, "indented line outside a section"),
            }
            continue;
        }
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some((name, arg)) = header_of(t) {
            out.push(Section { name, arg, line: n, body: Vec::new() });
        } else {
            match out.last_mut() {
                Some(s) => s.body.push((n, t.to_string())),
                None => return parse_err(n, format!("line outside a section: {t:?}")),
            }
        }
    }
    Ok(out)
}

fn nested_text(body: &[(usize, String)]) -> (String, usize) {
    let base = body.first().map_or(0, |(n, _)| n - 1);
    (body.iter().map(|(_, l)| l.as_str()).collect::<Vec<_>>().join("\n"), base)
}

/// Contents of a `sftkit 1` file.
#[derive(Clone, Debug, PartialEq)]
pub enum SftFile {
    Sft(SftSpec),
    Wang(WangTileset),
}

impl SftFile {
    /// The SFT itself, converting tilesets.
    pub fn into_sft(self) -> SftSpec {
        match self {
            SftFile::Sft(x) => x,
            SftFile::Wang(t) => crate::wang::wang_to_sft(&t),
        }
    }
}

fn parse_offsets(s: &str, dim: usize, line: usize) -> Result<Vec<Point>> {
    s.split_whitespace()
        .map(|tok| {
            let inner = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')'));
            let Some(inner) = inner else { return parse_err(line, format!("bad offset {tok:?}")) };
            let p: Vec<i32> = inner
                .split(',')
                .map(|c| c.parse::<i32>().map_err(|_| SftError::Parse { line, message: format!("bad offset {tok:?}") }))
                .collect::<Result<_>>()?;
            if p.len() != dim {
                return parse_err(line, format!("offset {tok:?} has the wrong dimension"));
            }
            Ok(p)
        })
        .collect()
}

fn fmt_point(p: &[i32]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

pub fn parse_sft(text: &str) -> Result<SftFile> {
    parse_sft_at(text, 0)
}

fn parse_sft_at(text: &str, base: usize) -> Result<SftFile> {
    let secs = sections(text, SFT_HEADER, base)?;
    let mut alphabet: Option<Alphabet> = None;
    let mut dim: Option<usize> = None;
    let mut forbid: Vec<(usize, String)> = Vec::new();
    let mut allow: Vec<(usize, String, Vec<(usize, String)>)> = Vec::new();
    let mut wang: Option<Vec<(usize, String)>> = None;
    for s in secs {
        let no_arg = |s: &Section| if s.arg.is_empty() { Ok(()) } else { parse_err(s.line, format!("unexpected text after {}:", s.name)) };
        match s.name.as_str() {
            "alphabet" => {
                no_arg(&s)?;
                if alphabet.is_some() {
                    return parse_err(s.line, "repeated alphabet section");
                }
                let names: Vec<&str> = s.body.iter().map(|(_, l)| l.as_str()).collect();
                alphabet = Some(Alphabet::new(names).map_err(|e| SftError::Parse { line: s.line, message: e.to_string() })?);
            }
            "dim" => {
                let d = s.arg.parse::<usize>().ok().filter(|&d| d >= 1);
                match (d, s.body.is_empty(), dim) {
                    (Some(d), true, None) => dim = Some(d),
                    _ => return parse_err(s.line, "dim: expects one integer >= 1"),
                }
            }
            "forbid" => {
                no_arg(&s)?;
                forbid.extend(s.body);
            }
            "allow" => allow.push((s.line, s.arg, s.body)),
            "wang" => {
                no_arg(&s)?;
                if wang.is_some() {
                    return parse_err(s.line, "repeated wang section");
                }
                wang = Some(s.body);
            }
            other => return parse_err(s.line, format!("unknown section {other:?}")),
        }
    }
    if let Some(body) = wang {
        if alphabet.is_some() || dim.is_some() || !forbid.is_empty() || !allow.is_empty() {
            return parse_err(base + 1, "a wang file has no other sections");
        }
        let mut tiles = Vec::new();
        for (n, l) in body {
            let c: Vec<&str> = l.split_whitespace().collect();
            if c.len() != 4 {
                return parse_err(n, "a tile is four colours N E S W");
            }
            tiles.push(WangTile::new(c[0], c[1], c[2], c[3]));
        }
        return WangTileset::new(tiles).map(SftFile::Wang).map_err(|e| SftError::Parse { line: base + 1, message: e.to_string() });
    }
    let Some(alphabet) = alphabet else { return parse_err(base + 1, "missing alphabet section") };
    let Some(dim) = dim else { return parse_err(base + 1, "missing dim section") };
    let mut b = SftBuilder::new(alphabet.clone(), dim);
    let wrap = |n: usize| move |e: SftError| SftError::Parse { line: n, message: e.to_string() };
    for (n, l) in forbid {
        let p = Pattern::parse(&l, &alphabet, dim).map_err(wrap(n))?;
        b.forbid(&p).map_err(wrap(n))?;
    }
    for (n, arg, body) in allow {
        let offs = parse_offsets(&arg, dim, n)?;
        let canonical = !offs.is_empty() && offs[0].iter().all(|&x| x == 0) && offs.windows(2).all(|w| w[0] < w[1]);
        if !canonical {
            return parse_err(n, "allow: offsets must be sorted and start at the origin");
        }
        let mut tuples = Vec::new();
        for (m, l) in body {
            let t: Vec<Symbol> = l.split_whitespace().map(|x| alphabet.symbol(x)).collect::<Result<_>>().map_err(wrap(m))?;
            if t.len() != offs.len() {
                return parse_err(m, "tuple length differs from the shape");
            }
            tuples.push(t);
        }
        b.push_group(ShapeGroup::complement_of(offs, alphabet.len(), tuples));
    }
    Ok(SftFile::Sft(b.build()))
}

/// Canonical text: each shape group as `forbid:` lines or, when shorter,
/// as an `allow:` block.
pub fn write_sft(x: &SftSpec) -> String {
    let a = x.alphabet();
    let mut out = format!("{SFT_HEADER}\nalphabet:\n");
    for s in a.names() {
        out.push_str(s);
        out.push('\n');
    }
    let _ = writeln!(out, "dim: {}", x.dim());
    let as_allow = |g: &ShapeGroup| g.count() > g.space() - g.count();
    out.push_str("forbid:\n");
    for g in x.groups().iter().filter(|g| !as_allow(g)) {
        for t in g.tuples() {
            let p = Pattern::from_cells(x.dim(), g.offsets().iter().cloned().zip(t)).expect("valid shape");
            out.push_str(&p.to_syntax(a));
            out.push('\n');
        }
    }
    for g in x.groups().iter().filter(|g| as_allow(g)) {
        let offs: Vec<String> = g.offsets().iter().map(|p| fmt_point(p)).collect();
        let _ = writeln!(out, "allow: {}", offs.join(" "));
        for t in g.allowed() {
            let names: Vec<&str> = t.iter().map(|&s| a.name(s)).collect();
            out.push_str(&names.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn write_wang(t: &WangTileset) -> String {
    let mut out = format!("{SFT_HEADER}\nwang:\n");
    for w in t.tiles() {
        let _ = writeln!(out, "{} {} {} {}", w.north, w.east, w.south, w.west);
    }
    out
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

pub fn write_code(c: &SlidingBlockCode) -> String {
    let mut out = format!("{CODE_HEADER}\nkind: {}\nradius: {}\ndim: {}\n", c.kind(), c.radius(), c.dim());
    let _ = writeln!(out, "source: {}", c.source().names().join(" "));
    let _ = writeln!(out, "target: {}", c.target().names().join(" "));
    match c.rule() {
        Rule::Table(t) => {
            if let Some(d) = t.default {
                let _ = writeln!(out, "default: {}", c.target().name(d));
            }
            out.push_str("table:\n");
            for (w, s) in &t.entries {
                let names: Vec<&str> = w.iter().map(|&x| c.source().name(x)).collect();
                let _ = writeln!(out, "{} -> {}", names.join(" "), c.target().name(*s));
            }
        }
        Rule::Projection { offset, map } => {
            let _ = writeln!(out, "offset: {}", fmt_point(offset));
            let names: Vec<&str> = map.iter().map(|&s| c.target().name(s)).collect();
            let _ = writeln!(out, "map: {}", names.join(" "));
        }
        Rule::Compose(chain) => {
            for st in chain {
                out.push_str("stage:\n");
                out.push_str(&indent(&write_code(st)));
            }
        }
        Rule::Star(st) => {
            out.push_str("guard:\n");
            out.push_str(&indent(&write_sft(&st.guard)));
            out.push_str("inner:\n");
            out.push_str(&indent(&write_code(&st.inner)));
        }
    }
    out
}

pub fn parse_code(text: &str) -> Result<SlidingBlockCode> {
    parse_code_at(text, 0)
}

fn parse_code_at(text: &str, base: usize) -> Result<SlidingBlockCode> {
    let secs = sections(text, CODE_HEADER, base)?;
    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut table: Option<Vec<(usize, String)>> = None;
    let mut stages = Vec::new();
    let mut guard = None;
    let mut inner = None;
    for s in secs {
        match s.name.as_str() {
            "kind" | "radius" | "dim" | "source" | "target" | "default" | "offset" | "map" => {
                if !s.body.is_empty() {
                    return parse_err(s.line, format!("{}: takes a single line", s.name));
                }
                if fields.insert(s.name.clone(), (s.line, s.arg)).is_some() {
                    return parse_err(s.line, format!("repeated {}:", s.name));
                }
            }
            "table" => table = Some(s.body),
            "stage" => stages.push(parse_code_at(&nested_text(&s.body).0, nested_text(&s.body).1)?),
            "guard" => {
                let (t, b) = nested_text(&s.body);
                guard = Some(parse_sft_at(&t, b)?.into_sft());
            }
            "inner" => {
                let (t, b) = nested_text(&s.body);
                inner = Some(parse_code_at(&t, b)?);
            }
            other => return parse_err(s.line, format!("unknown section {other:?}")),
        }
    }
    let get = |k: &str| fields.get(k).cloned().ok_or_else(|| SftError::Parse { line: base + 1, message: format!("missing {k}:") });
    let num = |k: &str| -> Result<usize> {
        let (n, v) = get(k)?;
        v.parse().map_err(|_| SftError::Parse { line: n, message: format!("{k}: expects an integer") })
    };
    let alpha = |k: &str| -> Result<Alphabet> {
        let (n, v) = get(k)?;
        Alphabet::new(v.split_whitespace()).map_err(|e| SftError::Parse { line: n, message: e.to_string() })
    };
    let (kind_line, kind) = get("kind")?;
    let radius = num("radius")?;
    let dim = num("dim")?;
    let source = alpha("source")?;
    let target = alpha("target")?;
    let sym = |a: &Alphabet, name: &str, n: usize| a.symbol(name).map_err(|e| SftError::Parse { line: n, message: e.to_string() });
    let wrap = |n: usize| move |e: SftError| SftError::Parse { line: n, message: e.to_string() };
    match kind.as_str() {
        "table" => {
            let default = match fields.get("default") {
                Some((n, v)) => Some(sym(&target, v, *n)?),
                None => None,
            };
            let mut entries = BTreeMap::new();
            for (n, l) in table.unwrap_or_default() {
                let Some((w, s)) = l.split_once(" -> ") else { return parse_err(n, "expected `window -> symbol`") };
                let w: Vec<Symbol> = w.split_whitespace().map(|x| sym(&source, x, n)).collect::<Result<_>>()?;
                if entries.insert(w, sym(&target, s.trim(), n)?).is_some() {
                    return parse_err(n, "repeated window");
                }
            }
            SlidingBlockCode::table(source, target, dim, radius, entries, default).map_err(wrap(kind_line))
        }
        "proj" => {
            let (n, o) = get("offset")?;
            let offset = parse_offsets(&o, dim, n)?;
            if offset.len() != 1 {
                return parse_err(n, "offset: expects one point");
            }
            let (m, map) = get("map")?;
            let map: Vec<Symbol> = map.split_whitespace().map(|x| sym(&target, x, m)).collect::<Result<_>>()?;
            SlidingBlockCode::projection(source, target, dim, radius, offset[0].clone(), map).map_err(wrap(kind_line))
        }
        "compose" => {
            let total: usize = stages.iter().map(|s| s.radius()).sum();
            let ok = !stages.is_empty()
                && stages.first().unwrap().source() == &source
                && stages.last().unwrap().target() == &target
                && stages.windows(2).all(|w| w[0].target() == w[1].source())
                && stages.iter().all(|s| s.dim() == dim)
                && total == radius;
            if !ok {
                return parse_err(kind_line, "stages do not chain to the declared code");
            }
            Ok(SlidingBlockCode::from_parts(source, target, dim, radius, Rule::Compose(stages)))
        }
        "star" => {
            let (Some(guard), Some(inner)) = (guard, inner) else { return parse_err(kind_line, "star codes need guard: and inner:") };
            let ok = source.len() == inner.source().len() + 1
                && target.len() == inner.target().len() + 1
                && guard.alphabet() == inner.source()
                && inner.radius() <= radius
                && inner.dim() == dim
                && guard.dim() == dim;
            if !ok {
                return parse_err(kind_line, "star code does not match its inner code");
            }
            let st = StarRule {
                inner,
                guard,
                star_in: Symbol::from(source.len() - 1),
                star_out: Symbol::from(target.len() - 1),
            };
            Ok(SlidingBlockCode::from_parts(source, target, dim, radius, Rule::Star(Box::new(st))))
        }
        other => parse_err(kind_line, format!("unknown kind {other:?}")),
    }
}

pub fn write_tm(m: &TuringMachine) -> String {
    let st = m.states();
    let sy = m.symbols();
    let mut out = format!("{TM_HEADER}\nstates: {}\nblank: {}\ninit: {}\n", st.join(" "), sy[m.blank()], st[m.init()]);
    let halt: Vec<&str> = m.halting().iter().map(|&q| st[q].as_str()).collect();
    let _ = writeln!(out, "halt: {}", halt.join(" "));
    out.push_str("delta:\n");
    for (&(q, a), t) in m.delta() {
        let mv = if t.mv == Move::L { "L" } else { "R" };
        let _ = writeln!(out, "{},{} -> {},{},{mv}", st[q], sy[a], st[t.next], sy[t.write]);
    }
    out
}

pub fn parse_tm(text: &str) -> Result<TuringMachine> {
    let secs = sections(text, TM_HEADER, 0)?;
    let mut lists: BTreeMap<String, (usize, Vec<String>)> = BTreeMap::new();
    let mut delta = Vec::new();
    let mut symbols_seen: Vec<String> = Vec::new();
    for s in secs {
        match s.name.as_str() {
            "states" | "symbols" | "blank" | "init" | "halt" => {
                let mut items: Vec<String> = s.arg.split_whitespace().map(String::from).collect();
                for (_, l) in &s.body {
                    items.extend(l.split_whitespace().map(String::from));
                }
                if lists.insert(s.name.clone(), (s.line, items)).is_some() {
                    return parse_err(s.line, format!("repeated {}:", s.name));
                }
            }
            "delta" => {
                for (n, l) in s.body {
                    let bad = || SftError::Parse { line: n, message: "expected `q,a -> q',b,L|R`".into() };
                    let (lhs, rhs) = l.split_once("->").ok_or_else(bad)?;
                    let lhs: Vec<&str> = lhs.split(',').map(str::trim).collect();
                    let rhs: Vec<&str> = rhs.split(',').map(str::trim).collect();
                    if lhs.len() != 2 || rhs.len() != 3 {
                        return Err(bad());
                    }
                    let mv = match rhs[2] {
                        "L" => Move::L,
                        "R" => Move::R,
                        _ => return Err(bad()),
                    };
                    for a in [lhs[1], rhs[1]] {
                        if !symbols_seen.iter().any(|x| x == a) {
                            symbols_seen.push(a.to_string());
                        }
                    }
                    delta.push((lhs[0].to_string(), lhs[1].to_string(), rhs[0].to_string(), rhs[1].to_string(), mv));
                }
            }
            other => return parse_err(s.line, format!("unknown section {other:?}")),
        }
    }
    let one = |k: &str| -> Result<String> {
        match lists.get(k) {
            Some((_, v)) if v.len() == 1 => Ok(v[0].clone()),
            Some((n, _)) => parse_err(*n, format!("{k}: expects one name")),
            None => parse_err(1, format!("missing {k}:")),
        }
    };
    let blank = one("blank")?;
    let init = one("init")?;
    let states = lists.get("states").map(|(_, v)| v.clone()).ok_or_else(|| SftError::Parse { line: 1, message: "missing states:".into() })?;
    let symbols = match lists.get("symbols") {
        Some((_, v)) => v.clone(),
        None => {
            let mut v = vec![blank.clone()];
            v.extend(symbols_seen.into_iter().filter(|s| *s != blank));
            v
        }
    };
    let halt = lists.get("halt").map(|(_, v)| v.clone()).unwrap_or_default();
    TuringMachine::new(states, symbols, &blank, &init, &halt, &delta)
}

/// A verdict report: `verdict:` first, then operation fields, the witness
/// and the budget echo.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub status: String,
    pub fields: Vec<(String, String)>,
}

impl Report {
    pub fn new<P, R>(v: &Verdict<P, R>) -> Self {
        let mut r = Report { status: v.status().to_string(), fields: Vec::new() };
        if let Verdict::Unknown(b) = v {
            r.add_budget(b);
        }
        r
    }

    pub fn field(&mut self, k: &str, v: impl std::fmt::Display) -> &mut Self {
        self.fields.push((k.to_string(), v.to_string()));
        self
    }

    fn add_budget(&mut self, b: &Budget) {
        for (k, v) in &b.items {
            self.fields.push(("budget".into(), format!("{k}={v}")));
        }
        if let Some(n) = &b.note {
            self.fields.push(("note".into(), n.clone()));
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("verdict: {}\n", self.status);
        for (k, v) in &self.fields {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }
}
