//! Text formats: poset files, map files, Graphviz DOT and TSV tables.
//!
//! A poset file looks like
//!
//! ```text
//! poset diamond
//! elements: bot a b top
//! order: bot < a
//! order: bot < b < top
//! order: a < top
//! joinspec: { a b }
//! meetspec: all
//! ```
//!
//! `order:` lines may chain several `<`. A specification line is either a
//! braced set (one per line, singletons implicit) or `all`, meaning every
//! subset whose bound exists. A map file has one `p -> q` line per element.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;
use crate::poset::{ElemSet, FinitePoset};
use crate::spec::{BoundKind, Specification};

/// What a `joinspec:` / `meetspec:` line asked for.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SpecDecl {
    /// Singletons only.
    #[default]
    Trivial,
    Sets(Vec<Vec<String>>),
    AllDefined,
}

#[derive(Debug, Clone)]
pub struct PosetFile {
    pub name: String,
    pub poset: Arc<FinitePoset>,
    pub joinspec: SpecDecl,
    pub meetspec: SpecDecl,
}

impl PosetFile {
    pub fn join_spec(&self) -> Result<Specification> {
        self.spec(BoundKind::Join, &self.joinspec)
    }

    pub fn meet_spec(&self) -> Result<Specification> {
        self.spec(BoundKind::Meet, &self.meetspec)
    }

    fn spec(&self, kind: BoundKind, decl: &SpecDecl) -> Result<Specification> {
        let p = self.poset.clone();
        match decl {
            SpecDecl::Trivial => Ok(Specification::trivial(p, kind)),
            SpecDecl::AllDefined => Ok(Specification::all_defined(p, kind)),
            SpecDecl::Sets(sets) => {
                let sets = sets
                    .iter()
                    .map(|s| p.set_of_names(s))
                    .collect::<Result<Vec<ElemSet>>>()?;
                Specification::explicit(p, kind, sets)
            }
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')' | '\'' | ','))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

fn ident(line: usize, s: &str) -> Result<String> {
    if is_identifier(s) {
        Ok(s.to_string())
    } else {
        Err(parse_err(line, format!("`{s}` is not a valid identifier")))
    }
}

fn parse_spec_line(line: usize, rest: &str, decl: &mut SpecDecl) -> Result<()> {
    if rest == "all" {
        *decl = SpecDecl::AllDefined;
        return Ok(());
    }
    let inner = rest
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| parse_err(line, "expected `{ id ... }` or `all`"))?;
    let set = inner
        .split_whitespace()
        .map(|s| ident(line, s))
        .collect::<Result<Vec<_>>>()?;
    match decl {
        SpecDecl::AllDefined => Err(parse_err(line, "specification already declared as `all`")),
        SpecDecl::Trivial => {
            *decl = SpecDecl::Sets(vec![set]);
            Ok(())
        }
        SpecDecl::Sets(v) => {
            v.push(set);
            Ok(())
        }
    }
}

pub fn parse_poset(text: &str) -> Result<PosetFile> {
    let mut name = None;
    let mut elements: Option<Vec<String>> = None;
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut joinspec = SpecDecl::Trivial;
    let mut meetspec = SpecDecl::Trivial;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if name.is_none() {
            let n = line
                .strip_prefix("poset")
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| parse_err(ln, "expected `poset <name>`"))?;
            name = Some(ident(ln, n.trim())?);
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "expected `key: value`"))?;
        let rest = rest.trim();
        match key.trim() {
            "elements" => {
                if elements.is_some() {
                    return Err(parse_err(ln, "elements declared twice"));
                }
                let els = rest
                    .split_whitespace()
                    .map(|s| ident(ln, s))
                    .collect::<Result<Vec<_>>>()?;
                elements = Some(els);
            }
            "order" => {
                let parts: Vec<&str> = rest.split('<').map(str::trim).collect();
                if parts.len() < 2 {
                    return Err(parse_err(ln, "expected `a < b`"));
                }
                for w in parts.windows(2) {
                    pairs.push((ident(ln, w[0])?, ident(ln, w[1])?));
                }
            }
            "joinspec" => parse_spec_line(ln, rest, &mut joinspec)?,
            "meetspec" => parse_spec_line(ln, rest, &mut meetspec)?,
            other => return Err(parse_err(ln, format!("unknown key `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| parse_err(0, "empty poset file"))?;
    let elements = elements.ok_or_else(|| parse_err(0, "missing `elements:` line"))?;
    let poset = FinitePoset::from_relations(&elements, &pairs)?;
    Ok(PosetFile {
        name,
        poset: Arc::new(poset),
        joinspec,
        meetspec,
    })
}

fn write_spec(out: &mut String, key: &str, spec: &Specification) {
    let p = spec.base();
    match spec.family() {
        crate::spec::Family::Explicit(sets) => {
            for s in sets {
                let names: Vec<&str> = s.ones().map(|i| p.name(i)).collect();
                let _ = writeln!(out, "{key}: {{ {} }}", names.join(" "));
            }
        }
        _ => {
            let _ = writeln!(out, "{key}: all");
        }
    }
}

/// Writes a poset file listing covering pairs only.
pub fn write_poset(name: &str, p: &FinitePoset, specs: Option<(&Specification, &Specification)>) -> String {
    let mut out = format!("poset {name}\nelements: {}\n", p.names().join(" "));
    for (a, b) in p.covers() {
        let _ = writeln!(out, "order: {} < {}", p.name(a), p.name(b));
    }
    if let Some((u, d)) = specs {
        write_spec(&mut out, "joinspec", u);
        write_spec(&mut out, "meetspec", d);
    }
    out
}

/// Reads `p -> q` lines into a map between the given posets. An optional
/// first line `map <name>` is ignored; every source element must appear once.
pub fn parse_map(text: &str, source: Arc<FinitePoset>, target: Arc<FinitePoset>) -> Result<MonotoneMap> {
    let mut assign: Vec<Option<usize>> = vec![None; source.len()];
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if first && line.starts_with("map") && !line.contains("->") {
            first = false;
            continue;
        }
        first = false;
        let (a, b) = line
            .split_once("->")
            .ok_or_else(|| parse_err(ln, "expected `p -> q`"))?;
        let (a, b) = (a.trim(), b.trim());
        let pa = source
            .index_of(a)
            .ok_or_else(|| parse_err(ln, format!("`{a}` is not in the source")))?;
        let qb = target
            .index_of(b)
            .ok_or_else(|| parse_err(ln, format!("`{b}` is not in the target")))?;
        if assign[pa].replace(qb).is_some() {
            return Err(parse_err(ln, format!("`{a}` mapped twice")));
        }
    }
    let assign = assign
        .into_iter()
        .enumerate()
        .map(|(p, v)| v.ok_or_else(|| Error::InvalidMap(format!("`{}` is not mapped", source.name(p)))))
        .collect::<Result<Vec<_>>>()?;
    MonotoneMap::new(source, target, assign)
}

/// A family of upsets (`Meet`) or downsets (`Join`), one `{ id ... }` per line.
pub fn parse_family(text: &str, p: &FinitePoset, kind: BoundKind) -> Result<Vec<ElemSet>> {
    let mut sets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut decl = SpecDecl::Trivial;
        parse_spec_line(i + 1, line, &mut decl)?;
        let SpecDecl::Sets(names) = decl else {
            return Err(parse_err(i + 1, "expected `{ id ... }`"));
        };
        let set = p
            .set_of_names(&names[0])
            .map_err(|e| parse_err(i + 1, e.to_string()))?;
        let closed = match kind {
            BoundKind::Meet => p.is_upset(&set),
            BoundKind::Join => p.is_downset(&set),
        };
        if set.is_clear() || !closed {
            let what = match kind {
                BoundKind::Meet => "a non-empty upset",
                BoundKind::Join => "a non-empty downset",
            };
            return Err(parse_err(i + 1, format!("set is not {what}")));
        }
        sets.push(set);
    }
    Ok(sets)
}

pub fn write_map(f: &MonotoneMap) -> String {
    let mut out = String::new();
    for (p, &q) in f.assign().iter().enumerate() {
        let _ = writeln!(out, "{} -> {}", f.source().name(p), f.target().name(q));
    }
    out
}

/// How a node is drawn in DOT output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Plain,
    /// The image of a base element.
    Base,
    /// Born from a filter (a new meet).
    Filter,
    /// Born from an ideal (a new join).
    Ideal,
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram as a Graphviz digraph, edges pointing upward.
pub fn to_dot(name: &str, p: &FinitePoset, role: &dyn Fn(usize) -> NodeRole) -> String {
    let mut out = format!("digraph {} {{\n", dot_quote(name));
    for i in 0..p.len() {
        let shape = match role(i) {
            NodeRole::Plain => "ellipse",
            NodeRole::Base => "doublecircle",
            NodeRole::Filter => "box",
            NodeRole::Ideal => "diamond",
        };
        let _ = writeln!(out, "  {} [shape={shape}];", dot_quote(p.name(i)));
    }
    for (a, b) in p.covers() {
        let _ = writeln!(out, "  {} -> {};", dot_quote(p.name(a)), dot_quote(p.name(b)));
    }
    out.push_str("}\n");
    out
}

/// `stage	source	target` rows for the connecting maps of a chain of stages.
pub fn gamma_table(maps: &[MonotoneMap]) -> String {
    let mut out = String::from("stage\tsource\ttarget\n");
    for (k, g) in maps.iter().enumerate() {
        for (a, &b) in g.assign().iter().enumerate() {
            let _ = writeln!(out, "{k}\t{}\t{}", g.source().name(a), g.target().name(b));
        }
    }
    out
}
