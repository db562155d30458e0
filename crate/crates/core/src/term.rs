//! Lattice terms over named generators: parsing, evaluation in finite
//! posets, relative completeness, rank, and the word problem decided on a
//! finite stage of the approximation chain.

use std::collections::HashMap;
use std::fmt;

use crate::chain::{build_chain, ApproxChain};
use crate::error::{Error, Result};
use crate::poset::{ElemSet, FinitePoset};
use crate::spec::{BoundKind, Radius, Specification};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Gen(String),
    Join(Vec<Term>),
    Meet(Vec<Term>),
}

impl Term {
    /// Nesting depth of join and meet nodes.
    pub fn complexity(&self) -> usize {
        match self {
            Term::Gen(_) => 0,
            Term::Join(ts) | Term::Meet(ts) => 1 + ts.iter().map(Term::complexity).max().unwrap_or(0),
        }
    }

    /// Generator names in order of first appearance.
    pub fn generators(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.walk(&mut |g| {
            if !out.contains(&g) {
                out.push(g);
            }
        });
        out
    }

    fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a str)) {
        match self {
            Term::Gen(g) => visit(g),
            Term::Join(ts) | Term::Meet(ts) => ts.iter().for_each(|t| t.walk(visit)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, ts) = match self {
            Term::Gen(g) => return f.write_str(g),
            Term::Join(ts) => ("join", ts),
            Term::Meet(ts) => ("meet", ts),
        };
        write!(f, "{op}(")?;
        for (i, t) in ts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_term(s)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let len: usize = self.src[start..]
            .chars()
            .take_while(|&c| is_ident_char(c))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(match self.src[start..].chars().next() {
                Some(c) => self.error(format!("expected an identifier, found `{c}`")),
                None => self.error("expected an identifier, found end of input"),
            });
        }
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    fn term(&mut self) -> Result<Term> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let name = self.ident()?;
        let op = match name {
            "join" | "meet" if self.peek() == Some('(') => name,
            _ => return Ok(Term::Gen(name.to_string())),
        };
        self.expect('(')?;
        let mut children = vec![self.term()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            children.push(self.term()?);
        }
        self.expect(')')?;
        if children.len() < 2 {
            return Err(Error::Arity(start));
        }
        Ok(if op == "join" {
            Term::Join(children)
        } else {
            Term::Meet(children)
        })
    }
}

/// Parses `term := id | join(term, term, ...) | meet(term, term, ...)`.
/// Byte offsets in errors refer to `text`.
pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser { src: text, pos: 0 };
    let t = p.term()?;
    if let Some(c) = p.peek() {
        return Err(p.error(format!("unexpected `{c}` after the term")));
    }
    Ok(t)
}

/// The element a term evaluates to when every join and meet along the way
/// exists; `None` otherwise.
pub fn correspondent(t: &Term, q: &FinitePoset, assign: &dyn Fn(&str) -> Option<usize>) -> Result<Option<usize>> {
    match t {
        Term::Gen(g) => assign(g).map(Some).ok_or_else(|| Error::UnboundGenerator(g.clone())),
        Term::Join(ts) | Term::Meet(ts) => {
            let mut set = q.empty_set();
            let mut missing = false;
            for c in ts {
                match correspondent(c, q, assign)? {
                    Some(v) => set.insert(v),
                    None => missing = true,
                }
            }
            if missing {
                return Ok(None);
            }
            Ok(match t {
                Term::Join(_) => q.join_set(&set),
                _ => q.meet_set(&set),
            })
        }
    }
}

/// `C_0 = T`, `C_{j+1} = C_j` plus every existing join and meet of a
/// non-empty subset of `C_j`, up to the first repetition. `C_j` is the set
/// of correspondents of terms of complexity at most `j`.
pub fn term_closure(q: &FinitePoset, t: &ElemSet) -> Vec<ElemSet> {
    let mut levels = vec![t.clone()];
    loop {
        let cur = levels.last().expect("non-empty");
        let next = closure_step(q, cur);
        if next == *cur {
            return levels;
        }
        levels.push(next);
    }
}

fn closure_step(q: &FinitePoset, c: &ElemSet) -> ElemSet {
    let mut next = c.clone();
    for z in 0..q.len() {
        if c.contains(z) {
            continue;
        }
        // z is the join of some subset of C iff it is the join of C ∩ z↓
        let mut below = c.clone();
        below.intersect_with(q.down(z));
        let mut above = c.clone();
        above.intersect_with(q.up(z));
        if (!below.is_clear() && q.is_join_of(z, &below)) || (!above.is_clear() && q.is_meet_of(z, &above)) {
            next.insert(z);
        }
    }
    next
}

/// Least complexity of a term over `t` corresponding to `a`.
pub fn rank(q: &FinitePoset, t: &ElemSet, a: usize) -> Option<usize> {
    term_closure(q, t).iter().position(|c| c.contains(a))
}

/// [`rank`] for every element at once.
pub fn ranks(q: &FinitePoset, t: &ElemSet) -> Vec<Option<usize>> {
    let levels = term_closure(q, t);
    (0..q.len()).map(|a| levels.iter().position(|c| c.contains(a))).collect()
}

/// A subset of `C_level` lacking a join or meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessGap {
    pub level: usize,
    pub kind: BoundKind,
    pub subset: Vec<String>,
}

impl fmt::Display for CompletenessGap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            BoundKind::Join => "join",
            BoundKind::Meet => "meet",
        };
        write!(f, "{{{}}} has no {op} (level {})", self.subset.join(","), self.level)
    }
}

/// Whether every term over `t` of complexity below `k` has a correspondent.
pub fn is_k_complete(q: &FinitePoset, t: &ElemSet, k: Radius, limits: &Limits) -> Result<bool> {
    Ok(completeness_gap(q, t, k, limits)?.is_none())
}

/// The first obstruction to `k`-completeness relative to `t`, if any:
/// for `j < k - 1`, every non-empty subset of `C_j` needs a join and a meet.
pub fn completeness_gap(q: &FinitePoset, t: &ElemSet, k: Radius, limits: &Limits) -> Result<Option<CompletenessGap>> {
    if q.len() > limits.carrier {
        return Err(Error::size("completeness check", limits.carrier, q.len()));
    }
    let levels = match k {
        Radius::Finite(0) | Radius::Finite(1) => return Ok(None),
        Radius::Finite(k) => k - 1,
        Radius::Omega => usize::MAX,
    };
    let mut c = t.clone();
    for level in 0..levels {
        for kind in [BoundKind::Join, BoundKind::Meet] {
            if let Some(subset) = subset_without_bound(q, &c, kind) {
                return Ok(Some(CompletenessGap {
                    level,
                    kind,
                    subset: subset.iter().map(|&i| q.name(i).to_string()).collect(),
                }));
            }
        }
        let next = closure_step(q, &c);
        if next == c {
            break;
        }
        c = next;
    }
    Ok(None)
}

/// A non-empty subset of `g` with no bound of the given kind. Grows subsets
/// one generator at a time: `⋁(S ∪ {x}) = ⋁S ∨ x` whenever both exist.
fn subset_without_bound(q: &FinitePoset, g: &ElemSet, kind: BoundKind) -> Option<Vec<usize>> {
    let gens: Vec<usize> = g.ones().collect();
    let mut witness: HashMap<usize, Vec<usize>> = gens.iter().map(|&x| (x, vec![x])).collect();
    let mut queue = gens.clone();
    while let Some(j) = queue.pop() {
        for &x in &gens {
            let b = match kind {
                BoundKind::Join => q.join2(j, x),
                BoundKind::Meet => q.meet2(j, x),
            };
            let mut s = witness[&j].clone();
            if !s.contains(&x) {
                s.push(x);
            }
            match b {
                None => {
                    s.sort_unstable();
                    return Some(s);
                }
                Some(b) => {
                    if let std::collections::hash_map::Entry::Vacant(e) = witness.entry(b) {
                        e.insert(s);
                        queue.push(b);
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Below,
    Above,
    Equal,
    Incomparable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Below => "below",
            Verdict::Above => "above",
            Verdict::Equal => "equal",
            Verdict::Incomparable => "incomparable",
        })
    }
}

/// Outcome of comparing two terms in stage `stage` of the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAnswer {
    pub verdict: Verdict,
    pub stage: usize,
    pub lhs: usize,
    pub rhs: usize,
}

/// Evaluates a term over the base in stage `n`, with generators sent
/// along `γ_0n`.
pub fn evaluate_in_stage(chain: &ApproxChain, n: usize, t: &Term) -> Result<Option<usize>> {
    let g = chain.gamma_between(0, n);
    let base = chain.base().clone();
    correspondent(t, chain.stage(n), &|name| base.index_of(name).map(|p| g.apply(p)))
}

/// Compares `s` and `t` in stage `n` (at least their largest complexity).
pub fn compare_in_stage(chain: &ApproxChain, n: usize, s: &Term, t: &Term) -> Result<WordAnswer> {
    let eval = |x: &Term| -> Result<usize> {
        evaluate_in_stage(chain, n, x)?
            .ok_or_else(|| Error::PreconditionFailed(format!("`{x}` has no correspondent in stage {n}")))
    };
    let (a, b) = (eval(s)?, eval(t)?);
    let q = chain.stage(n);
    let verdict = match (q.leq(a, b), q.leq(b, a)) {
        (true, true) => Verdict::Equal,
        (true, false) => Verdict::Below,
        (false, true) => Verdict::Above,
        (false, false) => Verdict::Incomparable,
    };
    Ok(WordAnswer {
        verdict,
        stage: n,
        lhs: a,
        rhs: b,
    })
}

/// Decides how `s` and `t` compare in the lattice freely generated by the
/// base of `u` and `d` subject to their designated joins and meets.
pub fn decide_word_problem(
    u: &Specification,
    d: &Specification,
    s: &Term,
    t: &Term,
    limits: &Limits,
) -> Result<WordAnswer> {
    let base = u.base();
    for g in s.generators().into_iter().chain(t.generators()) {
        if base.index_of(g).is_none() {
            return Err(Error::UnboundGenerator(g.to_string()));
        }
    }
    let n = s.complexity().max(t.complexity());
    let chain = build_chain(u, d, n, limits)?;
    compare_in_stage(&chain, n, s, t)
}
