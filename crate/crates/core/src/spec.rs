//! Join- and meet-specifications: designated families of subsets whose
//! bounds a map or construction must respect.
//!
//! Besides explicit lists of subsets, two schematic families are supported
//! so that exponentially large families never have to be materialized:
//! "every non-empty subset of `G` whose bound exists" and "every non-empty
//! finite subset of `G`" (the latter requires all those bounds to exist).
//!
//! Both schematic forms are handled with the same observation: if
//! `z = ⋁S` for some `S ⊆ W ⊆ z↓`, then `z = ⋁W`. So asking whether some
//! member inside a set `C` has join `z` reduces to one join computation.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;
use crate::poset::{ElemSet, FinitePoset};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Join,
    Meet,
}

impl BoundKind {
    pub fn flip(self) -> Self {
        match self {
            BoundKind::Join => BoundKind::Meet,
            BoundKind::Meet => BoundKind::Join,
        }
    }
}

/// Size bound of a specification: the least cardinal exceeding every member's size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radius {
    Finite(usize),
    Omega,
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(n) => write!(f, "{n}"),
            Radius::Omega => f.write_str("omega"),
        }
    }
}

/// Cardinal parameter for support, continuity and preservation checks.
/// On finite carriers `Omega` and `Infinity` both admit every subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinal {
    Finite(usize),
    Omega,
    Infinity,
}

impl Cardinal {
    /// `size < self`
    pub fn admits(self, size: usize) -> bool {
        match self {
            Cardinal::Finite(n) => size < n,
            Cardinal::Omega | Cardinal::Infinity => true,
        }
    }

    pub fn is_infinite(self) -> bool {
        !matches!(self, Cardinal::Finite(_))
    }

    /// Largest admitted subset size, capped at `n`.
    pub fn max_size(self, n: usize) -> Option<usize> {
        match self {
            Cardinal::Finite(0) => None,
            Cardinal::Finite(k) => Some((k - 1).min(n)),
            _ => Some(n),
        }
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinal::Finite(n) => write!(f, "{n}"),
            Cardinal::Omega => f.write_str("omega"),
            Cardinal::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Cardinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" | "w" => Ok(Cardinal::Omega),
            "inf" | "infinity" => Ok(Cardinal::Infinity),
            _ => s
                .parse::<usize>()
                .map(Cardinal::Finite)
                .map_err(|_| Error::UnsupportedCardinal(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Listed members. Singletons are implicit and never stored.
    Explicit(Vec<ElemSet>),
    /// Every non-empty subset of the generator set whose bound exists.
    Defined(ElemSet),
    /// Every non-empty finite subset of the generator set; all bounds exist.
    FiniteSubsets(ElemSet),
}

#[derive(Debug, Clone)]
pub struct Specification {
    base: Arc<FinitePoset>,
    kind: BoundKind,
    family: Family,
}

impl Specification {
    /// Only the singletons.
    pub fn trivial(base: Arc<FinitePoset>, kind: BoundKind) -> Self {
        Specification {
            base,
            kind,
            family: Family::Explicit(Vec::new()),
        }
    }

    pub fn explicit(base: Arc<FinitePoset>, kind: BoundKind, sets: Vec<ElemSet>) -> Result<Self> {
        let mut members: Vec<ElemSet> = Vec::new();
        for mut s in sets {
            s.grow(base.len());
            let bound = match kind {
                BoundKind::Join => base.join_set(&s),
                BoundKind::Meet => base.meet_set(&s),
            };
            if bound.is_none() {
                let names: Vec<&str> = s.ones().map(|i| base.name(i)).collect();
                return Err(Error::InvalidSpecification(format!(
                    "{{{}}} has no {}",
                    names.join(" "),
                    if kind == BoundKind::Join { "join" } else { "meet" }
                )));
            }
            if s.count_ones(..) != 1 && !members.contains(&s) {
                members.push(s);
            }
        }
        members.sort_by(|a, b| a.ones().cmp(b.ones()));
        Ok(Specification {
            base,
            kind,
            family: Family::Explicit(members),
        })
    }

    /// All non-empty subsets of `base` whose bound exists.
    pub fn all_defined(base: Arc<FinitePoset>, kind: BoundKind) -> Self {
        let g = base.full_set();
        Specification {
            base,
            kind,
            family: Family::Defined(g),
        }
    }

    /// All non-empty finite subsets of `generators`; fails if one of them lacks a bound.
    pub fn finite_subsets(base: Arc<FinitePoset>, kind: BoundKind, generators: ElemSet) -> Result<Self> {
        let spec = Specification {
            base,
            kind,
            family: Family::FiniteSubsets(generators),
        };
        if let Family::FiniteSubsets(g) = &spec.family {
            if spec.subset_bounds(g).is_none() {
                return Err(Error::InvalidSpecification(
                    "some finite subset of the generators has no bound".into(),
                ));
            }
        }
        Ok(spec)
    }

    pub(crate) fn finite_subsets_unchecked(base: Arc<FinitePoset>, kind: BoundKind, generators: ElemSet) -> Self {
        Specification {
            base,
            kind,
            family: Family::FiniteSubsets(generators),
        }
    }

    pub fn base(&self) -> &Arc<FinitePoset> {
        &self.base
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    fn bound(&self, s: &ElemSet) -> Option<usize> {
        match self.kind {
            BoundKind::Join => self.base.join_set(s),
            BoundKind::Meet => self.base.meet_set(s),
        }
    }

    fn is_bound_of(&self, z: usize, s: &ElemSet) -> bool {
        match self.kind {
            BoundKind::Join => self.base.is_join_of(z, s),
            BoundKind::Meet => self.base.is_meet_of(z, s),
        }
    }

    /// `z↓` for joins, `z↑` for meets.
    fn toward(&self, z: usize) -> &ElemSet {
        match self.kind {
            BoundKind::Join => self.base.down(z),
            BoundKind::Meet => self.base.up(z),
        }
    }

    fn close_toward(&self, s: &ElemSet) -> ElemSet {
        match self.kind {
            BoundKind::Join => self.base.down_closure(s),
            BoundKind::Meet => self.base.up_closure(s),
        }
    }

    /// All bounds of non-empty subsets of `g`, or `None` if some subset lacks one.
    /// Uses `⋁(T ∪ {g}) = ⋁{⋁T, g}` to avoid enumerating subsets.
    fn subset_bounds(&self, g: &ElemSet) -> Option<ElemSet> {
        let gens: Vec<usize> = g.ones().collect();
        let mut reached = g.clone();
        let mut queue: Vec<usize> = gens.clone();
        while let Some(j) = queue.pop() {
            for &x in &gens {
                let b = match self.kind {
                    BoundKind::Join => self.base.join2(j, x),
                    BoundKind::Meet => self.base.meet2(j, x),
                }?;
                if !reached.contains(b) {
                    reached.insert(b);
                    queue.push(b);
                }
            }
        }
        Some(reached)
    }

    pub fn radius(&self) -> Radius {
        let singleton = usize::from(!self.base.is_empty());
        match &self.family {
            Family::Explicit(sets) => {
                let m = sets
                    .iter()
                    .map(|s| s.count_ones(..))
                    .max()
                    .unwrap_or(0)
                    .max(singleton);
                Radius::Finite(m + 1)
            }
            Family::Defined(g) => {
                let mut m = singleton;
                for z in 0..self.base.len() {
                    let mut w = g.clone();
                    w.intersect_with(self.toward(z));
                    if !w.is_clear() && self.is_bound_of(z, &w) {
                        m = m.max(w.count_ones(..));
                    }
                }
                Radius::Finite(m + 1)
            }
            Family::FiniteSubsets(_) => Radius::Omega,
        }
    }

    /// Membership of `s` in the family (singletons always belong).
    pub fn contains(&self, s: &ElemSet) -> bool {
        if s.count_ones(..) == 1 {
            return true;
        }
        match &self.family {
            Family::Explicit(sets) => sets.iter().any(|m| m == s),
            Family::Defined(g) => !s.is_clear() && s.is_subset(g) && self.bound(s).is_some(),
            Family::FiniteSubsets(g) => !s.is_clear() && s.is_subset(g),
        }
    }

    /// The same family read as a specification of the order dual.
    pub fn to_dual(&self, dual_base: Arc<FinitePoset>) -> Specification {
        debug_assert_eq!(dual_base.len(), self.base.len());
        Specification {
            base: dual_base,
            kind: self.kind.flip(),
            family: self.family.clone(),
        }
    }

    /// Least set closed in the direction of the specification (down for
    /// joins, up for meets) that contains `seed` and the bound of every
    /// member it contains: the generated ideal (joins) or filter (meets).
    pub fn closure(&self, seed: &ElemSet) -> ElemSet {
        let mut c = self.close_toward(seed);
        loop {
            let mut changed = false;
            match &self.family {
                Family::Explicit(sets) => {
                    for s in sets {
                        if s.is_subset(&c) {
                            let b = self.bound(s).expect("validated member");
                            if !c.contains(b) {
                                c.union_with(self.toward(b));
                                changed = true;
                            }
                        }
                    }
                }
                Family::Defined(g) | Family::FiniteSubsets(g) => {
                    let mut inside = g.clone();
                    inside.intersect_with(&c);
                    for z in 0..self.base.len() {
                        if c.contains(z) {
                            continue;
                        }
                        let mut w = inside.clone();
                        w.intersect_with(self.toward(z));
                        if !w.is_clear() && self.is_bound_of(z, &w) {
                            c.union_with(self.toward(z));
                            inside.union_with(&{
                                let mut t = g.clone();
                                t.intersect_with(self.toward(z));
                                t
                            });
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return c;
            }
        }
    }

    pub fn is_closed(&self, s: &ElemSet) -> bool {
        self.closure(s) == *s
    }

    /// Every non-empty closed set, principal ones first (in element order),
    /// the rest sorted by their element lists.
    pub fn enumerate_closed(&self, limits: &Limits) -> Result<Vec<ElemSet>> {
        use std::collections::HashSet;
        let n = self.base.len();
        let mut seen: HashSet<ElemSet> = HashSet::new();
        let mut principal = Vec::with_capacity(n);
        let mut queue = Vec::new();
        for p in 0..n {
            let c = self.toward(p).clone();
            if seen.insert(c.clone()) {
                principal.push(c.clone());
                queue.push(c);
            }
        }
        let mut others = Vec::new();
        while let Some(c) = queue.pop() {
            for p in 0..n {
                if c.contains(p) {
                    continue;
                }
                let mut seed = c.clone();
                seed.insert(p);
                let next = self.closure(&seed);
                if !seen.contains(&next) {
                    if seen.len() >= limits.closed_sets {
                        return Err(Error::size("closed set enumeration", limits.closed_sets, seen.len() + 1));
                    }
                    seen.insert(next.clone());
                    others.push(next.clone());
                    queue.push(next);
                }
            }
        }
        others.sort_by(|a, b| a.ones().cmp(b.ones()));
        principal.extend(others);
        Ok(principal)
    }

    /// `f(⋁S) = ⋁f[S]` for every member `S` (dually for meets).
    pub fn is_preserved_by(&self, f: &MonotoneMap) -> bool {
        debug_assert!(crate::map::same_poset(f.source(), &self.base));
        let target = f.target();
        match &self.family {
            Family::Explicit(sets) => sets.iter().all(|s| match self.kind {
                BoundKind::Join => f.preserves_join_of(s),
                BoundKind::Meet => f.preserves_meet_of(s),
            }),
            Family::Defined(g) | Family::FiniteSubsets(g) => {
                // Fails iff some member S with bound z has an image bound u
                // (u ≥ f[S] for joins) with f(z) ≰ u. For fixed z, u the
                // candidate members live in W = G ∩ z↓ ∩ f⁻¹(u↓), and one
                // exists iff z = ⋁W.
                for z in 0..self.base.len() {
                    let mut gz = g.clone();
                    gz.intersect_with(self.toward(z));
                    if gz.is_clear() {
                        continue;
                    }
                    let fz = f.apply(z);
                    for u in 0..target.len() {
                        let bad = match self.kind {
                            BoundKind::Join => !target.leq(fz, u),
                            BoundKind::Meet => !target.leq(u, fz),
                        };
                        if !bad {
                            continue;
                        }
                        let mut w = gz.clone();
                        let pre = match self.kind {
                            BoundKind::Join => f.preimage_down(u),
                            BoundKind::Meet => f.preimage_up(u),
                        };
                        w.intersect_with(&pre);
                        if !w.is_clear() && self.is_bound_of(z, &w) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Members listed explicitly, or every member for schematic families
    /// (enumerated; fails past the subset cap).
    pub fn members(&self, limits: &Limits) -> Result<Vec<ElemSet>> {
        let n = self.base.len();
        let mut out: Vec<ElemSet> = (0..n).map(|p| self.base.set_of([p])).collect();
        match &self.family {
            Family::Explicit(sets) => out.extend(sets.iter().cloned()),
            Family::Defined(g) | Family::FiniteSubsets(g) => {
                let gens: Vec<usize> = g.ones().collect();
                if gens.len() > limits.subsets {
                    return Err(Error::size("subset enumeration", limits.subsets, gens.len()));
                }
                for mask in 1u64..(1u64 << gens.len()) {
                    if mask.count_ones() < 2 {
                        continue;
                    }
                    let s = self.base.set_of(
                        gens.iter()
                            .enumerate()
                            .filter(|(k, _)| mask >> k & 1 == 1)
                            .map(|(_, &p)| p),
                    );
                    if self.bound(&s).is_some() {
                        out.push(s);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Arc<FinitePoset> {
        Arc::new(
            FinitePoset::from_relations(
                &["bot", "a", "b", "top"],
                &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
            )
            .unwrap(),
        )
    }

    #[test]
    fn explicit_members_need_bounds() {
        let anti = Arc::new(FinitePoset::antichain(&["a", "b"]).unwrap());
        let s = anti.full_set();
        let err = Specification::explicit(anti.clone(), BoundKind::Join, vec![s]).unwrap_err();
        assert_eq!(err.code(), "InvalidSpecification");
        // the empty join needs a bottom
        let err = Specification::explicit(anti, BoundKind::Join, vec![ElemSet::with_capacity(2)]).unwrap_err();
        assert_eq!(err.code(), "InvalidSpecification");
        let d = diamond();
        let ok = Specification::explicit(d, BoundKind::Join, vec![ElemSet::with_capacity(4)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn radius_counts_largest_member() {
        let d = diamond();
        let trivial = Specification::trivial(d.clone(), BoundKind::Join);
        assert_eq!(trivial.radius(), Radius::Finite(2));
        let ab = d.set_of([1, 2]);
        let u = Specification::explicit(d.clone(), BoundKind::Join, vec![ab]).unwrap();
        assert_eq!(u.radius(), Radius::Finite(3));
        // every subset of the diamond has a join; the largest is the whole carrier
        assert_eq!(Specification::all_defined(d.clone(), BoundKind::Join).radius(), Radius::Finite(5));
        let fs = Specification::finite_subsets(d.clone(), BoundKind::Join, d.full_set()).unwrap();
        assert_eq!(fs.radius(), Radius::Omega);
    }

    #[test]
    fn finite_subsets_require_all_bounds() {
        let anti = Arc::new(FinitePoset::antichain(&["a", "b"]).unwrap());
        let g = anti.full_set();
        assert!(Specification::finite_subsets(anti, BoundKind::Join, g).is_err());
    }

    #[test]
    fn closure_adds_designated_joins() {
        let d = diamond();
        let ab = d.set_of([1, 2]);
        let u = Specification::explicit(d.clone(), BoundKind::Join, vec![ab.clone()]).unwrap();
        assert_eq!(u.closure(&ab), d.full_set());
        let trivial = Specification::trivial(d.clone(), BoundKind::Join);
        assert_eq!(trivial.closure(&ab), d.set_of([0, 1, 2]));
        let all = Specification::all_defined(d.clone(), BoundKind::Join);
        assert_eq!(all.closure(&ab), d.full_set());
    }

    #[test]
    fn cardinal_parsing() {
        assert_eq!("omega".parse::<Cardinal>().unwrap(), Cardinal::Omega);
        assert_eq!("3".parse::<Cardinal>().unwrap(), Cardinal::Finite(3));
        assert!("aleph1".parse::<Cardinal>().is_err());
        assert!(Cardinal::Finite(2).admits(1));
        assert!(!Cardinal::Finite(2).admits(2));
    }
}
