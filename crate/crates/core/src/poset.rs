//! Finite posets stored as dense up-set / down-set bit matrices.
//!
//! Elements are addressed by their index in declaration order; names are
//! only used at the edges (parsing, rendering). The reflexive-transitive
//! closure is computed once at construction so every order query is a bit
//! lookup.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::Limits;

/// A set of element indices of some poset.
pub type ElemSet = FixedBitSet;

#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    up: Vec<ElemSet>,
    down: Vec<ElemSet>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(a, b)| format!("{}<{}", self.names[a], self.names[b]))
            .collect();
        f.debug_struct("FinitePoset")
            .field("elements", &self.names)
            .field("covers", &covers)
            .finish()
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::DuplicateElement(n.clone()));
        }
    }
    Ok(index)
}

fn transpose(rows: &[ElemSet]) -> Vec<ElemSet> {
    let n = rows.len();
    let mut cols = vec![ElemSet::with_capacity(n); n];
    for (i, row) in rows.iter().enumerate() {
        for j in row.ones() {
            cols[j].insert(i);
        }
    }
    cols
}

/// Reflexive-transitive closure of a relation given as rows, Warshall style.
pub(crate) fn close_relation(rows: &mut [ElemSet]) {
    let n = rows.len();
    for (i, row) in rows.iter_mut().enumerate() {
        row.grow(n);
        row.insert(i);
    }
    for k in 0..n {
        let via = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&via);
            }
        }
    }
}

impl FinitePoset {
    /// Builds the poset generated by `pairs` (each `(a, b)` meaning `a <= b`).
    pub fn from_relations<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let n = names.len();
        let mut up = vec![ElemSet::with_capacity(n); n];
        for (a, b) in pairs {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownElement(a.as_ref().to_string()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownElement(b.as_ref().to_string()))?;
            up[ia].insert(ib);
        }
        Self::from_generating_rows(names, up)
    }

    /// Builds a poset from `names` and a generating relation given as a predicate.
    pub fn from_fn(names: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = names.len();
        let mut up = vec![ElemSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            for j in 0..n {
                if leq(i, j) {
                    row.insert(j);
                }
            }
        }
        Self::from_generating_rows(names, up)
    }

    fn from_generating_rows(names: Vec<String>, mut up: Vec<ElemSet>) -> Result<Self> {
        close_relation(&mut up);
        let n = names.len();
        for i in 0..n {
            for j in up[i].ones() {
                if j != i && up[j].contains(i) {
                    return Err(Error::Cycle(names[i].clone(), names[j].clone()));
                }
            }
        }
        let index = index_names(&names)?;
        let down = transpose(&up);
        Ok(FinitePoset {
            names,
            index,
            up,
            down,
        })
    }

    /// Trusted constructor: `up` must already be a partial order.
    pub(crate) fn from_up_sets_unchecked(names: Vec<String>, up: Vec<ElemSet>) -> Self {
        debug_assert_eq!(names.len(), up.len());
        let index = index_names(&names).expect("names are unique");
        let down = transpose(&up);
        FinitePoset {
            names,
            index,
            up,
            down,
        }
    }

    pub fn antichain<S: AsRef<str>>(elements: &[S]) -> Result<Self> {
        Self::from_relations(elements, &[])
    }

    pub fn chain<S: AsRef<str>>(elements: &[S]) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = elements
            .windows(2)
            .map(|w| (w[0].as_ref(), w[1].as_ref()))
            .collect();
        let names: Vec<&str> = elements.iter().map(|s| s.as_ref()).collect();
        Self::from_relations(&names, &pairs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// `a↑`
    pub fn up(&self, a: usize) -> &ElemSet {
        &self.up[a]
    }

    /// `a↓`
    pub fn down(&self, a: usize) -> &ElemSet {
        &self.down[a]
    }

    pub fn empty_set(&self) -> ElemSet {
        ElemSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> ElemSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set_of(&self, items: impl IntoIterator<Item = usize>) -> ElemSet {
        let mut s = self.empty_set();
        s.extend(items);
        s
    }

    pub fn set_of_names<S: AsRef<str>>(&self, names: &[S]) -> Result<ElemSet> {
        let mut s = self.empty_set();
        for n in names {
            s.insert(self.require(n.as_ref())?);
        }
        Ok(s)
    }

    /// Elements above every member of `s` (all elements when `s` is empty).
    pub fn upper_bounds(&self, s: &ElemSet) -> ElemSet {
        let mut ub = self.full_set();
        for i in s.ones() {
            ub.intersect_with(&self.up[i]);
        }
        ub
    }

    pub fn lower_bounds(&self, s: &ElemSet) -> ElemSet {
        let mut lb = self.full_set();
        for i in s.ones() {
            lb.intersect_with(&self.down[i]);
        }
        lb
    }

    /// The least member of `s`, if `s` has one.
    pub fn least_of(&self, s: &ElemSet) -> Option<usize> {
        s.ones().find(|&m| s.is_subset(&self.up[m]))
    }

    pub fn greatest_of(&self, s: &ElemSet) -> Option<usize> {
        s.ones().find(|&m| s.is_subset(&self.down[m]))
    }

    /// Least upper bound of `s`; for the empty set this is the bottom element.
    pub fn join_set(&self, s: &ElemSet) -> Option<usize> {
        self.least_of(&self.upper_bounds(s))
    }

    pub fn meet_set(&self, s: &ElemSet) -> Option<usize> {
        self.greatest_of(&self.lower_bounds(s))
    }

    pub fn join(&self, items: &[usize]) -> Option<usize> {
        self.join_set(&self.set_of(items.iter().copied()))
    }

    pub fn meet(&self, items: &[usize]) -> Option<usize> {
        self.meet_set(&self.set_of(items.iter().copied()))
    }

    pub fn join2(&self, a: usize, b: usize) -> Option<usize> {
        let mut ub = self.up[a].clone();
        ub.intersect_with(&self.up[b]);
        self.least_of(&ub)
    }

    pub fn meet2(&self, a: usize, b: usize) -> Option<usize> {
        let mut lb = self.down[a].clone();
        lb.intersect_with(&self.down[b]);
        self.greatest_of(&lb)
    }

    /// True when `z` is the join of `s` (assumes nothing about `s`).
    pub fn is_join_of(&self, z: usize, s: &ElemSet) -> bool {
        let ub = self.upper_bounds(s);
        ub.contains(z) && ub.is_subset(&self.up[z])
    }

    pub fn is_meet_of(&self, z: usize, s: &ElemSet) -> bool {
        let lb = self.lower_bounds(s);
        lb.contains(z) && lb.is_subset(&self.down[z])
    }

    pub fn top(&self) -> Option<usize> {
        self.greatest_of(&self.full_set())
    }

    pub fn bottom(&self) -> Option<usize> {
        self.least_of(&self.full_set())
    }

    pub fn is_bounded(&self) -> bool {
        self.top().is_some() && self.bottom().is_some()
    }

    /// Every pair has a join and a meet (the empty poset is not a lattice).
    pub fn is_lattice(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        (0..n).all(|a| (a + 1..n).all(|b| self.join2(a, b).is_some() && self.meet2(a, b).is_some()))
    }

    /// For finite posets: a non-empty lattice with top and bottom.
    pub fn is_complete_lattice(&self) -> bool {
        self.is_lattice() && self.is_bounded()
    }

    pub fn up_closure(&self, s: &ElemSet) -> ElemSet {
        let mut c = self.empty_set();
        for i in s.ones() {
            c.union_with(&self.up[i]);
        }
        c
    }

    pub fn down_closure(&self, s: &ElemSet) -> ElemSet {
        let mut c = self.empty_set();
        for i in s.ones() {
            c.union_with(&self.down[i]);
        }
        c
    }

    pub fn is_upset(&self, s: &ElemSet) -> bool {
        s.ones().all(|i| self.up[i].is_subset(s))
    }

    pub fn is_downset(&self, s: &ElemSet) -> bool {
        s.ones().all(|i| self.down[i].is_subset(s))
    }

    pub fn minimal(&self, s: &ElemSet) -> ElemSet {
        self.set_of(s.ones().filter(|&i| !s.ones().any(|j| self.lt(j, i))))
    }

    pub fn maximal(&self, s: &ElemSet) -> ElemSet {
        self.set_of(s.ones().filter(|&i| !s.ones().any(|j| self.lt(i, j))))
    }

    /// Covering pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in self.up[a].ones() {
                if a == b {
                    continue;
                }
                let mut between = self.up[a].clone();
                between.intersect_with(&self.down[b]);
                if between.count_ones(..) == 2 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Order dual: same carrier, reversed order.
    pub fn dual(&self) -> FinitePoset {
        FinitePoset {
            names: self.names.clone(),
            index: self.index.clone(),
            up: self.down.clone(),
            down: self.up.clone(),
        }
    }

    /// Renames every element; the order is untouched.
    pub fn renamed(&self, names: Vec<String>) -> Result<FinitePoset> {
        if names.len() != self.len() {
            return Err(Error::InvalidMap(format!(
                "expected {} names, got {}",
                self.len(),
                names.len()
            )));
        }
        let index = index_names(&names)?;
        Ok(FinitePoset {
            names,
            index,
            up: self.up.clone(),
            down: self.down.clone(),
        })
    }

    /// The induced sub-poset on `s`, plus the original index of each new element.
    pub fn restrict(&self, s: &ElemSet) -> (FinitePoset, Vec<usize>) {
        let keep: Vec<usize> = s.ones().collect();
        let names = keep.iter().map(|&i| self.names[i].clone()).collect();
        let m = keep.len();
        let up = keep
            .iter()
            .map(|&i| {
                let mut row = ElemSet::with_capacity(m);
                for (k, &j) in keep.iter().enumerate() {
                    if self.leq(i, j) {
                        row.insert(k);
                    }
                }
                row
            })
            .collect();
        (FinitePoset::from_up_sets_unchecked(names, up), keep)
    }

    /// Cartesian product with the componentwise order. Elements are named
    /// `(p,q,...)` and indexed in mixed radix, first factor most significant.
    pub fn product(factors: &[&FinitePoset]) -> Result<FinitePoset> {
        Self::product_with_limits(factors, &Limits::default())
    }

    pub fn product_with_limits(factors: &[&FinitePoset], limits: &Limits) -> Result<FinitePoset> {
        if factors.is_empty() {
            return Err(Error::InvalidSpecification(
                "product of an empty sequence".into(),
            ));
        }
        let dims: Vec<usize> = factors.iter().map(|p| p.len()).collect();
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if total > limits.carrier {
            return Err(Error::size("product carrier", limits.carrier, total));
        }
        let shape = ProductShape::new(dims);
        let names = (0..total)
            .map(|i| {
                let coords = shape.decode(i);
                let parts: Vec<&str> = coords
                    .iter()
                    .zip(factors)
                    .map(|(&c, p)| p.name(c))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let up = (0..total)
            .map(|i| {
                let ci = shape.decode(i);
                let mut row = ElemSet::with_capacity(total);
                for j in 0..total {
                    let cj = shape.decode(j);
                    if ci
                        .iter()
                        .zip(&cj)
                        .zip(factors)
                        .all(|((&a, &b), p)| p.leq(a, b))
                    {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        Ok(FinitePoset::from_up_sets_unchecked(names, up))
    }
}

/// Mixed-radix indexing of product carriers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductShape {
    dims: Vec<usize>,
}

impl ProductShape {
    pub fn new(dims: Vec<usize>) -> Self {
        ProductShape { dims }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn decode(&self, mut i: usize) -> Vec<usize> {
        let mut coords = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            coords[k] = i % d;
            i /= d;
        }
        coords
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &d)| acc * d + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> FinitePoset {
        FinitePoset::from_relations(
            &["bot", "a", "b", "top"],
            &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
        )
        .unwrap()
    }

    #[test]
    fn singleton_is_reflexive() {
        let p = FinitePoset::from_relations::<&str>(&["a"], &[]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.leq(0, 0));
    }

    #[test]
    fn transitivity_is_forced() {
        let p = FinitePoset::from_relations(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("b", "c"), ("c", "d")],
        )
        .unwrap();
        assert!(p.leq(0, 3));
        assert!(p.leq(1, 3));
        assert!(!p.comparable(0, 1));
    }

    #[test]
    fn cycles_are_rejected() {
        let err = FinitePoset::from_relations(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert_eq!(err.code(), "CycleError");
    }

    #[test]
    fn unknown_elements_are_rejected() {
        let err = FinitePoset::from_relations(&["a"], &[("a", "z")]).unwrap_err();
        assert_eq!(err, Error::UnknownElement("z".into()));
    }

    #[test]
    fn joins_and_meets() {
        let d = diamond();
        assert_eq!(d.join(&[1, 2]), Some(3));
        assert_eq!(d.meet(&[1, 2]), Some(0));
        assert_eq!(d.join(&[1]), Some(1));
        assert_eq!(d.join(&[]), Some(0));
        assert_eq!(d.meet(&[]), Some(3));
        let anti = FinitePoset::antichain(&["a", "b"]).unwrap();
        assert_eq!(anti.join(&[0, 1]), None);
        assert_eq!(anti.join(&[]), None);
    }

    #[test]
    fn dual_reverses_chains() {
        let c = FinitePoset::chain(&["a", "b", "c"]).unwrap();
        let d = c.dual();
        assert!(d.leq(2, 0));
        assert_eq!(d.dual(), c);
        let anti = FinitePoset::antichain(&["a", "b"]).unwrap();
        assert_eq!(anti.dual(), anti);
    }

    #[test]
    fn product_sizes_and_names() {
        let d = diamond();
        let p = FinitePoset::product(&[&d, &d]).unwrap();
        assert_eq!(p.len(), 16);
        assert_eq!(p.name(1), "(bot,a)");
        let single = FinitePoset::antichain(&["u"]).unwrap();
        let q = FinitePoset::product(&[&single, &d]).unwrap();
        assert_eq!(q.len(), 4);
        assert_eq!(q.covers().len(), 4);
    }

    #[test]
    fn product_respects_limit() {
        let d = diamond();
        let limits = Limits {
            carrier: 10,
            ..Limits::default()
        };
        let err = FinitePoset::product_with_limits(&[&d, &d], &limits).unwrap_err();
        assert_eq!(err.code(), "SizeLimit");
    }

    #[test]
    fn covers_of_diamond() {
        assert_eq!(diamond().covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn lattice_checks() {
        assert!(diamond().is_complete_lattice());
        assert!(!FinitePoset::antichain(&["a", "b"]).unwrap().is_lattice());
    }
}
