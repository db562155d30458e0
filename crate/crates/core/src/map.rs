use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::{ElemSet, FinitePoset};

/// An order-preserving map between two finite posets.
#[derive(Clone)]
pub struct MonotoneMap {
    source: Arc<FinitePoset>,
    target: Arc<FinitePoset>,
    assign: Vec<usize>,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .assign
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{}->{}", self.source.name(i), self.target.name(j)))
            .collect();
        f.debug_tuple("MonotoneMap").field(&pairs).finish()
    }
}

impl PartialEq for MonotoneMap {
    fn eq(&self, other: &Self) -> bool {
        self.assign == other.assign
            && same_poset(&self.source, &other.source)
            && same_poset(&self.target, &other.target)
    }
}

pub(crate) fn same_poset(a: &Arc<FinitePoset>, b: &Arc<FinitePoset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl MonotoneMap {
    pub fn new(source: Arc<FinitePoset>, target: Arc<FinitePoset>, assign: Vec<usize>) -> Result<Self> {
        if assign.len() != source.len() {
            return Err(Error::InvalidMap(format!(
                "map has {} values for a source of {} elements",
                assign.len(),
                source.len()
            )));
        }
        if let Some(&bad) = assign.iter().find(|&&j| j >= target.len()) {
            return Err(Error::InvalidMap(format!("target index {bad} out of range")));
        }
        let m = MonotoneMap {
            source,
            target,
            assign,
        };
        if let Some((a, b)) = m.monotonicity_violation() {
            return Err(Error::NotMonotone(
                m.source.name(a).to_string(),
                m.source.name(b).to_string(),
            ));
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(source: Arc<FinitePoset>, target: Arc<FinitePoset>, assign: Vec<usize>) -> Self {
        debug_assert_eq!(assign.len(), source.len());
        MonotoneMap {
            source,
            target,
            assign,
        }
    }

    /// Builds a map from `(source name, target name)` pairs; every source
    /// element must be assigned exactly once.
    pub fn from_names<S: AsRef<str>>(
        source: Arc<FinitePoset>,
        target: Arc<FinitePoset>,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut assign = vec![usize::MAX; source.len()];
        for (a, b) in pairs {
            let i = source.require(a.as_ref())?;
            let j = target.require(b.as_ref())?;
            if assign[i] != usize::MAX && assign[i] != j {
                return Err(Error::InvalidMap(format!("`{}` assigned twice", a.as_ref())));
            }
            assign[i] = j;
        }
        if let Some(i) = assign.iter().position(|&j| j == usize::MAX) {
            return Err(Error::InvalidMap(format!(
                "`{}` is not assigned",
                source.name(i)
            )));
        }
        Self::new(source, target, assign)
    }

    /// Maps each source element to the target element with the same name.
    pub fn by_name(source: Arc<FinitePoset>, target: Arc<FinitePoset>) -> Result<Self> {
        let assign = (0..source.len())
            .map(|i| target.require(source.name(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, assign)
    }

    pub fn identity(p: Arc<FinitePoset>) -> Self {
        let assign = (0..p.len()).collect();
        MonotoneMap {
            source: p.clone(),
            target: p,
            assign,
        }
    }

    pub fn source(&self) -> &Arc<FinitePoset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinitePoset> {
        &self.target
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.assign[i]
    }

    fn monotonicity_violation(&self) -> Option<(usize, usize)> {
        let n = self.source.len();
        for a in 0..n {
            for b in self.source.up(a).ones() {
                if !self.target.leq(self.assign[a], self.assign[b]) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `p <= q` iff `f(p) <= f(q)`.
    pub fn is_embedding(&self) -> bool {
        let n = self.source.len();
        (0..n).all(|a| {
            (0..n).all(|b| self.source.leq(a, b) == self.target.leq(self.assign[a], self.assign[b]))
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.target.empty_set();
        self.assign.iter().all(|&j| {
            let fresh = !seen.contains(j);
            seen.insert(j);
            fresh
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.image().count_ones(..) == self.target.len()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_embedding() && self.is_surjective()
    }

    pub fn image(&self) -> ElemSet {
        self.target.set_of(self.assign.iter().copied())
    }

    pub fn image_of(&self, s: &ElemSet) -> ElemSet {
        self.target.set_of(s.ones().map(|i| self.assign[i]))
    }

    pub fn preimage(&self, t: &ElemSet) -> ElemSet {
        self.source
            .set_of((0..self.source.len()).filter(|&i| t.contains(self.assign[i])))
    }

    /// `f⁻¹(q↑)`
    pub fn preimage_up(&self, q: usize) -> ElemSet {
        self.preimage(self.target.up(q))
    }

    /// `f⁻¹(q↓)`
    pub fn preimage_down(&self, q: usize) -> ElemSet {
        self.preimage(self.target.down(q))
    }

    /// `then ∘ self`
    pub fn then(&self, then: &MonotoneMap) -> Result<MonotoneMap> {
        if !same_poset(&self.target, &then.source) {
            return Err(Error::InvalidMap("composition of non-matching maps".into()));
        }
        Ok(MonotoneMap {
            source: self.source.clone(),
            target: then.target.clone(),
            assign: self.assign.iter().map(|&j| then.assign[j]).collect(),
        })
    }

    /// The same assignment viewed between the order duals.
    pub fn dual(&self) -> MonotoneMap {
        MonotoneMap {
            source: Arc::new(self.source.dual()),
            target: Arc::new(self.target.dual()),
            assign: self.assign.clone(),
        }
    }

    /// Same assignment, re-targeted at duals that the caller already built.
    pub fn dual_between(&self, source: Arc<FinitePoset>, target: Arc<FinitePoset>) -> MonotoneMap {
        debug_assert_eq!(source.len(), self.source.len());
        debug_assert_eq!(target.len(), self.target.len());
        MonotoneMap {
            source,
            target,
            assign: self.assign.clone(),
        }
    }

    /// Replaces source/target with structurally identical posets (used after renaming).
    pub fn rebased(&self, source: Arc<FinitePoset>, target: Arc<FinitePoset>) -> MonotoneMap {
        debug_assert_eq!(source.len(), self.source.len());
        debug_assert_eq!(target.len(), self.target.len());
        MonotoneMap {
            source,
            target,
            assign: self.assign.clone(),
        }
    }

    /// `f(⋁S) = ⋁f[S]` where `⋁S` exists in the source.
    pub fn preserves_join_of(&self, s: &ElemSet) -> bool {
        match self.source.join_set(s) {
            Some(j) => self.target.is_join_of(self.assign[j], &self.image_of(s)),
            None => true,
        }
    }

    pub fn preserves_meet_of(&self, s: &ElemSet) -> bool {
        match self.source.meet_set(s) {
            Some(m) => self.target.is_meet_of(self.assign[m], &self.image_of(s)),
            None => true,
        }
    }

    /// A pair `(z, a)` such that some `S` with `⋀S = z` (possibly empty) has
    /// `a` as a lower bound of `f[S]` while `a ≰ f(z)`.
    ///
    /// For fixed `z` and `a` the candidate sets lie inside
    /// `W = z↑ ∩ f⁻¹(a↑)`, and one of them has meet `z` iff `⋀W = z`.
    pub fn meet_preservation_failure(&self) -> Option<(usize, usize)> {
        for z in 0..self.source.len() {
            let fz = self.assign[z];
            let zu = self.source.up(z);
            for a in 0..self.target.len() {
                if self.target.leq(a, fz) {
                    continue;
                }
                let mut w = self.preimage_up(a);
                w.intersect_with(zu);
                if self.source.is_meet_of(z, &w) {
                    return Some((z, a));
                }
            }
        }
        None
    }

    pub fn join_preservation_failure(&self) -> Option<(usize, usize)> {
        for z in 0..self.source.len() {
            let fz = self.assign[z];
            let zd = self.source.down(z);
            for a in 0..self.target.len() {
                if self.target.leq(fz, a) {
                    continue;
                }
                let mut w = self.preimage_down(a);
                w.intersect_with(zd);
                if self.source.is_join_of(z, &w) {
                    return Some((z, a));
                }
            }
        }
        None
    }

    /// Preserves the meet of every subset of the source that has one, including `⋀∅`.
    pub fn is_completely_meet_preserving(&self) -> bool {
        self.meet_preservation_failure().is_none()
    }

    pub fn is_completely_join_preserving(&self) -> bool {
        self.join_preservation_failure().is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_order_reversal() {
        let c = Arc::new(FinitePoset::chain(&["a", "b"]).unwrap());
        let err = MonotoneMap::new(c.clone(), c.clone(), vec![1, 0]).unwrap_err();
        assert_eq!(err.code(), "NotMonotone");
    }

    #[test]
    fn composition_and_embedding() {
        let anti = Arc::new(FinitePoset::antichain(&["a", "b"]).unwrap());
        let chain = Arc::new(FinitePoset::chain(&["x", "y"]).unwrap());
        let f = MonotoneMap::new(anti.clone(), chain.clone(), vec![0, 1]).unwrap();
        assert!(!f.is_embedding());
        assert!(f.is_injective());
        let id = MonotoneMap::identity(chain.clone());
        assert_eq!(f.then(&id).unwrap(), f);
        assert!(id.is_isomorphism());
    }

    #[test]
    fn complete_preservation_matches_enumeration() {
        let d = Arc::new(
            FinitePoset::from_relations(
                &["bot", "a", "b", "top"],
                &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
            )
            .unwrap(),
        );
        let c3 = Arc::new(FinitePoset::chain(&["0", "1", "2"]).unwrap());
        // a ∧ b = bot is sent to 0 but f(a) = f(b) = 1
        let f = MonotoneMap::new(d.clone(), c3.clone(), vec![0, 1, 1, 2]).unwrap();
        assert!(!f.is_completely_meet_preserving());
        assert!(!f.is_completely_join_preserving());
        let g = MonotoneMap::new(d.clone(), c3.clone(), vec![0, 1, 1, 1]).unwrap();
        assert!(g.is_completely_meet_preserving() == brute_meets(&g));
        let id = MonotoneMap::identity(d);
        assert!(id.is_completely_meet_preserving() && id.is_completely_join_preserving());
        // top must go to top
        let h = MonotoneMap::new(c3.clone(), c3, vec![0, 1, 1]).unwrap();
        assert!(!h.is_completely_meet_preserving());
        assert!(brute_meets(&h) == h.is_completely_meet_preserving());
    }

    fn brute_meets(f: &MonotoneMap) -> bool {
        let n = f.source().len();
        (0u32..1 << n).all(|mask| {
            let s = f.source().set_of((0..n).filter(|i| mask >> i & 1 == 1));
            f.preserves_meet_of(&s)
        })
    }

    #[test]
    fn from_names_requires_totality() {
        let anti = Arc::new(FinitePoset::antichain(&["a", "b"]).unwrap());
        let err = MonotoneMap::from_names(anti.clone(), anti.clone(), &[("a", "a")]).unwrap_err();
        assert_eq!(err.code(), "InvalidMap");
        let ok = MonotoneMap::from_names(anti.clone(), anti, &[("a", "b"), ("b", "b")]).unwrap();
        assert_eq!(ok.assign(), &[1, 1]);
    }
}
