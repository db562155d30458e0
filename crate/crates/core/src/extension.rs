//! Order extensions, filter and ideal extensions, and the predicates on
//! maps that the rest of the crate is built from.
//!
//! An extension `e : P → Q` is a *meet-extension* when it is an order
//! embedding and every `q` is the meet of `e[e⁻¹(q↑)]`; join-extensions are
//! the dual notion.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;
use crate::poset::{ElemSet, FinitePoset};
use crate::spec::{BoundKind, Cardinal, Specification};
use crate::subsets::{check_budget, each_subset};
use crate::Limits;

/// A monotone map together with its verified extension properties.
#[derive(Clone)]
pub struct ExtensionMap {
    map: MonotoneMap,
    embedding: bool,
    meet: bool,
    join: bool,
}

impl fmt::Debug for ExtensionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionMap")
            .field("map", &self.map)
            .field("embedding", &self.embedding)
            .field("meet", &self.meet)
            .field("join", &self.join)
            .finish()
    }
}

pub fn is_meet_extension(e: &MonotoneMap) -> bool {
    e.is_embedding() && (0..e.target().len()).all(|q| e.target().is_meet_of(q, &e.image_of(&e.preimage_up(q))))
}

pub fn is_join_extension(e: &MonotoneMap) -> bool {
    e.is_embedding() && (0..e.target().len()).all(|q| e.target().is_join_of(q, &e.image_of(&e.preimage_down(q))))
}

impl ExtensionMap {
    pub fn new(map: MonotoneMap) -> Self {
        let embedding = map.is_embedding();
        let meet = embedding && is_meet_extension(&map);
        let join = embedding && is_join_extension(&map);
        ExtensionMap {
            map,
            embedding,
            meet,
            join,
        }
    }

    pub(crate) fn with_flags(map: MonotoneMap, meet: bool, join: bool) -> Self {
        debug_assert_eq!(meet, is_meet_extension(&map));
        debug_assert_eq!(join, is_join_extension(&map));
        ExtensionMap {
            map,
            embedding: true,
            meet,
            join,
        }
    }

    pub fn identity(p: Arc<FinitePoset>) -> Self {
        ExtensionMap {
            map: MonotoneMap::identity(p),
            embedding: true,
            meet: true,
            join: true,
        }
    }

    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    pub fn source(&self) -> &Arc<FinitePoset> {
        self.map.source()
    }

    pub fn target(&self) -> &Arc<FinitePoset> {
        self.map.target()
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.map.apply(p)
    }

    pub fn is_embedding(&self) -> bool {
        self.embedding
    }

    pub fn is_meet_extension(&self) -> bool {
        self.meet
    }

    pub fn is_join_extension(&self) -> bool {
        self.join
    }

    /// `e⁻¹(x↑)`
    pub fn upper_preimage(&self, x: usize) -> ElemSet {
        self.map.preimage_up(x)
    }

    /// `e⁻¹(x↓)`
    pub fn lower_preimage(&self, x: usize) -> ElemSet {
        self.map.preimage_down(x)
    }

    /// The same extension between order duals: meet- and join-flags swap.
    pub fn dual(&self) -> ExtensionMap {
        ExtensionMap {
            map: self.map.dual(),
            embedding: self.embedding,
            meet: self.join,
            join: self.meet,
        }
    }

    pub(crate) fn dual_between(&self, source: Arc<FinitePoset>, target: Arc<FinitePoset>) -> ExtensionMap {
        ExtensionMap {
            map: self.map.dual_between(source, target),
            embedding: self.embedding,
            meet: self.join,
            join: self.meet,
        }
    }

    pub(crate) fn require_meet(&self, what: &str) -> Result<()> {
        if self.meet {
            Ok(())
        } else {
            Err(Error::ExtensionKind(format!("{what} must be a meet-extension")))
        }
    }

    pub(crate) fn require_join(&self, what: &str) -> Result<()> {
        if self.join {
            Ok(())
        } else {
            Err(Error::ExtensionKind(format!("{what} must be a join-extension")))
        }
    }
}

/// An extension whose target elements are sets of base elements: filters
/// (ordered by reverse inclusion) or ideals (ordered by inclusion).
#[derive(Debug, Clone)]
pub struct SetExtension {
    pub extension: ExtensionMap,
    /// Carrier of the target, one base subset per target element.
    pub sets: Vec<ElemSet>,
    /// `Meet` for filter-like (upset) targets, `Join` for ideal-like ones.
    pub kind: BoundKind,
}

fn set_name(p: &FinitePoset, prefix: char, gens: &ElemSet) -> String {
    let names: Vec<&str> = gens.ones().map(|i| p.name(i)).collect();
    format!("{prefix}({})", names.join(","))
}

/// Smallest `D`-filter containing `s`.
pub fn generated_d_filter(d: &Specification, s: &ElemSet) -> Result<ElemSet> {
    if d.kind() != BoundKind::Meet {
        return Err(Error::InvalidSpecification("a meet-specification is required".into()));
    }
    Ok(d.closure(s))
}

/// Smallest `U`-ideal containing `s`.
pub fn generated_u_ideal(u: &Specification, s: &ElemSet) -> Result<ElemSet> {
    if u.kind() != BoundKind::Join {
        return Err(Error::InvalidSpecification("a join-specification is required".into()));
    }
    Ok(u.closure(s))
}

/// `P → X` where `X` holds the non-empty `D`-filters of `P` under reverse
/// inclusion and `p ↦ p↑`.
pub fn filter_extension(d: &Specification, limits: &Limits) -> Result<SetExtension> {
    if d.kind() != BoundKind::Meet {
        return Err(Error::InvalidSpecification("a meet-specification is required".into()));
    }
    let sets = d.enumerate_closed(limits)?;
    Ok(build_set_extension(d.base(), sets, BoundKind::Meet))
}

/// `P → Y` where `Y` holds the non-empty `U`-ideals of `P` under inclusion
/// and `p ↦ p↓`.
pub fn ideal_extension(u: &Specification, limits: &Limits) -> Result<SetExtension> {
    if u.kind() != BoundKind::Join {
        return Err(Error::InvalidSpecification("a join-specification is required".into()));
    }
    let sets = u.enumerate_closed(limits)?;
    Ok(build_set_extension(u.base(), sets, BoundKind::Join))
}

/// Extension onto an arbitrary standard collection of upsets (reverse inclusion).
pub fn upset_family_extension(p: &Arc<FinitePoset>, family: Vec<ElemSet>) -> Result<SetExtension> {
    family_extension(p, family, BoundKind::Meet)
}

/// Extension onto an arbitrary standard collection of downsets (inclusion).
pub fn downset_family_extension(p: &Arc<FinitePoset>, family: Vec<ElemSet>) -> Result<SetExtension> {
    family_extension(p, family, BoundKind::Join)
}

fn family_extension(p: &Arc<FinitePoset>, family: Vec<ElemSet>, kind: BoundKind) -> Result<SetExtension> {
    let mut sets: Vec<ElemSet> = Vec::with_capacity(family.len());
    for mut s in family {
        s.grow(p.len());
        let closed = match kind {
            BoundKind::Meet => p.is_upset(&s),
            BoundKind::Join => p.is_downset(&s),
        };
        if !closed {
            let names: Vec<&str> = s.ones().map(|i| p.name(i)).collect();
            return Err(Error::InvalidSpecification(format!(
                "{{{}}} is not an {}",
                names.join(" "),
                if kind == BoundKind::Meet { "upset" } else { "downset" }
            )));
        }
        if !sets.contains(&s) {
            sets.push(s);
        }
    }
    let mut ordered = Vec::with_capacity(sets.len());
    for x in 0..p.len() {
        let principal = match kind {
            BoundKind::Meet => p.up(x),
            BoundKind::Join => p.down(x),
        };
        match sets.iter().position(|s| s == principal) {
            Some(i) => ordered.push(sets.swap_remove(i)),
            None => return Err(Error::NotStandard(p.name(x).to_string())),
        }
    }
    sets.sort_by(|a, b| a.ones().cmp(b.ones()));
    ordered.extend(sets);
    Ok(build_set_extension(p, ordered, kind))
}

/// `sets` must start with the principal sets in element order.
fn build_set_extension(p: &Arc<FinitePoset>, sets: Vec<ElemSet>, kind: BoundKind) -> SetExtension {
    let m = sets.len();
    let (prefix, gens): (char, Box<dyn Fn(&ElemSet) -> ElemSet>) = match kind {
        BoundKind::Meet => ('F', Box::new(|s: &ElemSet| p.minimal(s))),
        BoundKind::Join => ('I', Box::new(|s: &ElemSet| p.maximal(s))),
    };
    let names: Vec<String> = sets.iter().map(|s| set_name(p, prefix, &gens(s))).collect();
    let up: Vec<ElemSet> = (0..m)
        .map(|a| {
            let mut row = ElemSet::with_capacity(m);
            for b in 0..m {
                let le = match kind {
                    BoundKind::Meet => sets[b].is_subset(&sets[a]),
                    BoundKind::Join => sets[a].is_subset(&sets[b]),
                };
                if le {
                    row.insert(b);
                }
            }
            row
        })
        .collect();
    let target = Arc::new(FinitePoset::from_up_sets_unchecked(names, up));
    let assign: Vec<usize> = (0..p.len()).collect();
    let map = MonotoneMap::new_unchecked(p.clone(), target, assign);
    let (meet, join) = match kind {
        BoundKind::Meet => (true, is_join_extension(&map)),
        BoundKind::Join => (is_meet_extension(&map), true),
    };
    SetExtension {
        extension: ExtensionMap::with_flags(map, meet, join),
        sets,
        kind,
    }
}

/// Every non-empty upset of `p`, principal ones first.
pub fn nonempty_upsets(p: &FinitePoset, limits: &Limits) -> Result<Vec<ElemSet>> {
    Specification::trivial(Arc::new(p.clone()), BoundKind::Meet).enumerate_closed(limits)
}

/// Every non-empty downset of `p`, principal ones first.
pub fn nonempty_downsets(p: &FinitePoset, limits: &Limits) -> Result<Vec<ElemSet>> {
    Specification::trivial(Arc::new(p.clone()), BoundKind::Join).enumerate_closed(limits)
}

/// Preserves every designated join of `u` and meet of `d`.
pub fn is_ud_morphism(f: &MonotoneMap, u: &Specification, d: &Specification) -> bool {
    u.is_preserved_by(f) && d.is_preserved_by(f)
}

/// Preserves every meet in `d` (and nothing is asked of joins).
pub fn preserves(f: &MonotoneMap, spec: &Specification) -> bool {
    spec.is_preserved_by(f)
}

/// Every target element is the meet of the image of fewer than `alpha` base elements.
pub fn is_alpha_supported(e: &ExtensionMap, alpha: Cardinal, limits: &Limits) -> Result<bool> {
    e.require_meet("the extension")?;
    supported(e, alpha, BoundKind::Meet, limits)
}

/// Dual of [`is_alpha_supported`] for join-extensions.
pub fn is_alpha_supported_join(e: &ExtensionMap, beta: Cardinal, limits: &Limits) -> Result<bool> {
    e.require_join("the extension")?;
    supported(e, beta, BoundKind::Join, limits)
}

fn supported(e: &ExtensionMap, alpha: Cardinal, kind: BoundKind, limits: &Limits) -> Result<bool> {
    let target = e.target();
    if alpha.is_infinite() {
        // the full preimage always works for a meet-extension of a finite poset
        return Ok(true);
    }
    let Some(max) = alpha.max_size(e.source().len()) else {
        return Ok(target.is_empty());
    };
    for x in 0..target.len() {
        let pre = match kind {
            BoundKind::Meet => e.upper_preimage(x),
            BoundKind::Join => e.lower_preimage(x),
        };
        let items: Vec<usize> = pre.ones().collect();
        check_budget("support search", items.len(), max, limits)?;
        let found = !each_subset(&items, max, |s| {
            let img = target.set_of(s.iter().map(|&p| e.apply(p)));
            let hit = match kind {
                BoundKind::Meet => target.is_meet_of(x, &img),
                BoundKind::Join => target.is_join_of(x, &img),
            };
            !hit
        });
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn antichain(n: usize) -> Arc<FinitePoset> {
        let names: Vec<String> = ["a", "b", "c", "d"][..n].iter().map(|s| s.to_string()).collect();
        Arc::new(FinitePoset::antichain(&names).unwrap())
    }

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
    fn identity_is_both() {
        let d = diamond();
        let e = ExtensionMap::new(MonotoneMap::identity(d));
        assert!(e.is_meet_extension() && e.is_join_extension());
    }

    #[test]
    fn antichain_into_diamond_middles_is_both() {
        // bottom = a ∧ b and top = ⋀∅, dually for joins
        let a = antichain(2);
        let d = diamond();
        let e = MonotoneMap::new(a, d, vec![1, 2]).unwrap();
        assert!(is_meet_extension(&e));
        assert!(is_join_extension(&e));
    }

    #[test]
    fn skipping_a_chain_element_is_neither() {
        let two = Arc::new(FinitePoset::chain(&["a", "b"]).unwrap());
        let three = Arc::new(FinitePoset::chain(&["a", "m", "b"]).unwrap());
        let e = MonotoneMap::new(two, three, vec![0, 2]).unwrap();
        assert!(e.is_embedding());
        assert!(!is_meet_extension(&e));
        assert!(!is_join_extension(&e));
    }

    #[test]
    fn principal_and_trivial_filters() {
        let a = antichain(2);
        let d = Specification::trivial(a.clone(), BoundKind::Meet);
        assert_eq!(generated_d_filter(&d, &a.set_of([0])).unwrap(), a.set_of([0]));
        assert_eq!(generated_d_filter(&d, &a.full_set()).unwrap(), a.full_set());
    }

    #[test]
    fn filter_extension_of_antichains() {
        let l = Limits::default();
        let a2 = antichain(2);
        let x = filter_extension(&Specification::trivial(a2.clone(), BoundKind::Meet), &l).unwrap();
        assert_eq!(x.sets.len(), 3);
        let t = x.extension.target();
        assert_eq!(t.bottom(), Some(2));
        assert_eq!(t.name(2), "F(a,b)");
        assert!(x.extension.is_meet_extension());
        let a3 = antichain(3);
        let x3 = filter_extension(&Specification::trivial(a3, BoundKind::Meet), &l).unwrap();
        assert_eq!(x3.sets.len(), 7);
        assert!(!is_alpha_supported(&x3.extension, Cardinal::Finite(2), &l).unwrap());
        assert!(is_alpha_supported(&x3.extension, Cardinal::Finite(4), &l).unwrap());
        assert!(is_alpha_supported(&x3.extension, Cardinal::Omega, &l).unwrap());
    }

    #[test]
    fn filters_of_a_chain_are_principal() {
        let c = Arc::new(FinitePoset::chain(&["a", "b"]).unwrap());
        let x = filter_extension(&Specification::trivial(c.clone(), BoundKind::Meet), &Limits::default()).unwrap();
        assert_eq!(x.sets.len(), 2);
        assert!(x.extension.map().is_isomorphism());
    }

    #[test]
    fn ideal_extension_is_join_extension() {
        let a2 = antichain(2);
        let y = ideal_extension(&Specification::trivial(a2, BoundKind::Join), &Limits::default()).unwrap();
        assert_eq!(y.sets.len(), 3);
        assert!(y.extension.is_join_extension());
        assert_eq!(y.extension.target().top(), Some(2));
    }

    #[test]
    fn nonstandard_family_is_rejected() {
        let a2 = antichain(2);
        let err = upset_family_extension(&a2, vec![a2.set_of([0])]).unwrap_err();
        assert_eq!(err, Error::NotStandard("b".into()));
    }

    #[test]
    fn constant_map_is_ud_morphism() {
        let d = diamond();
        let one = Arc::new(FinitePoset::antichain(&["z"]).unwrap());
        let f = MonotoneMap::new(d.clone(), one, vec![0; 4]).unwrap();
        let u = Specification::explicit(d.clone(), BoundKind::Join, vec![d.set_of([1, 2])]).unwrap();
        let dd = Specification::trivial(d, BoundKind::Meet);
        assert!(is_ud_morphism(&f, &u, &dd));
    }

    #[test]
    fn identity_supported_by_singletons() {
        let d = diamond();
        let e = ExtensionMap::identity(d);
        assert!(is_alpha_supported(&e, Cardinal::Finite(2), &Limits::default()).unwrap());
    }
}
