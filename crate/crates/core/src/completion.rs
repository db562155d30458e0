//! MacNeille completions and canonical extensions.

use std::collections::HashSet;
use std::sync::Arc;

use crate::amalgamation::{canonical_amalgamation_with, Amalgamation, Origin};
use crate::error::{Error, Result};
use crate::extension::{downset_family_extension, upset_family_extension, ExtensionMap, SetExtension};
use crate::map::{same_poset, MonotoneMap};
use crate::poset::{ElemSet, FinitePoset};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    MacNeille,
    Canonical,
}

/// An extension into a complete lattice.
#[derive(Debug, Clone)]
pub struct Completion {
    pub extension: ExtensionMap,
    pub provenance: Provenance,
}

impl Completion {
    pub fn target(&self) -> &Arc<FinitePoset> {
        self.extension.target()
    }

    pub fn map(&self) -> &MonotoneMap {
        self.extension.map()
    }
}

/// Completion by cuts: the sets `S = lb(ub(S))`, ordered by inclusion,
/// with `p ↦ p↓`. Principal cuts keep the name of their element; the
/// others are named `cut(...)` after their maximal elements.
pub fn macneille(p: &Arc<FinitePoset>, limits: &Limits) -> Result<Completion> {
    let n = p.len();
    // cuts are exactly the intersections of principal downsets, the empty
    // intersection being the whole carrier
    let mut seen: HashSet<ElemSet> = HashSet::new();
    let mut principal = Vec::with_capacity(n);
    for x in 0..n {
        let d = p.down(x).clone();
        seen.insert(d.clone());
        principal.push(d);
    }
    let mut others = Vec::new();
    let full = p.full_set();
    if seen.insert(full.clone()) {
        others.push(full);
    }
    let mut frontier: Vec<ElemSet> = seen.iter().cloned().collect();
    frontier.sort_by(|a, b| a.ones().cmp(b.ones()));
    while let Some(c) = frontier.pop() {
        for x in 0..n {
            let mut next = c.clone();
            next.intersect_with(p.down(x));
            if next != c && !seen.contains(&next) {
                if seen.len() >= limits.closed_sets.min(limits.carrier) {
                    return Err(Error::size("MacNeille cuts", limits.closed_sets.min(limits.carrier), seen.len() + 1));
                }
                seen.insert(next.clone());
                others.push(next.clone());
                frontier.push(next);
            }
        }
    }
    others.sort_by(|a, b| a.ones().cmp(b.ones()));
    let mut cuts = principal;
    cuts.extend(others);
    let m = cuts.len();
    let names: Vec<String> = cuts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i < n {
                p.name(i).to_string()
            } else {
                let tops: Vec<&str> = p.maximal(c).ones().map(|j| p.name(j)).collect();
                format!("cut({})", tops.join(","))
            }
        })
        .collect();
    let names = disambiguate(names);
    let up = (0..m)
        .map(|a| {
            let mut row = ElemSet::with_capacity(m);
            row.extend((0..m).filter(|&b| cuts[a].is_subset(&cuts[b])));
            row
        })
        .collect();
    let target = Arc::new(FinitePoset::from_up_sets_unchecked(names, up));
    let map = MonotoneMap::new_unchecked(p.clone(), target, (0..n).collect());
    Ok(Completion {
        extension: ExtensionMap::with_flags(map, true, true),
        provenance: Provenance::MacNeille,
    })
}

/// Appends `'` to names that collide with an earlier one.
pub(crate) fn disambiguate(names: Vec<String>) -> Vec<String> {
    let mut used: HashSet<String> = HashSet::with_capacity(names.len());
    names
        .into_iter()
        .map(|mut s| {
            while used.contains(&s) {
                s.push('\'');
            }
            used.insert(s.clone());
            s
        })
        .collect()
}

/// A canonical extension together with the pieces it was assembled from.
#[derive(Debug, Clone)]
pub struct CanonicalExtension {
    pub completion: Completion,
    pub filters: SetExtension,
    pub ideals: SetExtension,
    pub amalgamation: Amalgamation,
    /// `F ↦ ⋀e[F]`
    pub pi_filters: MonotoneMap,
    /// `I ↦ ⋁e[I]`
    pub pi_ideals: MonotoneMap,
}

/// Canonical extension of `p` with respect to standard families of upsets
/// and downsets, built as the MacNeille completion of the canonical
/// amalgamation of the two set extensions.
pub fn canonical_extension(
    p: &Arc<FinitePoset>,
    filters: Vec<ElemSet>,
    ideals: Vec<ElemSet>,
    limits: &Limits,
) -> Result<CanonicalExtension> {
    let filters = upset_family_extension(p, filters)?;
    let ideals = downset_family_extension(p, ideals)?;
    let am = canonical_amalgamation_with(&filters.extension, &ideals.extension, limits)?;
    let mac = macneille(am.poset(), limits)?;
    let e = am.gamma().then(mac.map())?;
    let pi_filters = am.pi_x().then(mac.map())?;
    let pi_ideals = am.pi_y().then(mac.map())?;
    let extension = ExtensionMap::new(e);
    Ok(CanonicalExtension {
        completion: Completion {
            extension,
            provenance: Provenance::Canonical,
        },
        filters,
        ideals,
        amalgamation: am,
        pi_filters,
        pi_ideals,
    })
}

/// Outcome of [`verify_density_compactness`]; `failures` is empty on success.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DensityReport {
    pub failures: Vec<String>,
}

impl DensityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `(F, I)`-density and `(F, I)`-compactness of `e : P → C`.
/// Bounds of families that do not exist in `C` are reported as failures.
pub fn verify_density_compactness(e: &MonotoneMap, filters: &[ElemSet], ideals: &[ElemSet]) -> DensityReport {
    let c = e.target();
    let p = e.source();
    let mut failures = Vec::new();
    let label = |s: &ElemSet| -> String {
        let v: Vec<&str> = s.ones().map(|i| p.name(i)).collect();
        format!("{{{}}}", v.join(","))
    };
    let mut meets = Vec::with_capacity(filters.len());
    for f in filters {
        match c.meet_set(&e.image_of(f)) {
            Some(m) => meets.push(m),
            None => failures.push(format!("meet of the image of filter {} does not exist", label(f))),
        }
    }
    let mut joins = Vec::with_capacity(ideals.len());
    for i in ideals {
        match c.join_set(&e.image_of(i)) {
            Some(j) => joins.push(j),
            None => failures.push(format!("join of the image of ideal {} does not exist", label(i))),
        }
    }
    if !failures.is_empty() {
        return DensityReport { failures };
    }
    let meet_set = c.set_of(meets.iter().copied());
    let join_set = c.set_of(joins.iter().copied());
    for z in 0..c.len() {
        let mut below = meet_set.clone();
        below.intersect_with(c.down(z));
        if !c.is_join_of(z, &below) {
            failures.push(format!("`{}` is not a join of filter meets", c.name(z)));
        }
        let mut above = join_set.clone();
        above.intersect_with(c.up(z));
        if !c.is_meet_of(z, &above) {
            failures.push(format!("`{}` is not a meet of ideal joins", c.name(z)));
        }
    }
    for (f, &m) in filters.iter().zip(&meets) {
        for (i, &j) in ideals.iter().zip(&joins) {
            if c.leq(m, j) && f.is_disjoint(i) {
                failures.push(format!(
                    "compactness fails: filter {} lies below ideal {} but they are disjoint",
                    label(f),
                    label(i)
                ));
            }
        }
    }
    DensityReport { failures }
}

/// Reads an amalgamation of `e_F` and `e_I` off a completion `e : P → C`:
/// the image of `F ↦ ⋀e[F]` and `I ↦ ⋁e[I]` with the order inherited from `C`.
pub fn amalgamation_from_completion(
    e: &MonotoneMap,
    filters: &SetExtension,
    ideals: &SetExtension,
) -> Result<Amalgamation> {
    let c = e.target();
    let p = e.source();
    if !same_poset(filters.extension.source(), p) || !same_poset(ideals.extension.source(), p) {
        return Err(Error::BaseMismatch);
    }
    let mut fx = Vec::with_capacity(filters.sets.len());
    for f in &filters.sets {
        fx.push(
            c.meet_set(&e.image_of(f))
                .ok_or_else(|| Error::PreconditionFailed("target lacks the meet of a filter image".into()))?,
        );
    }
    let mut iy = Vec::with_capacity(ideals.sets.len());
    for i in &ideals.sets {
        iy.push(
            c.join_set(&e.image_of(i))
                .ok_or_else(|| Error::PreconditionFailed("target lacks the join of an ideal image".into()))?,
        );
    }
    let mut keep = c.empty_set();
    keep.extend(fx.iter().copied());
    keep.extend(iy.iter().copied());
    let (sub, old) = c.restrict(&keep);
    let mut new_index = vec![usize::MAX; c.len()];
    for (k, &o) in old.iter().enumerate() {
        new_index[o] = k;
    }
    let sub = Arc::new(sub);
    let pi_x = MonotoneMap::new(
        filters.extension.target().clone(),
        sub.clone(),
        fx.iter().map(|&z| new_index[z]).collect(),
    )?;
    let pi_y = MonotoneMap::new(
        ideals.extension.target().clone(),
        sub.clone(),
        iy.iter().map(|&z| new_index[z]).collect(),
    )?;
    let gamma = MonotoneMap::new(
        p.clone(),
        sub.clone(),
        (0..p.len()).map(|q| new_index[e.apply(q)]).collect(),
    )?;
    let mut origin = vec![Origin::X(0); sub.len()];
    for (y, &a) in pi_y.assign().iter().enumerate() {
        origin[a] = Origin::Y(y);
    }
    for (x, &a) in pi_x.assign().iter().enumerate() {
        origin[a] = Origin::X(x);
    }
    for q in 0..p.len() {
        origin[gamma.apply(q)] = Origin::Base(q);
    }
    Ok(Amalgamation::from_parts(
        sub,
        pi_x,
        pi_y,
        gamma,
        filters.extension.clone(),
        ideals.extension.clone(),
        origin,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{nonempty_downsets, nonempty_upsets};
    use crate::iso::find_isomorphism;

    fn antichain(n: usize) -> Arc<FinitePoset> {
        Arc::new(FinitePoset::antichain(&["a", "b", "c", "d"][..n]).unwrap())
    }

    fn principal_families(p: &FinitePoset) -> (Vec<ElemSet>, Vec<ElemSet>) {
        (
            (0..p.len()).map(|i| p.up(i).clone()).collect(),
            (0..p.len()).map(|i| p.down(i).clone()).collect(),
        )
    }

    #[test]
    fn macneille_of_antichain_adds_bounds() {
        let p = antichain(2);
        let m = macneille(&p, &Limits::default()).unwrap();
        assert_eq!(m.target().len(), 4);
        assert!(m.target().is_complete_lattice());
        assert!(m.extension.is_meet_extension() && m.extension.is_join_extension());
    }

    #[test]
    fn macneille_of_lattice_is_itself() {
        let d = Arc::new(
            FinitePoset::from_relations(
                &["bot", "a", "b", "top"],
                &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
            )
            .unwrap(),
        );
        let m = macneille(&d, &Limits::default()).unwrap();
        assert!(m.map().is_isomorphism());
    }

    #[test]
    fn principal_families_give_macneille() {
        let p = Arc::new(FinitePoset::from_relations(&["a", "b", "c"], &[("a", "b")]).unwrap());
        let (f, i) = principal_families(&p);
        let ce = canonical_extension(&p, f.clone(), i.clone(), &Limits::default()).unwrap();
        let m = macneille(&p, &Limits::default()).unwrap();
        assert!(find_isomorphism(ce.completion.target(), m.target()).unwrap().is_some());
        assert!(verify_density_compactness(ce.completion.map(), &f, &i).passed());
    }

    #[test]
    fn two_antichain_all_sets() {
        let p = antichain(2);
        let l = Limits::default();
        let f = nonempty_upsets(&p, &l).unwrap();
        let i = nonempty_downsets(&p, &l).unwrap();
        let ce = canonical_extension(&p, f.clone(), i.clone(), &l).unwrap();
        assert_eq!(ce.completion.target().len(), 4);
        assert!(verify_density_compactness(ce.completion.map(), &f, &i).passed());
    }

    #[test]
    fn three_antichain_all_sets() {
        let p = antichain(3);
        let l = Limits::default();
        let f = nonempty_upsets(&p, &l).unwrap();
        let i = nonempty_downsets(&p, &l).unwrap();
        let ce = canonical_extension(&p, f.clone(), i.clone(), &l).unwrap();
        assert_eq!(ce.amalgamation.len(), 11);
        assert!(verify_density_compactness(ce.completion.map(), &f, &i).passed());
        // MacNeille alone is not compact for these families
        let m = macneille(&p, &l).unwrap();
        let report = verify_density_compactness(m.map(), &f, &i);
        assert!(report.failures.iter().any(|s| s.starts_with("compactness")));
    }

    #[test]
    fn singleton_passes() {
        let p = antichain(1);
        let (f, i) = principal_families(&p);
        let ce = canonical_extension(&p, f.clone(), i.clone(), &Limits::default()).unwrap();
        assert!(verify_density_compactness(ce.completion.map(), &f, &i).passed());
    }

    #[test]
    fn reading_back_the_amalgamation() {
        let p = antichain(3);
        let l = Limits::default();
        let f = nonempty_upsets(&p, &l).unwrap();
        let i = nonempty_downsets(&p, &l).unwrap();
        let ce = canonical_extension(&p, f, i, &l).unwrap();
        let back = amalgamation_from_completion(ce.completion.map(), &ce.filters, &ce.ideals).unwrap();
        assert_eq!(back.len(), 11);
        assert!(back.violations().is_empty());
    }
}
