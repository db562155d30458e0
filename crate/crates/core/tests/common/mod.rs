#![allow(dead_code)]

use std::sync::Arc;

use amalgam::extension::upset_family_extension;
use amalgam::format::{parse_poset, PosetFile};
use amalgam::{macneille, ElemSet, FinitePoset, Limits, MonotoneMap};
use proptest::prelude::*;
use rand::Rng;

pub fn load(name: &str) -> PosetFile {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_poset(&text).unwrap()
}

/// Poset on `p0 … p{n-1}` with `pi < pj` (for `i < j`) wherever the
/// corresponding bit is set, closed transitively. Index order is a linear extension.
pub fn poset_from_bits(n: usize, bits: &[bool]) -> Arc<FinitePoset> {
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut pairs = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits[k] {
                pairs.push((names[i].clone(), names[j].clone()));
            }
            k += 1;
        }
    }
    Arc::new(FinitePoset::from_relations(&names, &pairs).unwrap())
}

pub fn arb_poset(min: usize, max: usize) -> impl Strategy<Value = Arc<FinitePoset>> {
    (min..=max).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.35), n * n.saturating_sub(1) / 2)
            .prop_map(move |bits| poset_from_bits(n, &bits))
    })
}

pub fn random_poset(rng: &mut impl Rng, n: usize, density: f64) -> Arc<FinitePoset> {
    let bits: Vec<bool> = (0..n * n.saturating_sub(1) / 2).map(|_| rng.gen_bool(density)).collect();
    poset_from_bits(n, &bits)
}

/// A random order-preserving map, built along a linear extension of the
/// source; `None` when some partial choice has no common upper bound left.
pub fn random_monotone(rng: &mut impl Rng, source: &Arc<FinitePoset>, target: &Arc<FinitePoset>) -> Option<MonotoneMap> {
    let order = linear_extension(source);
    let mut assign = vec![usize::MAX; source.len()];
    for &p in &order {
        let candidates: Vec<usize> = (0..target.len())
            .filter(|&q| {
                source
                    .down(p)
                    .ones()
                    .filter(|&r| r != p)
                    .all(|r| target.leq(assign[r], q))
            })
            .collect();
        if candidates.is_empty() {
            return None;
        }
        assign[p] = candidates[rng.gen_range(0..candidates.len())];
    }
    Some(MonotoneMap::new(source.clone(), target.clone(), assign).unwrap())
}

pub fn linear_extension(p: &FinitePoset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&i| p.down(i).count_ones(..));
    order
}

/// Principal upsets plus `extra` random ones (possibly repeated or empty).
pub fn random_upset_family(rng: &mut impl Rng, p: &FinitePoset, extra: usize) -> Vec<ElemSet> {
    let mut fam: Vec<ElemSet> = (0..p.len()).map(|i| p.up(i).clone()).collect();
    for _ in 0..extra {
        let seed = p.set_of((0..p.len()).filter(|_| rng.gen_bool(0.3)));
        let s = p.up_closure(&seed);
        if !s.is_clear() {
            fam.push(s);
        }
    }
    fam
}

pub fn random_downset_family(rng: &mut impl Rng, p: &FinitePoset, extra: usize) -> Vec<ElemSet> {
    let mut fam: Vec<ElemSet> = (0..p.len()).map(|i| p.down(i).clone()).collect();
    for _ in 0..extra {
        let seed = p.set_of((0..p.len()).filter(|_| rng.gen_bool(0.3)));
        let s = p.down_closure(&seed);
        if !s.is_clear() {
            fam.push(s);
        }
    }
    fam
}

/// Closes a family of upsets under intersection and adds the whole carrier:
/// ordered by reverse inclusion this is a complete lattice.
pub fn moore_closure(p: &FinitePoset, family: Vec<ElemSet>) -> Vec<ElemSet> {
    let mut out: Vec<ElemSet> = Vec::new();
    let mut queue = family;
    queue.push(p.full_set());
    while let Some(s) = queue.pop() {
        if out.contains(&s) {
            continue;
        }
        for t in out.clone() {
            let mut i = s.clone();
            i.intersect_with(&t);
            queue.push(i);
        }
        out.push(s);
    }
    out
}

/// A random meet-completion of `p`: a Moore family of upsets containing
/// every principal upset, ordered by reverse inclusion.
pub fn random_meet_completion(rng: &mut impl Rng, p: &Arc<FinitePoset>, extra: usize) -> amalgam::ExtensionMap {
    let fam = moore_closure(p, random_upset_family(rng, p, extra));
    upset_family_extension(p, fam).unwrap().extension
}

/// A random complete lattice with at most `max` elements.
pub fn random_complete_lattice(rng: &mut impl Rng, max: usize) -> Arc<FinitePoset> {
    loop {
        let n = rng.gen_range(1..=max);
        let p = random_poset(rng, n, 0.4);
        let m = macneille(&p, &Limits::default()).unwrap();
        if m.target().len() <= max {
            return m.target().clone();
        }
    }
}

/// Every order-preserving map extending the partial assignment `fixed`.
pub fn all_monotone(source: &FinitePoset, target: &FinitePoset, fixed: &[Option<usize>]) -> Vec<Vec<usize>> {
    fn go(
        order: &[usize],
        k: usize,
        source: &FinitePoset,
        target: &FinitePoset,
        fixed: &[Option<usize>],
        assign: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == order.len() {
            out.push(assign.clone());
            return;
        }
        let p = order[k];
        let options: Vec<usize> = match fixed[p] {
            Some(q) => vec![q],
            None => (0..target.len()).collect(),
        };
        for q in options {
            let ok = source
                .down(p)
                .ones()
                .filter(|&r| r != p)
                .all(|r| target.leq(assign[r], q));
            if ok {
                assign[p] = q;
                go(order, k + 1, source, target, fixed, assign, out);
            }
        }
        assign[p] = usize::MAX;
    }
    let order = linear_extension(source);
    let mut out = Vec::new();
    let mut assign = vec![usize::MAX; source.len()];
    go(&order, 0, source, target, fixed, &mut assign, &mut out);
    out
}

/// Every lattice on `n` labelled elements whose index order is a linear
/// extension, up to duplicates.
pub fn small_lattices(n: usize) -> Vec<Arc<FinitePoset>> {
    let pairs = n * n.saturating_sub(1) / 2;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs) {
        let bits: Vec<bool> = (0..pairs).map(|i| mask >> i & 1 == 1).collect();
        let p = poset_from_bits(n, &bits);
        if !p.is_lattice() {
            continue;
        }
        let key: Vec<Vec<usize>> = (0..n).map(|i| p.up(i).ones().collect()).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

/// Concept lattice of the polarity `(filters, ideals, F ∩ I ≠ ∅)`, ordered by
/// extent inclusion, with `p ↦` the concept of its principal filter.
/// An independent construction of the canonical extension.
pub fn polarity_completion(p: &Arc<FinitePoset>, filters: &[ElemSet], ideals: &[ElemSet]) -> MonotoneMap {
    let nf = filters.len();
    let meets = |f: &ElemSet, i: &ElemSet| !f.is_disjoint(i);
    // extents are the intersections of the attribute extents {F : F meets I}
    let attr: Vec<ElemSet> = ideals
        .iter()
        .map(|i| {
            let mut s = ElemSet::with_capacity(nf);
            s.extend((0..nf).filter(|&f| meets(&filters[f], i)));
            s
        })
        .collect();
    let mut full = ElemSet::with_capacity(nf);
    full.insert_range(..);
    let mut extents = vec![full];
    let mut k = 0;
    while k < extents.len() {
        for a in &attr {
            let mut e = extents[k].clone();
            e.intersect_with(a);
            if !extents.contains(&e) {
                extents.push(e);
            }
        }
        k += 1;
    }
    let names: Vec<String> = (0..extents.len()).map(|i| format!("c{i}")).collect();
    let m = extents.len();
    let lattice = Arc::new(
        FinitePoset::from_fn(names, |a, b| extents[a].is_subset(&extents[b])).unwrap(),
    );
    let principal_index = |x: usize| filters.iter().position(|f| f == p.up(x)).expect("standard family");
    let assign = (0..p.len())
        .map(|x| {
            // smallest extent containing the principal filter of x
            let f = principal_index(x);
            (0..m)
                .filter(|&c| extents[c].contains(f))
                .min_by_key(|&c| extents[c].count_ones(..))
                .unwrap()
        })
        .collect();
    MonotoneMap::new(p.clone(), lattice, assign).unwrap()
}
