//! Order-isomorphism search by backtracking with degree-signature pruning.
//! Adequate for the small carriers this crate works with; not a general
//! graph isomorphism engine.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;
use crate::poset::FinitePoset;
use crate::Limits;

type Signature = (usize, usize, Vec<(usize, usize)>, Vec<(usize, usize)>);

fn signatures(p: &FinitePoset) -> Vec<Signature> {
    let base: Vec<(usize, usize)> = (0..p.len())
        .map(|i| (p.up(i).count_ones(..), p.down(i).count_ones(..)))
        .collect();
    let mut upper = vec![Vec::new(); p.len()];
    let mut lower = vec![Vec::new(); p.len()];
    for (a, b) in p.covers() {
        upper[a].push(base[b]);
        lower[b].push(base[a]);
    }
    (0..p.len())
        .map(|i| {
            let mut u = std::mem::take(&mut upper[i]);
            let mut l = std::mem::take(&mut lower[i]);
            u.sort_unstable();
            l.sort_unstable();
            (base[i].0, base[i].1, u, l)
        })
        .collect()
}

pub fn find_isomorphism(p: &Arc<FinitePoset>, q: &Arc<FinitePoset>) -> Result<Option<MonotoneMap>> {
    find_isomorphism_extending(p, q, &[], &Limits::default())
}

/// Searches for an order-isomorphism `p → q` that sends `fixed[k].0` to
/// `fixed[k].1` for every constraint pair.
pub fn find_isomorphism_extending(
    p: &Arc<FinitePoset>,
    q: &Arc<FinitePoset>,
    fixed: &[(usize, usize)],
    limits: &Limits,
) -> Result<Option<MonotoneMap>> {
    let n = p.len();
    if n > limits.isomorphism || q.len() > limits.isomorphism {
        return Err(Error::size(
            "isomorphism search carrier",
            limits.isomorphism,
            n.max(q.len()),
        ));
    }
    if n != q.len() {
        return Ok(None);
    }
    let sp = signatures(p);
    let sq = signatures(q);
    let mut classes: HashMap<&Signature, Vec<usize>> = HashMap::new();
    for (j, s) in sq.iter().enumerate() {
        classes.entry(s).or_default().push(j);
    }
    let mut count_p: HashMap<&Signature, usize> = HashMap::new();
    for s in &sp {
        *count_p.entry(s).or_default() += 1;
    }
    if count_p.len() != classes.len()
        || count_p
            .iter()
            .any(|(s, &c)| classes.get(s).map(Vec::len) != Some(c))
    {
        return Ok(None);
    }

    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for &(a, b) in fixed {
        if a >= n || b >= n {
            return Err(Error::InvalidMap("constraint index out of range".into()));
        }
        if sp[a] != sq[b] || (assign[a] != usize::MAX && assign[a] != b) || (used[b] && assign[a] != b) {
            return Ok(None);
        }
        assign[a] = b;
        used[b] = true;
    }
    let fixed_elems: Vec<usize> = (0..n).filter(|&i| assign[i] != usize::MAX).collect();
    for &a in &fixed_elems {
        for &b in &fixed_elems {
            if p.leq(a, b) != q.leq(assign[a], assign[b]) {
                return Ok(None);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).filter(|&i| assign[i] == usize::MAX).collect();
    order.sort_by_key(|&i| (classes[&sp[i]].len(), i));

    fn extend(
        k: usize,
        order: &[usize],
        p: &FinitePoset,
        q: &FinitePoset,
        cands: &dyn Fn(usize) -> Vec<usize>,
        assign: &mut [usize],
        used: &mut [bool],
        placed: &mut Vec<usize>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let a = order[k];
        for b in cands(a) {
            if used[b] {
                continue;
            }
            let consistent = placed
                .iter()
                .all(|&c| p.leq(a, c) == q.leq(b, assign[c]) && p.leq(c, a) == q.leq(assign[c], b));
            if !consistent {
                continue;
            }
            assign[a] = b;
            used[b] = true;
            placed.push(a);
            if extend(k + 1, order, p, q, cands, assign, used, placed) {
                return true;
            }
            placed.pop();
            used[b] = false;
            assign[a] = usize::MAX;
        }
        false
    }

    let cands = |a: usize| classes[&sp[a]].clone();
    let mut placed = fixed_elems;
    if extend(0, &order, p, q, &cands, &mut assign, &mut used, &mut placed) {
        Ok(Some(MonotoneMap::new_unchecked(p.clone(), q.clone(), assign)))
    } else {
        Ok(None)
    }
}
