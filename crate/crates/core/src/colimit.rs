//! Colimits of finite chains of posets.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::{same_poset, MonotoneMap};
use crate::poset::{ElemSet, FinitePoset};
use crate::quasiorder::Quasiorder;

/// A chain `P_0 → P_1 → … → P_n` with a map `g_ij` for every `i ≤ j`.
#[derive(Debug, Clone)]
pub struct ChainColimitSpec {
    posets: Vec<Arc<FinitePoset>>,
    maps: BTreeMap<(usize, usize), MonotoneMap>,
}

impl ChainColimitSpec {
    /// Builds the family from consecutive maps `g_{i(i+1)}`, composing the rest.
    pub fn from_steps(posets: Vec<Arc<FinitePoset>>, steps: Vec<MonotoneMap>) -> Result<Self> {
        if posets.is_empty() || steps.len() + 1 != posets.len() {
            return Err(Error::InvalidMap(format!(
                "{} posets need {} connecting maps, got {}",
                posets.len(),
                posets.len().saturating_sub(1),
                steps.len()
            )));
        }
        let mut maps = BTreeMap::new();
        for i in 0..posets.len() {
            let mut current = MonotoneMap::identity(posets[i].clone());
            maps.insert((i, i), current.clone());
            for j in i..steps.len() {
                current = current.then(&steps[j])?;
                maps.insert((i, j + 1), current.clone());
            }
        }
        let spec = ChainColimitSpec { posets, maps };
        spec.check_shapes()?;
        Ok(spec)
    }

    /// Takes every `g_ij` explicitly and checks `g_ii = id` and `g_ik = g_jk ∘ g_ij`.
    pub fn new(posets: Vec<Arc<FinitePoset>>, maps: Vec<((usize, usize), MonotoneMap)>) -> Result<Self> {
        if posets.is_empty() {
            return Err(Error::InvalidMap("a chain needs at least one poset".into()));
        }
        let spec = ChainColimitSpec {
            maps: maps.into_iter().collect(),
            posets,
        };
        spec.check_shapes()?;
        let n = spec.posets.len();
        for i in 0..n {
            if spec.map(i, i).assign().iter().enumerate().any(|(a, &b)| a != b) {
                return Err(Error::CompositionLawViolated(i, i, i));
            }
            for j in i..n {
                for k in j..n {
                    let composed = spec.map(i, j).then(spec.map(j, k))?;
                    if composed.assign() != spec.map(i, k).assign() {
                        return Err(Error::CompositionLawViolated(i, j, k));
                    }
                }
            }
        }
        Ok(spec)
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.posets.len();
        for i in 0..n {
            for j in i..n {
                let Some(g) = self.maps.get(&(i, j)) else {
                    return Err(Error::InvalidMap(format!("missing map g_{i}{j}")));
                };
                if !same_poset(g.source(), &self.posets[i]) || !same_poset(g.target(), &self.posets[j]) {
                    return Err(Error::InvalidMap(format!("g_{i}{j} has the wrong source or target")));
                }
            }
        }
        if self.maps.len() != n * (n + 1) / 2 {
            return Err(Error::InvalidMap("maps given for pairs outside the chain".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.posets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posets.is_empty()
    }

    pub fn poset(&self, i: usize) -> &Arc<FinitePoset> {
        &self.posets[i]
    }

    /// `g_ij` for `i ≤ j`.
    pub fn map(&self, i: usize, j: usize) -> &MonotoneMap {
        &self.maps[&(i, j)]
    }

    pub fn all_embeddings(&self) -> bool {
        self.maps.values().all(MonotoneMap::is_embedding)
    }

    /// `g_ik(x) ≤ g_jk(y)` in `P_k` for every `k ≥ i, j`.
    pub fn below_everywhere(&self, i: usize, x: usize, j: usize, y: usize) -> bool {
        (i.max(j)..self.len()).all(|k| self.below_at(k, i, x, j, y))
    }

    /// `g_ik(x) ≤ g_jk(y)` in `P_k` for some `k ≥ i, j`.
    pub fn below_somewhere(&self, i: usize, x: usize, j: usize, y: usize) -> bool {
        (i.max(j)..self.len()).any(|k| self.below_at(k, i, x, j, y))
    }

    fn below_at(&self, k: usize, i: usize, x: usize, j: usize, y: usize) -> bool {
        self.posets[k].leq(self.map(i, k).apply(x), self.map(j, k).apply(y))
    }

    /// The least `k ≥ i, j` from which `g_ik(x) ∨ g_jk(y)` exists and is
    /// carried to the join at every later stage, with that join.
    pub fn stable_join(&self, i: usize, x: usize, j: usize, y: usize) -> Option<(usize, usize)> {
        let joins: Vec<Option<usize>> = (0..self.len())
            .map(|k| {
                (k >= i.max(j)).then(|| self.posets[k].join2(self.map(i, k).apply(x), self.map(j, k).apply(y)))?
            })
            .collect();
        (i.max(j)..self.len()).find_map(|k| {
            let z = joins[k]?;
            (k..self.len())
                .all(|m| joins[m] == Some(self.map(k, m).apply(z)))
                .then_some((k, z))
        })
    }
}

/// The colimit `P(D, M)`: the disjoint union of the chain, quasiordered by
/// `x ⪯ y` iff some later stage puts their images in order, and quotiented.
/// Returns it with the induced maps `μ_i`. Each class is named after the
/// element of the last stage it contains.
#[derive(Debug, Clone)]
pub struct ChainColimit {
    pub poset: Arc<FinitePoset>,
    pub mu: Vec<MonotoneMap>,
    offsets: Vec<usize>,
    class_of: Vec<usize>,
}

impl ChainColimit {
    /// The class of `x ∈ P_i`.
    pub fn class(&self, i: usize, x: usize) -> usize {
        self.class_of[self.offsets[i] + x]
    }
}

pub fn chain_colimit(spec: &ChainColimitSpec) -> Result<ChainColimit> {
    let n = spec.len();
    let mut offsets = Vec::with_capacity(n);
    let mut owner = Vec::new();
    for i in 0..n {
        offsets.push(owner.len());
        owner.extend((0..spec.poset(i).len()).map(|x| (i, x)));
    }
    let total = owner.len();
    let rows: Vec<ElemSet> = owner
        .iter()
        .map(|&(i, x)| {
            let mut row = ElemSet::with_capacity(total);
            row.extend((0..total).filter(|&b| {
                let (j, y) = owner[b];
                spec.below_somewhere(i, x, j, y)
            }));
            row
        })
        .collect();
    let names: Vec<String> = owner
        .iter()
        .map(|&(i, x)| format!("{}_{}", spec.poset(i).name(x), i))
        .collect();
    let q = Quasiorder::new(names, rows)?;
    let last = n - 1;
    let quotient = q.quotient_named(|members, _| {
        let b = members
            .iter()
            .copied()
            .find(|&b| owner[b].0 == last)
            .expect("every class meets the last stage");
        spec.poset(last).name(owner[b].1).to_string()
    });
    let poset = Arc::new(quotient.poset);
    let class_of = quotient.class_of;
    let mu = (0..n)
        .map(|i| {
            MonotoneMap::new_unchecked(
                spec.poset(i).clone(),
                poset.clone(),
                (0..spec.poset(i).len()).map(|x| class_of[offsets[i] + x]).collect(),
            )
        })
        .collect();
    Ok(ChainColimit {
        poset,
        mu,
        offsets,
        class_of,
    })
}
