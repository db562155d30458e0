//! The approximation chain `A_0 → A_1 → … → A_n` whose colimit is the
//! lattice freely generated by a poset subject to designated joins and meets.

use std::sync::Arc;

use crate::amalgamation::{amalgamate_named, Amalgamation, Origin};
use crate::completion::disambiguate;
use crate::error::{Error, Result};
use crate::extension::{filter_extension, ideal_extension, is_ud_morphism};
use crate::lifting::lift_lambda;
use crate::map::{same_poset, MonotoneMap};
use crate::poset::FinitePoset;
use crate::spec::{BoundKind, Cardinal, Radius, Specification};
use crate::term::completeness_gap;
use crate::Limits;

/// Where an element of a stage comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageTag {
    /// The image of this element of the previous stage.
    Carried(usize),
    /// The meet of these previous-stage elements: a filter and its minimal generators.
    Filter(Vec<usize>),
    /// The join of these previous-stage elements: an ideal and its maximal generators.
    Ideal(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct ApproxChain {
    stages: Vec<Arc<FinitePoset>>,
    specs: Vec<(Specification, Specification)>,
    steps: Vec<Amalgamation>,
    tags: Vec<Vec<StageTag>>,
}

/// Builds `A_0 = p` and `n` further stages. Stage `k + 1` amalgamates the
/// extensions of `A_k` by its non-empty `D_k`-filters and `U_k`-ideals;
/// from stage 1 on both specifications consist of the non-empty finite
/// subsets of the previous stage's image.
pub fn build_chain(u: &Specification, d: &Specification, n: usize, limits: &Limits) -> Result<ApproxChain> {
    if u.kind() != BoundKind::Join || d.kind() != BoundKind::Meet {
        return Err(Error::InvalidSpecification(
            "expected a join-specification and a meet-specification".into(),
        ));
    }
    if !same_poset(u.base(), d.base()) {
        return Err(Error::BaseMismatch);
    }
    let base = u.base().clone();
    if base.len() > limits.stage {
        return Err(Error::StageLimit {
            stage: 0,
            detail: format!("{} elements (limit {})", base.len(), limits.stage),
        });
    }
    let mut chain = ApproxChain {
        stages: vec![base.clone()],
        specs: vec![(u.clone(), d.clone())],
        steps: Vec::with_capacity(n),
        tags: vec![(0..base.len()).map(StageTag::Carried).collect()],
    };
    for _ in 0..n {
        chain.extend(limits)?;
    }
    Ok(chain)
}

impl ApproxChain {
    /// Appends the next stage.
    pub fn extend(&mut self, limits: &Limits) -> Result<()> {
        let k = self.stages.len() - 1;
        let stage_limits = Limits {
            carrier: limits.carrier.min(limits.stage),
            ..*limits
        };
        let wrap = |e: Error| match e {
            Error::SizeLimit { what, limit, reached } => Error::StageLimit {
                stage: k + 1,
                detail: format!("{what} would reach {reached} (limit {limit})"),
            },
            other => other,
        };
        let (u, d) = &self.specs[k];
        let filters = filter_extension(d, &stage_limits).map_err(wrap)?;
        let ideals = ideal_extension(u, &stage_limits).map_err(wrap)?;
        let prev = self.stages[k].clone();
        let mut tags = Vec::new();
        let mut names = Vec::new();
        let next = k + 1;
        let am = amalgamate_named(&filters.extension, &ideals.extension, &stage_limits, &mut |o| {
            let (tag, name) = match o {
                Origin::Base(p) => (StageTag::Carried(p), prev.name(p).to_string()),
                Origin::X(x) => (
                    StageTag::Filter(prev.minimal(&filters.sets[x]).ones().collect()),
                    format!("f{next}_{x}"),
                ),
                Origin::Y(y) => (
                    StageTag::Ideal(prev.maximal(&ideals.sets[y]).ones().collect()),
                    format!("i{next}_{y}"),
                ),
            };
            tags.push(tag);
            names.push(name.clone());
            name
        })
        .map_err(wrap)?;
        if am.len() > limits.stage {
            return Err(Error::StageLimit {
                stage: next,
                detail: format!("{} elements (limit {})", am.len(), limits.stage),
            });
        }
        let fresh = disambiguate(names.clone());
        let am = if fresh != names { am.renamed(fresh)? } else { am };
        let stage = am.poset().clone();
        let image = am.gamma().image();
        let spec = |kind| Specification::finite_subsets_unchecked(stage.clone(), kind, image.clone());
        self.specs.push((spec(BoundKind::Join), spec(BoundKind::Meet)));
        self.stages.push(stage);
        self.tags.push(tags);
        self.steps.push(am);
        Ok(())
    }

    /// Index of the last stage.
    pub fn depth(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, k: usize) -> &Arc<FinitePoset> {
        &self.stages[k]
    }

    pub fn stages(&self) -> &[Arc<FinitePoset>] {
        &self.stages
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.len()).collect()
    }

    pub fn base(&self) -> &Arc<FinitePoset> {
        &self.stages[0]
    }

    /// `(U_k, D_k)`.
    pub fn specs(&self, k: usize) -> (&Specification, &Specification) {
        let (u, d) = &self.specs[k];
        (u, d)
    }

    /// The amalgamation producing stage `k + 1` from stage `k`.
    pub fn step(&self, k: usize) -> &Amalgamation {
        &self.steps[k]
    }

    /// `γ_k : A_k → A_{k+1}`.
    pub fn gamma(&self, k: usize) -> &MonotoneMap {
        self.steps[k].gamma()
    }

    /// `γ_mn = γ_{n-1} ∘ … ∘ γ_m`, the identity when `m = n`.
    pub fn gamma_between(&self, m: usize, n: usize) -> MonotoneMap {
        assert!(m <= n && n <= self.depth(), "stage indices out of order");
        let mut assign: Vec<usize> = (0..self.stages[m].len()).collect();
        for k in m..n {
            let g = self.gamma(k);
            for a in &mut assign {
                *a = g.apply(*a);
            }
        }
        MonotoneMap::new_unchecked(self.stages[m].clone(), self.stages[n].clone(), assign)
    }

    pub fn tag(&self, k: usize, a: usize) -> &StageTag {
        &self.tags[k][a]
    }

    /// Human-readable provenance of an element of stage `k`.
    pub fn describe(&self, k: usize, a: usize) -> String {
        let names = |prev: &FinitePoset, v: &[usize]| -> String {
            v.iter().map(|&i| prev.name(i)).collect::<Vec<_>>().join(",")
        };
        match &self.tags[k][a] {
            StageTag::Carried(p) if k == 0 => format!("base {}", self.stages[0].name(*p)),
            StageTag::Carried(p) => format!("carried {}", self.stages[k - 1].name(*p)),
            StageTag::Filter(g) => format!("filter({})", names(&self.stages[k - 1], g)),
            StageTag::Ideal(g) => format!("ideal({})", names(&self.stages[k - 1], g)),
        }
    }

    /// Least `m` with `a ∈ γ_mn[A_m]` for `a` in stage `n`.
    pub fn stage_rank(&self, n: usize, mut a: usize) -> usize {
        let mut m = n;
        while m > 0 {
            match self.tags[m][a] {
                StageTag::Carried(p) => {
                    a = p;
                    m -= 1;
                }
                _ => break,
            }
        }
        m
    }
}

/// The unique `(U_n, D_n)`-morphism `f* : A_n → Q` with `f* ∘ γ_0n = f`,
/// built one stage at a time. Requires `f` to be a `(U, D)`-morphism and
/// `Q` to be `(n + 1)`-complete relative to `f[P]`.
pub fn relative_free_lift(f: &MonotoneMap, chain: &ApproxChain, n: usize, limits: &Limits) -> Result<MonotoneMap> {
    if n > chain.depth() {
        return Err(Error::PreconditionFailed(format!(
            "chain has {} stages, asked for stage {n}",
            chain.depth()
        )));
    }
    if !same_poset(f.source(), chain.base()) {
        return Err(Error::BaseMismatch);
    }
    let (u, d) = chain.specs(0);
    if !is_ud_morphism(f, u, d) {
        return Err(Error::PreconditionFailed(
            "map does not preserve the designated joins and meets".into(),
        ));
    }
    if let Some(gap) = completeness_gap(f.target(), &f.image(), Radius::Finite(n + 1), limits)? {
        return Err(Error::PreconditionFailed(format!(
            "target is not {}-complete relative to the image: {gap}",
            n + 1
        )));
    }
    let mut current = f.clone();
    for k in 0..n {
        current = lift_lambda(&current, chain.step(k), Cardinal::Omega, Cardinal::Omega, limits)?;
    }
    Ok(current)
}
