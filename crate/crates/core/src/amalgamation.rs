//! Canonical amalgamation of a meet-extension `e_X : P → X` and a
//! join-extension `e_Y : P → Y`.
//!
//! The amalgamation is the quotient of a quasiorder on the disjoint union
//! `X ∪ Y`: both orders are kept, `x ⪯ y` holds exactly when
//! `e_X⁻¹(x↑) ∩ e_Y⁻¹(y↓) ≠ ∅`, and `y ⪯ x` holds exactly when every element
//! of `e_Y⁻¹(y↓)` lies below every element of `e_X⁻¹(x↑)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extension::ExtensionMap;
use crate::map::{same_poset, MonotoneMap};
use crate::poset::{close_relation, ElemSet, FinitePoset, ProductShape};
use crate::quasiorder::Quasiorder;
use crate::subsets::each_subset;
use crate::Limits;

/// Where an element of an amalgamation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    /// The merged image of a base element.
    Base(usize),
    /// An element of `X` outside the base image.
    X(usize),
    /// An element of `Y` outside the base image.
    Y(usize),
}

/// A meet-extension, a join-extension of the same base, and a relation `R ⊆ X × Y`.
#[derive(Debug, Clone)]
pub struct ExtensionPolarity {
    e_x: ExtensionMap,
    e_y: ExtensionMap,
    /// `relation[x]` is the set of `y` with `x R y`.
    relation: Vec<ElemSet>,
}

impl ExtensionPolarity {
    pub fn new(e_x: ExtensionMap, e_y: ExtensionMap, pairs: &[(usize, usize)]) -> Result<Self> {
        let ny = e_y.target().len();
        let mut relation = vec![ElemSet::with_capacity(ny); e_x.target().len()];
        for &(x, y) in pairs {
            if x >= relation.len() || y >= ny {
                return Err(Error::InvalidMap("relation pair out of range".into()));
            }
            relation[x].insert(y);
        }
        Self::from_rows(e_x, e_y, relation)
    }

    pub fn from_rows(e_x: ExtensionMap, e_y: ExtensionMap, relation: Vec<ElemSet>) -> Result<Self> {
        if !same_poset(e_x.source(), e_y.source()) {
            return Err(Error::BaseMismatch);
        }
        if relation.len() != e_x.target().len() {
            return Err(Error::InvalidMap("relation needs one row per element of X".into()));
        }
        Ok(ExtensionPolarity { e_x, e_y, relation })
    }

    pub fn e_x(&self) -> &ExtensionMap {
        &self.e_x
    }

    pub fn e_y(&self) -> &ExtensionMap {
        &self.e_y
    }

    pub fn relation(&self) -> &[ElemSet] {
        &self.relation
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.relation[x].contains(y)
    }

    /// `X:`/`Y:`-prefixed carrier names of the disjoint union.
    pub fn union_names(&self) -> Vec<String> {
        union_names(&self.e_x, &self.e_y)
    }
}

fn union_names(e_x: &ExtensionMap, e_y: &ExtensionMap) -> Vec<String> {
    e_x.target()
        .names()
        .iter()
        .map(|n| format!("X:{n}"))
        .chain(e_y.target().names().iter().map(|n| format!("Y:{n}")))
        .collect()
}

fn check_kinds(e_x: &ExtensionMap, e_y: &ExtensionMap) -> Result<()> {
    if !same_poset(e_x.source(), e_y.source()) {
        return Err(Error::BaseMismatch);
    }
    e_x.require_meet("e_X")?;
    e_y.require_join("e_Y")
}

/// The least relation making the polarity Galois: `x R y` iff some base
/// element lies in both `e_X⁻¹(x↑)` and `e_Y⁻¹(y↓)`.
pub fn minimal_relation(e_x: &ExtensionMap, e_y: &ExtensionMap) -> Result<ExtensionPolarity> {
    check_kinds(e_x, e_y)?;
    let relation = below_rows(e_x, e_y);
    Ok(ExtensionPolarity {
        e_x: e_x.clone(),
        e_y: e_y.clone(),
        relation,
    })
}

/// Row `x`: every `y` above some `e_Y(p)` with `p ∈ e_X⁻¹(x↑)`.
fn below_rows(e_x: &ExtensionMap, e_y: &ExtensionMap) -> Vec<ElemSet> {
    let ny = e_y.target().len();
    (0..e_x.target().len())
        .map(|x| {
            let mut row = ElemSet::with_capacity(ny);
            for p in e_x.upper_preimage(x).ones() {
                row.union_with(e_y.target().up(e_y.apply(p)));
            }
            row
        })
        .collect()
}

/// Literal evaluation of the `y ⪯ x` rule on preimages.
fn lower_bound_rule(e_x: &ExtensionMap, e_y: &ExtensionMap, x: usize, y: usize) -> bool {
    let p = e_x.source();
    let ux = e_x.upper_preimage(x);
    e_y.lower_preimage(y).ones().all(|a| ux.is_subset(p.up(a)))
}

/// The quasiorder on `X ∪ Y` built from the two orders, `R`, and the
/// lower-bound rule for `y ⪯ x`; fails if the result is not transitive.
pub fn galois_quasiorder(pol: &ExtensionPolarity) -> Result<Quasiorder> {
    let (e_x, e_y) = (&pol.e_x, &pol.e_y);
    let (nx, ny) = (e_x.target().len(), e_y.target().len());
    let n = nx + ny;
    let mut rows = Vec::with_capacity(n);
    for x in 0..nx {
        let mut row = ElemSet::with_capacity(n);
        row.extend(e_x.target().up(x).ones());
        row.extend(pol.relation[x].ones().map(|y| nx + y));
        rows.push(row);
    }
    for y in 0..ny {
        let mut row = ElemSet::with_capacity(n);
        row.extend(e_y.target().up(y).ones().map(|v| nx + v));
        row.extend((0..nx).filter(|&x| lower_bound_rule(e_x, e_y, x, y)));
        rows.push(row);
    }
    Quasiorder::new(pol.union_names(), rows)
}

/// Fast rows of the canonical quasiorder. Because `e_X` is a
/// meet-extension, the lower-bound rule for `y ⪯ x` is equivalent to
/// `e_Y⁻¹(y↓) ⊆ e_X⁻¹(x↓)`, i.e. `x` lies above `e_X(p)` for every such `p`.
fn canonical_rows(e_x: &ExtensionMap, e_y: &ExtensionMap) -> Vec<ElemSet> {
    let (x, y) = (e_x.target(), e_y.target());
    let (nx, ny) = (x.len(), y.len());
    let n = nx + ny;
    let below = below_rows(e_x, e_y);
    let mut rows = Vec::with_capacity(n);
    for (i, r) in below.iter().enumerate() {
        let mut row = ElemSet::with_capacity(n);
        row.extend(x.up(i).ones());
        row.extend(r.ones().map(|v| nx + v));
        rows.push(row);
    }
    for j in 0..ny {
        let mut above = x.full_set();
        for p in e_y.lower_preimage(j).ones() {
            above.intersect_with(x.up(e_x.apply(p)));
        }
        let mut row = ElemSet::with_capacity(n);
        row.extend(above.ones());
        row.extend(y.up(j).ones().map(|v| nx + v));
        rows.push(row);
    }
    rows
}

/// The canonical amalgamation `(A, π_X, π_Y)` together with `γ = π_X ∘ e_X`.
#[derive(Debug, Clone)]
pub struct Amalgamation {
    poset: Arc<FinitePoset>,
    pi_x: MonotoneMap,
    pi_y: MonotoneMap,
    gamma: MonotoneMap,
    e_x: ExtensionMap,
    e_y: ExtensionMap,
    origin: Vec<Origin>,
}

impl Amalgamation {
    pub(crate) fn from_parts(
        poset: Arc<FinitePoset>,
        pi_x: MonotoneMap,
        pi_y: MonotoneMap,
        gamma: MonotoneMap,
        e_x: ExtensionMap,
        e_y: ExtensionMap,
        origin: Vec<Origin>,
    ) -> Self {
        Amalgamation {
            poset,
            pi_x,
            pi_y,
            gamma,
            e_x,
            e_y,
            origin,
        }
    }

    /// The same amalgamation with its carrier renamed.
    pub fn renamed(&self, names: Vec<String>) -> Result<Amalgamation> {
        let poset = Arc::new(self.poset.renamed(names)?);
        let retarget = |m: &MonotoneMap| m.rebased(m.source().clone(), poset.clone());
        Ok(Amalgamation {
            pi_x: retarget(&self.pi_x),
            pi_y: retarget(&self.pi_y),
            gamma: retarget(&self.gamma),
            e_x: self.e_x.clone(),
            e_y: self.e_y.clone(),
            origin: self.origin.clone(),
            poset,
        })
    }

    pub fn poset(&self) -> &Arc<FinitePoset> {
        &self.poset
    }

    pub fn pi_x(&self) -> &MonotoneMap {
        &self.pi_x
    }

    pub fn pi_y(&self) -> &MonotoneMap {
        &self.pi_y
    }

    pub fn gamma(&self) -> &MonotoneMap {
        &self.gamma
    }

    pub fn e_x(&self) -> &ExtensionMap {
        &self.e_x
    }

    pub fn e_y(&self) -> &ExtensionMap {
        &self.e_y
    }

    pub fn origin(&self, a: usize) -> Origin {
        self.origin[a]
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    /// Some `x` with `π_X(x) = a`.
    pub fn x_preimage(&self, a: usize) -> Option<usize> {
        self.pi_x.assign().iter().position(|&b| b == a)
    }

    /// Some `y` with `π_Y(y) = a`.
    pub fn y_preimage(&self, a: usize) -> Option<usize> {
        self.pi_y.assign().iter().position(|&b| b == a)
    }

    /// Lists every violated defining property; empty when all hold.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let a = &self.poset;
        if !self.pi_x.is_embedding() {
            out.push("pi_X is not an order-embedding".into());
        }
        if !self.pi_y.is_embedding() {
            out.push("pi_Y is not an order-embedding".into());
        }
        if let Some((z, w)) = self.pi_x.meet_preservation_failure() {
            out.push(format!(
                "pi_X does not preserve a meet equal to `{}` (lower bound `{}`)",
                self.pi_x.source().name(z),
                a.name(w)
            ));
        }
        if let Some((z, w)) = self.pi_y.join_preservation_failure() {
            out.push(format!(
                "pi_Y does not preserve a join equal to `{}` (upper bound `{}`)",
                self.pi_y.source().name(z),
                a.name(w)
            ));
        }
        let base = self.e_x.source();
        for p in 0..base.len() {
            let gx = self.pi_x.apply(self.e_x.apply(p));
            let gy = self.pi_y.apply(self.e_y.apply(p));
            if gx != gy || gx != self.gamma.apply(p) {
                out.push(format!("pi_X e_X and pi_Y e_Y disagree at `{}`", base.name(p)));
            }
        }
        let mut covered = self.pi_x.image();
        covered.union_with(&self.pi_y.image());
        if covered.count_ones(..) != a.len() {
            out.push("some element lies outside pi_X[X] and pi_Y[Y]".into());
        }
        for x in 0..self.e_x.target().len() {
            for y in 0..self.e_y.target().len() {
                let merged = self.pi_x.apply(x) == self.pi_y.apply(y);
                let from_base = (0..base.len()).any(|p| self.e_x.apply(p) == x && self.e_y.apply(p) == y);
                if merged != from_base {
                    out.push(format!(
                        "pi_X(`{}`) = pi_Y(`{}`) does not match a common base element",
                        self.e_x.target().name(x),
                        self.e_y.target().name(y)
                    ));
                }
            }
        }
        out
    }
}

/// Builds `X ⊎ Y` with `X:`/`Y:`-namespaced elements and `P:p` for merged base images.
pub fn canonical_amalgamation(e_x: &ExtensionMap, e_y: &ExtensionMap) -> Result<Amalgamation> {
    canonical_amalgamation_with(e_x, e_y, &Limits::default())
}

pub fn canonical_amalgamation_with(e_x: &ExtensionMap, e_y: &ExtensionMap, limits: &Limits) -> Result<Amalgamation> {
    let (x, y, p) = (e_x.target(), e_y.target(), e_x.source());
    amalgamate_named(e_x, e_y, limits, &mut |o| match o {
        Origin::Base(i) => format!("P:{}", p.name(i)),
        Origin::X(i) => format!("X:{}", x.name(i)),
        Origin::Y(i) => format!("Y:{}", y.name(i)),
    })
}

pub(crate) fn amalgamate_named(
    e_x: &ExtensionMap,
    e_y: &ExtensionMap,
    limits: &Limits,
    name: &mut dyn FnMut(Origin) -> String,
) -> Result<Amalgamation> {
    check_kinds(e_x, e_y)?;
    let (nx, ny) = (e_x.target().len(), e_y.target().len());
    let total = nx + ny;
    if total.saturating_sub(e_x.source().len()) > limits.carrier {
        return Err(Error::size("amalgamation carrier", limits.carrier, total - e_x.source().len()));
    }
    let rows = canonical_rows(e_x, e_y);
    let base_of_x: Vec<Option<usize>> = {
        let mut v = vec![None; nx];
        for p in 0..e_x.source().len() {
            v[e_x.apply(p)] = Some(p);
        }
        v
    };
    let base_of_y: Vec<Option<usize>> = {
        let mut v = vec![None; ny];
        for p in 0..e_y.source().len() {
            v[e_y.apply(p)] = Some(p);
        }
        v
    };
    let q = Quasiorder::from_rows_unchecked(vec![String::new(); total], rows);
    let mut origin = Vec::new();
    let quotient = q.quotient_named(|_, rep| {
        let o = if rep < nx {
            match base_of_x[rep] {
                Some(p) => Origin::Base(p),
                None => Origin::X(rep),
            }
        } else {
            match base_of_y[rep - nx] {
                Some(p) => Origin::Base(p),
                None => Origin::Y(rep - nx),
            }
        };
        origin.push(o);
        name(o)
    });
    let poset = Arc::new(quotient.poset);
    let pi_x = MonotoneMap::new_unchecked(e_x.target().clone(), poset.clone(), quotient.class_of[..nx].to_vec());
    let pi_y = MonotoneMap::new_unchecked(e_y.target().clone(), poset.clone(), quotient.class_of[nx..].to_vec());
    let gamma = MonotoneMap::new_unchecked(
        e_x.source().clone(),
        poset.clone(),
        (0..e_x.source().len()).map(|p| pi_x.apply(e_x.apply(p))).collect(),
    );
    Ok(Amalgamation {
        poset,
        pi_x,
        pi_y,
        gamma,
        e_x: e_x.clone(),
        e_y: e_y.clone(),
        origin,
    })
}

/// Decides `level`-coherence (0 to 3) of a polarity.
///
/// Levels 0 to 2 are decided by the least quasiorder containing the
/// generating pairs. At level 3, when `e_X` and `e_Y` are meet- and
/// join-extensions, the only possible witness is the quasiorder of
/// [`galois_quasiorder`], which is tested directly; otherwise the least
/// quasiorder is tested, which can only confirm coherence.
pub fn check_coherence(pol: &ExtensionPolarity, level: u8, limits: &Limits) -> Result<bool> {
    if level > 3 {
        return Err(Error::InvalidSpecification(format!("coherence level {level} (expected 0 to 3)")));
    }
    let base = pol.e_x.source();
    if level == 3 && base.len() > limits.subsets {
        return Err(Error::size("coherence subset enumeration", limits.subsets, base.len()));
    }
    let (nx, ny) = (pol.e_x.target().len(), pol.e_y.target().len());
    let n = nx + ny;
    let mut rows = vec![ElemSet::with_capacity(n); n];
    for x in 0..nx {
        rows[x].extend(pol.e_x.target().up(x).ones());
        rows[x].extend(pol.relation[x].ones().map(|y| nx + y));
    }
    for y in 0..ny {
        rows[nx + y].extend(pol.e_y.target().up(y).ones().map(|v| nx + v));
    }
    if level >= 1 {
        for p in 0..base.len() {
            let (x, y) = (pol.e_x.apply(p), nx + pol.e_y.apply(p));
            rows[x].insert(y);
            rows[y].insert(x);
        }
    }
    close_relation(&mut rows);
    if !restriction_ok(pol, &rows, level >= 2) {
        return Ok(false);
    }
    if level < 3 {
        return Ok(true);
    }
    if pol.e_x.is_meet_extension() && pol.e_y.is_join_extension() {
        let q = match galois_quasiorder(pol) {
            Ok(q) => q,
            Err(_) => return Ok(false),
        };
        let candidate: Vec<ElemSet> = (0..n).map(|i| q.row(i).clone()).collect();
        let identified = (0..base.len()).all(|p| {
            let (x, y) = (pol.e_x.apply(p), nx + pol.e_y.apply(p));
            candidate[x].contains(y) && candidate[y].contains(x)
        });
        if !identified || !restriction_ok(pol, &candidate, true) {
            return Ok(false);
        }
        Ok(preserves_base_bounds(pol, &candidate))
    } else {
        Ok(preserves_base_bounds(pol, &rows))
    }
}

fn restriction_ok(pol: &ExtensionPolarity, rows: &[ElemSet], embeddings: bool) -> bool {
    let (x, y) = (pol.e_x.target(), pol.e_y.target());
    let nx = x.len();
    for i in 0..nx {
        for j in 0..y.len() {
            if rows[i].contains(nx + j) != pol.related(i, j) {
                return false;
            }
        }
    }
    if embeddings {
        for i in 0..nx {
            for k in 0..nx {
                if rows[i].contains(k) != x.leq(i, k) {
                    return false;
                }
            }
        }
        for j in 0..y.len() {
            for k in 0..y.len() {
                if rows[nx + j].contains(nx + k) != y.leq(j, k) {
                    return false;
                }
            }
        }
    }
    true
}

/// Every meet of `e_X[S]` existing in `X` stays a meet in the quasiorder,
/// and dually for joins of `e_Y[T]`, over all subsets of the base.
fn preserves_base_bounds(pol: &ExtensionPolarity, rows: &[ElemSet]) -> bool {
    let n = rows.len();
    let nx = pol.e_x.target().len();
    let mut cols = vec![ElemSet::with_capacity(n); n];
    for (i, r) in rows.iter().enumerate() {
        for j in r.ones() {
            cols[j].insert(i);
        }
    }
    let all = {
        let mut s = ElemSet::with_capacity(n);
        s.insert_range(..);
        s
    };
    let base: Vec<usize> = (0..pol.e_x.source().len()).collect();
    each_subset(&base, base.len(), |s| {
        let xs = pol.e_x.target().set_of(s.iter().map(|&p| pol.e_x.apply(p)));
        if let Some(m) = pol.e_x.target().meet_set(&xs) {
            let mut lb = all.clone();
            for x in xs.ones() {
                lb.intersect_with(&cols[x]);
            }
            if !lb.is_subset(&cols[m]) {
                return false;
            }
        }
        let ys = pol.e_y.target().set_of(s.iter().map(|&p| pol.e_y.apply(p)));
        if let Some(j) = pol.e_y.target().join_set(&ys) {
            let mut ub = all.clone();
            for y in ys.ones() {
                ub.intersect_with(&rows[nx + y]);
            }
            if !ub.is_subset(&rows[nx + j]) {
                return false;
            }
        }
        true
    })
}

/// The unique `u : A → Q` with `u ∘ π_X = f` and `u ∘ π_Y = g`.
pub fn universal_lift(am: &Amalgamation, f: &MonotoneMap, g: &MonotoneMap) -> Result<MonotoneMap> {
    if !same_poset(f.source(), am.e_x.target())
        || !same_poset(g.source(), am.e_y.target())
        || !same_poset(f.target(), g.target())
    {
        return Err(Error::BaseMismatch);
    }
    let base = am.e_x.source();
    for p in 0..base.len() {
        if f.apply(am.e_x.apply(p)) != g.apply(am.e_y.apply(p)) {
            return Err(Error::BaseDisagreement(base.name(p).to_string()));
        }
    }
    let q = f.target();
    let a = &am.poset;
    for x in 0..f.source().len() {
        for y in 0..g.source().len() {
            if a.leq(am.pi_y.apply(y), am.pi_x.apply(x)) && !q.leq(g.apply(y), f.apply(x)) {
                return Err(Error::SideConditionViolated {
                    x: f.source().name(x).to_string(),
                    y: g.source().name(y).to_string(),
                });
            }
        }
    }
    let mut assign = vec![usize::MAX; a.len()];
    for (x, &ax) in am.pi_x.assign().iter().enumerate() {
        assign[ax] = f.apply(x);
    }
    for (y, &ay) in am.pi_y.assign().iter().enumerate() {
        if assign[ay] == usize::MAX {
            assign[ay] = g.apply(y);
        }
    }
    MonotoneMap::new(a.clone(), q.clone(), assign)
}

/// `(A^∂, π_Y^∂, π_X^∂)`: the amalgamation of the dual extensions `e_Y^∂`, `e_X^∂`.
pub fn dual_amalgamation(am: &Amalgamation) -> Amalgamation {
    let p = Arc::new(am.e_x.source().dual());
    let x = Arc::new(am.e_x.target().dual());
    let y = Arc::new(am.e_y.target().dual());
    let a = Arc::new(am.poset.dual());
    let origin = am
        .origin
        .iter()
        .map(|o| match *o {
            Origin::Base(i) => Origin::Base(i),
            Origin::X(i) => Origin::Y(i),
            Origin::Y(i) => Origin::X(i),
        })
        .collect();
    Amalgamation {
        poset: a.clone(),
        pi_x: am.pi_y.dual_between(y.clone(), a.clone()),
        pi_y: am.pi_x.dual_between(x.clone(), a.clone()),
        gamma: am.gamma.dual_between(p.clone(), a),
        e_x: am.e_y.dual_between(p.clone(), y),
        e_y: am.e_x.dual_between(p, x),
        origin,
    }
}

/// Amalgamation of componentwise product extensions, realised inside the
/// product of the componentwise amalgamations. Each base must be bounded,
/// every `y` must lie above some base image and every `x` below one.
pub fn product_amalgamation(components: &[(ExtensionMap, ExtensionMap)], limits: &Limits) -> Result<Amalgamation> {
    if components.is_empty() {
        return Err(Error::InvalidSpecification("product of an empty sequence".into()));
    }
    let mut parts = Vec::with_capacity(components.len());
    for (i, (e_x, e_y)) in components.iter().enumerate() {
        check_kinds(e_x, e_y)?;
        let p = e_x.source();
        if !p.is_bounded() {
            return Err(Error::HypothesisViolated {
                component: i,
                condition: "base poset is not bounded".into(),
            });
        }
        if let Some(y) = (0..e_y.target().len()).find(|&y| e_y.lower_preimage(y).is_clear()) {
            return Err(Error::HypothesisViolated {
                component: i,
                condition: format!("`{}` is above no base image", e_y.target().name(y)),
            });
        }
        if let Some(x) = (0..e_x.target().len()).find(|&x| e_x.upper_preimage(x).is_clear()) {
            return Err(Error::HypothesisViolated {
                component: i,
                condition: format!("`{}` is below no base image", e_x.target().name(x)),
            });
        }
        parts.push(canonical_amalgamation_with(e_x, e_y, limits)?);
    }
    let ps: Vec<&FinitePoset> = components.iter().map(|(e, _)| &**e.source()).collect();
    let xs: Vec<&FinitePoset> = components.iter().map(|(e, _)| &**e.target()).collect();
    let ys: Vec<&FinitePoset> = components.iter().map(|(_, e)| &**e.target()).collect();
    let as_: Vec<&FinitePoset> = parts.iter().map(|a| &**a.poset()).collect();
    let pp = Arc::new(FinitePoset::product_with_limits(&ps, limits)?);
    let xp = Arc::new(FinitePoset::product_with_limits(&xs, limits)?);
    let yp = Arc::new(FinitePoset::product_with_limits(&ys, limits)?);
    let ap = FinitePoset::product_with_limits(&as_, limits)?;
    let ex_maps: Vec<&MonotoneMap> = components.iter().map(|(e, _)| e.map()).collect();
    let ey_maps: Vec<&MonotoneMap> = components.iter().map(|(_, e)| e.map()).collect();
    let pix_maps: Vec<&MonotoneMap> = parts.iter().map(|a| a.pi_x()).collect();
    let piy_maps: Vec<&MonotoneMap> = parts.iter().map(|a| a.pi_y()).collect();
    let ex = product_assign(&ex_maps);
    let ey = product_assign(&ey_maps);
    let pix = product_assign(&pix_maps);
    let piy = product_assign(&piy_maps);

    let mut keep = ap.empty_set();
    keep.extend(pix.iter().copied());
    keep.extend(piy.iter().copied());
    let (sub, old) = ap.restrict(&keep);
    let mut new_index = vec![usize::MAX; ap.len()];
    for (k, &o) in old.iter().enumerate() {
        new_index[o] = k;
    }
    let sub = Arc::new(sub);
    let pi_x = MonotoneMap::new_unchecked(xp.clone(), sub.clone(), pix.iter().map(|&a| new_index[a]).collect());
    let pi_y = MonotoneMap::new_unchecked(yp.clone(), sub.clone(), piy.iter().map(|&a| new_index[a]).collect());
    let e_x = ExtensionMap::new(MonotoneMap::new_unchecked(pp.clone(), xp, ex));
    let e_y = ExtensionMap::new(MonotoneMap::new_unchecked(pp.clone(), yp, ey));
    let gamma = MonotoneMap::new_unchecked(pp.clone(), sub.clone(), (0..pp.len()).map(|p| pi_x.apply(e_x.apply(p))).collect());
    let mut origin = vec![Origin::X(0); sub.len()];
    for (y, &a) in pi_y.assign().iter().enumerate() {
        origin[a] = Origin::Y(y);
    }
    for (x, &a) in pi_x.assign().iter().enumerate() {
        origin[a] = Origin::X(x);
    }
    for p in 0..pp.len() {
        origin[gamma.apply(p)] = Origin::Base(p);
    }
    Ok(Amalgamation {
        poset: sub,
        pi_x,
        pi_y,
        gamma,
        e_x,
        e_y,
        origin,
    })
}

/// Componentwise action of `maps` on mixed-radix product indices.
pub(crate) fn product_assign(maps: &[&MonotoneMap]) -> Vec<usize> {
    let src = ProductShape::new(maps.iter().map(|m| m.source().len()).collect());
    let dst = ProductShape::new(maps.iter().map(|m| m.target().len()).collect());
    (0..src.size())
        .map(|i| {
            let coords: Vec<usize> = src
                .decode(i)
                .iter()
                .zip(maps)
                .map(|(&c, m)| m.apply(c))
                .collect();
            dst.encode(&coords)
        })
        .collect()
}
