//! Lifting order-preserving maps along meet- and join-extensions, and from
//! there to canonical amalgamations.

use std::collections::HashSet;

use crate::amalgamation::{universal_lift, Amalgamation};
use crate::error::{Error, Result};
use crate::extension::{is_alpha_supported, is_alpha_supported_join, ExtensionMap};
use crate::map::{same_poset, MonotoneMap};
use crate::poset::ElemSet;
use crate::spec::{BoundKind, Cardinal};
use crate::subsets::{check_budget, each_subset};
use crate::Limits;

/// The partial map `x ↦ ⋀f[e⁻¹(x↑)]` (or dually `y ↦ ⋁f[e⁻¹(y↓)]`),
/// defined exactly where that bound exists.
#[derive(Debug, Clone)]
pub struct PartialLift {
    extension: ExtensionMap,
    base_map: MonotoneMap,
    kind: BoundKind,
    values: Vec<Option<usize>>,
}

impl PartialLift {
    pub fn extension(&self) -> &ExtensionMap {
        &self.extension
    }

    pub fn base_map(&self) -> &MonotoneMap {
        &self.base_map
    }

    /// `Meet` for lifts along meet-extensions, `Join` for the dual.
    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn value(&self, x: usize) -> Option<usize> {
        self.values[x]
    }

    pub fn values(&self) -> &[Option<usize>] {
        &self.values
    }

    pub fn domain(&self) -> ElemSet {
        let t = self.extension.target();
        t.set_of(self.values.iter().enumerate().filter_map(|(x, v)| v.map(|_| x)))
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// First element outside the domain, in canonical order.
    pub fn first_gap(&self) -> Option<usize> {
        self.values.iter().position(Option::is_none)
    }

    /// The lift as a total map, if it is one.
    pub fn to_map(&self) -> Option<MonotoneMap> {
        let assign: Option<Vec<usize>> = self.values.iter().copied().collect();
        Some(MonotoneMap::new_unchecked(
            self.extension.target().clone(),
            self.base_map.target().clone(),
            assign?,
        ))
    }
}

fn check_source(f: &MonotoneMap, e: &ExtensionMap) -> Result<()> {
    if !same_poset(f.source(), e.source()) {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

fn lift_values(f: &MonotoneMap, e: &ExtensionMap, kind: BoundKind) -> Vec<Option<usize>> {
    let q = f.target();
    (0..e.target().len())
        .map(|x| match kind {
            BoundKind::Meet => q.meet_set(&f.image_of(&e.upper_preimage(x))),
            BoundKind::Join => q.join_set(&f.image_of(&e.lower_preimage(x))),
        })
        .collect()
}

/// `f_X` for a meet-extension `e_X` sharing its source with `f`.
pub fn partial_lift(f: &MonotoneMap, e_x: &ExtensionMap) -> Result<PartialLift> {
    check_source(f, e_x)?;
    e_x.require_meet("the lifting extension")?;
    Ok(PartialLift {
        values: lift_values(f, e_x, BoundKind::Meet),
        extension: e_x.clone(),
        base_map: f.clone(),
        kind: BoundKind::Meet,
    })
}

/// `f_Y` for a join-extension `e_Y`.
pub fn partial_lift_join(f: &MonotoneMap, e_y: &ExtensionMap) -> Result<PartialLift> {
    check_source(f, e_y)?;
    e_y.require_join("the lifting extension")?;
    Ok(PartialLift {
        values: lift_values(f, e_y, BoundKind::Join),
        extension: e_y.clone(),
        base_map: f.clone(),
        kind: BoundKind::Join,
    })
}

pub fn has_enough_meets(f: &MonotoneMap, e_x: &ExtensionMap) -> Result<bool> {
    Ok(partial_lift(f, e_x)?.is_total())
}

pub fn has_enough_joins(f: &MonotoneMap, e_y: &ExtensionMap) -> Result<bool> {
    Ok(partial_lift_join(f, e_y)?.is_total())
}

/// One instance of the continuity condition: for the subset `s` of
/// `f⁻¹(q↑)`, `q_s = ⋀f[s] = f_X(x_s)` and `s ⊆ e⁻¹(x_s↑)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuityWitness {
    pub q: usize,
    pub s: Vec<usize>,
    pub q_s: usize,
    pub x_s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Continuity {
    /// One witness per distinct subset, in enumeration order.
    pub witnesses: Vec<ContinuityWitness>,
    /// The first `(q, S)` with no witness.
    pub failure: Option<(usize, Vec<usize>)>,
}

impl Continuity {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Whether `f` is `(alpha, e_X)`-continuous, quantifying over non-empty
/// subsets only. See [`continuity`] for the full report.
pub fn is_alpha_continuous(f: &MonotoneMap, e_x: &ExtensionMap, alpha: Cardinal, limits: &Limits) -> Result<bool> {
    Ok(continuity(f, e_x, alpha, false, limits)?.holds())
}

/// Dual of [`is_alpha_continuous`] for a join-extension.
pub fn is_beta_continuous_join(f: &MonotoneMap, e_y: &ExtensionMap, beta: Cardinal, limits: &Limits) -> Result<bool> {
    Ok(continuity_join(f, e_y, beta, false, limits)?.holds())
}

/// Checks the continuity condition for every `q` and every `S ⊆ f⁻¹(q↑)`
/// with `|S| < alpha`. The empty set is only considered when
/// `include_empty` is set; it asks for `Q` to have a top that some
/// `x` lifts to. Witnesses `x_S` are the first that work in canonical order.
pub fn continuity(
    f: &MonotoneMap,
    e_x: &ExtensionMap,
    alpha: Cardinal,
    include_empty: bool,
    limits: &Limits,
) -> Result<Continuity> {
    let lift = partial_lift(f, e_x)?;
    search_witnesses(&lift, alpha, include_empty, limits)
}

/// Dual of [`continuity`]: `S ⊆ f⁻¹(q↓)`, `q_S = ⋁f[S] = f_Y(y_S)`.
pub fn continuity_join(
    f: &MonotoneMap,
    e_y: &ExtensionMap,
    beta: Cardinal,
    include_empty: bool,
    limits: &Limits,
) -> Result<Continuity> {
    let lift = partial_lift_join(f, e_y)?;
    search_witnesses(&lift, beta, include_empty, limits)
}

fn search_witnesses(lift: &PartialLift, alpha: Cardinal, include_empty: bool, limits: &Limits) -> Result<Continuity> {
    let f = &lift.base_map;
    let e = &lift.extension;
    let (p, q) = (f.source(), f.target());
    let meet = lift.kind == BoundKind::Meet;
    let mut report = Continuity {
        witnesses: Vec::new(),
        failure: None,
    };
    let Some(max) = alpha.max_size(p.len()) else {
        return Ok(report);
    };
    let cones: Vec<ElemSet> = (0..e.target().len())
        .map(|x| if meet { e.upper_preimage(x) } else { e.lower_preimage(x) })
        .collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for target in 0..q.len() {
        let pre = if meet { f.preimage_up(target) } else { f.preimage_down(target) };
        let items: Vec<usize> = pre.ones().collect();
        check_budget("continuity subsets", items.len(), max, limits)?;
        let mut failed = None;
        each_subset(&items, max, |s| {
            if (s.is_empty() && !include_empty) || seen.contains(s) {
                return true;
            }
            seen.insert(s.to_vec());
            let img = q.set_of(s.iter().map(|&i| f.apply(i)));
            let bound = if meet { q.meet_set(&img) } else { q.join_set(&img) };
            let witness = bound.and_then(|q_s| {
                (0..cones.len())
                    .find(|&x| lift.values[x] == Some(q_s) && s.iter().all(|&i| cones[x].contains(i)))
                    .map(|x_s| (q_s, x_s))
            });
            match witness {
                Some((q_s, x_s)) => {
                    report.witnesses.push(ContinuityWitness {
                        q: target,
                        s: s.to_vec(),
                        q_s,
                        x_s,
                    });
                    true
                }
                None => {
                    failed = Some((target, s.to_vec()));
                    false
                }
            }
        });
        if failed.is_some() {
            report.failure = failed;
            return Ok(report);
        }
    }
    Ok(report)
}

/// The map `λ : A → Q` through which `f` factors, assembled from the
/// total lifts `f_X` and `f_Y`. The extensions must be `alpha`- and
/// `beta`-supported respectively.
pub fn lift_lambda(
    f: &MonotoneMap,
    am: &Amalgamation,
    alpha: Cardinal,
    beta: Cardinal,
    limits: &Limits,
) -> Result<MonotoneMap> {
    let fx = partial_lift(f, am.e_x())?;
    if let Some(x) = fx.first_gap() {
        return Err(Error::NotEnoughMeets(am.e_x().target().name(x).to_string()));
    }
    let fy = partial_lift_join(f, am.e_y())?;
    if let Some(y) = fy.first_gap() {
        return Err(Error::NotEnoughJoins(am.e_y().target().name(y).to_string()));
    }
    if !is_alpha_supported(am.e_x(), alpha, limits)? {
        return Err(Error::PreconditionFailed(format!("meet-extension is not {alpha}-supported")));
    }
    if !is_alpha_supported_join(am.e_y(), beta, limits)? {
        return Err(Error::PreconditionFailed(format!("join-extension is not {beta}-supported")));
    }
    let (Some(fx), Some(fy)) = (fx.to_map(), fy.to_map()) else {
        unreachable!("totality checked above");
    };
    universal_lift(am, &fx, &fy)
}

/// Whether `g` preserves every meet of a non-empty subset of `within`
/// with fewer than `alpha` elements, wherever that meet exists in the source.
pub fn preserves_meets_within(g: &MonotoneMap, within: &ElemSet, alpha: Cardinal, limits: &Limits) -> Result<bool> {
    preserves_bounds_within(g, within, alpha, BoundKind::Meet, limits)
}

/// Dual of [`preserves_meets_within`].
pub fn preserves_joins_within(g: &MonotoneMap, within: &ElemSet, beta: Cardinal, limits: &Limits) -> Result<bool> {
    preserves_bounds_within(g, within, beta, BoundKind::Join, limits)
}

fn preserves_bounds_within(
    g: &MonotoneMap,
    within: &ElemSet,
    alpha: Cardinal,
    kind: BoundKind,
    limits: &Limits,
) -> Result<bool> {
    let (a, q) = (g.source(), g.target());
    let items: Vec<usize> = within.ones().collect();
    let Some(max) = alpha.max_size(items.len()) else {
        return Ok(true);
    };
    check_budget("preservation subsets", items.len(), max, limits)?;
    Ok(each_subset(&items, max, |s| {
        if s.is_empty() {
            return true;
        }
        let set = a.set_of(s.iter().copied());
        let img = q.set_of(s.iter().map(|&i| g.apply(i)));
        match kind {
            BoundKind::Meet => a.meet_set(&set).is_none_or(|m| q.is_meet_of(g.apply(m), &img)),
            BoundKind::Join => a.join_set(&set).is_none_or(|m| q.is_join_of(g.apply(m), &img)),
        }
    }))
}

/// The X-morphism condition: every `f⁻¹(q↑)` is some `e⁻¹(x↑)`.
pub fn is_x_morphism(f: &MonotoneMap, e_x: &ExtensionMap) -> bool {
    let cones: HashSet<ElemSet> = (0..e_x.target().len()).map(|x| e_x.upper_preimage(x)).collect();
    (0..f.target().len()).all(|q| cones.contains(&f.preimage_up(q)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shared(p: &FinitePoset) -> Arc<FinitePoset> {
        Arc::new(p.clone())
    }
    use crate::amalgamation::canonical_amalgamation;
    use crate::completion::macneille;
    use crate::extension::{filter_extension, ideal_extension};
    use crate::poset::FinitePoset;
    use crate::spec::Specification;
    use std::sync::Arc;

    fn dom_meet() -> (MonotoneMap, ExtensionMap) {
        let p = shared(&FinitePoset::antichain(&["a", "b", "c", "d"]).unwrap());
        let q = shared(
            &FinitePoset::from_relations(
                &["a", "b", "c", "d", "q"],
                &[("q", "a"), ("q", "b"), ("q", "c")],
            )
            .unwrap(),
        );
        let x = shared(
            &FinitePoset::from_relations(
                &["a", "b", "c", "d", "x", "y"],
                &[("x", "a"), ("x", "b"), ("x", "c"), ("y", "b"), ("y", "c"), ("y", "d")],
            )
            .unwrap(),
        );
        let f = MonotoneMap::by_name(p.clone(), q).unwrap();
        let e = ExtensionMap::new(MonotoneMap::by_name(p, x).unwrap());
        (f, e)
    }

    #[test]
    fn dom_meet_lift_is_partial() {
        let (f, e) = dom_meet();
        assert!(e.is_meet_extension());
        let lift = partial_lift(&f, &e).unwrap();
        let x = e.target().index_of("x").unwrap();
        let y = e.target().index_of("y").unwrap();
        assert_eq!(lift.value(x), f.target().index_of("q"));
        assert_eq!(lift.value(y), None);
        assert!(!has_enough_meets(&f, &e).unwrap());
        let l = Limits::default();
        assert!(is_alpha_continuous(&f, &e, Cardinal::Omega, &l).unwrap());
        // the empty subset would need a top in Q
        assert!(!continuity(&f, &e, Cardinal::Omega, true, &l).unwrap().holds());
    }

    #[test]
    fn dom_meet_bc_has_meet_in_domain_only() {
        let (f, e) = dom_meet();
        let lift = partial_lift(&f, &e).unwrap();
        let t = e.target();
        let bc = t.set_of_names(&["b", "c"]).unwrap();
        assert_eq!(t.meet_set(&bc), None);
        let dom = lift.domain();
        let lower: Vec<usize> = t.lower_bounds(&bc).intersection(&dom).collect();
        assert_eq!(lower, vec![t.index_of("x").unwrap()]);
    }

    #[test]
    fn identity_extension_lifts_to_f() {
        let (f, _) = dom_meet();
        let e = ExtensionMap::identity(f.source().clone());
        let lift = partial_lift(&f, &e).unwrap();
        assert_eq!(lift.to_map().unwrap().assign(), f.assign());
    }

    #[test]
    fn complete_target_gives_total_lift() {
        let (f, e) = dom_meet();
        let l = Limits::default();
        let m = macneille(f.target(), &l).unwrap();
        let g = f.then(m.map()).unwrap();
        assert!(has_enough_meets(&g, &e).unwrap());
        let wrong = ExtensionMap::identity(shared(&FinitePoset::antichain(&["z"]).unwrap()));
        assert_eq!(partial_lift(&g, &wrong).unwrap_err(), Error::BaseMismatch);
    }

    #[test]
    fn alpha_one_is_vacuous() {
        let (f, e) = dom_meet();
        let l = Limits::default();
        let c = continuity(&f, &e, Cardinal::Finite(1), false, &l).unwrap();
        assert!(c.holds() && c.witnesses.is_empty());
    }

    #[test]
    fn lambda_of_gamma_is_identity() {
        let p = shared(&FinitePoset::antichain(&["a", "b"]).unwrap());
        let l = Limits::default();
        let d = Specification::all_defined(p.clone(), BoundKind::Meet);
        let u = Specification::all_defined(p.clone(), BoundKind::Join);
        let fx = filter_extension(&d, &l).unwrap();
        let iy = ideal_extension(&u, &l).unwrap();
        let am = canonical_amalgamation(&fx.extension, &iy.extension).unwrap();
        let lam = lift_lambda(am.gamma(), &am, Cardinal::Omega, Cardinal::Omega, &l).unwrap();
        assert!(lam.assign().iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn lambda_into_four_element_lattice() {
        let p = shared(&FinitePoset::antichain(&["a", "b"]).unwrap());
        let l = Limits::default();
        let b2 = shared(
            &FinitePoset::from_relations(
                &["0", "a", "b", "1"],
                &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
            )
            .unwrap(),
        );
        let f = MonotoneMap::from_names(p.clone(), b2.clone(), &[("a", "a"), ("b", "b")]).unwrap();
        let d = Specification::all_defined(p.clone(), BoundKind::Meet);
        let u = Specification::all_defined(p.clone(), BoundKind::Join);
        let fx = filter_extension(&d, &l).unwrap();
        let iy = ideal_extension(&u, &l).unwrap();
        let am = canonical_amalgamation(&fx.extension, &iy.extension).unwrap();
        let lam = lift_lambda(&f, &am, Cardinal::Omega, Cardinal::Omega, &l).unwrap();
        assert!(lam.is_isomorphism());
        assert_eq!(am.gamma().then(&lam).unwrap().assign(), f.assign());
        let on_x = am.pi_x().image();
        let on_y = am.pi_y().image();
        assert!(preserves_meets_within(&lam, &on_x, Cardinal::Omega, &l).unwrap());
        assert!(preserves_joins_within(&lam, &on_y, Cardinal::Omega, &l).unwrap());
    }

    #[test]
    fn missing_joins_are_reported() {
        let (f, e) = dom_meet();
        let ey = ExtensionMap::identity(f.source().clone());
        let am = canonical_amalgamation(&e, &ey).unwrap();
        let err = lift_lambda(&f, &am, Cardinal::Omega, Cardinal::Omega, &Limits::default()).unwrap_err();
        assert_eq!(err, Error::NotEnoughMeets("y".into()));
    }
}
