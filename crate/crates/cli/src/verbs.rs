use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use amalgam::extension::{nonempty_downsets, nonempty_upsets};
use amalgam::format::{gamma_table, parse_family, parse_map, parse_poset, write_map, NodeRole, PosetFile};
use amalgam::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::{Cli, FamilyChoice, Triple, Verb};
use crate::error::{CliError, CliResult};
use crate::report::{dot, input_hash, names_of, poset_json, Report};

/// Reads input files and remembers their bytes for the input hash.
#[derive(Default)]
struct Inputs {
    parts: Vec<Vec<u8>>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.parts.push(text.as_bytes().to_vec());
        Ok(text)
    }

    fn param(&mut self, value: impl ToString) {
        self.parts.push(value.to_string().into_bytes());
    }

    fn poset(&mut self, path: &Path) -> CliResult<PosetFile> {
        let text = self.read(path)?;
        Ok(parse_poset(&text)?)
    }

    /// A map file, or matching by name when no file is given.
    fn map(&mut self, path: Option<&Path>, source: &Arc<FinitePoset>, target: &Arc<FinitePoset>) -> CliResult<MonotoneMap> {
        match path {
            Some(path) => {
                let text = self.read(path)?;
                Ok(parse_map(&text, source.clone(), target.clone())?)
            }
            None => Ok(MonotoneMap::by_name(source.clone(), target.clone())?),
        }
    }

    fn triple(&mut self, t: &Triple) -> CliResult<(PosetFile, ExtensionMap, ExtensionMap)> {
        let base = self.poset(&t.base)?;
        let x = self.poset(&t.x)?;
        let y = self.poset(&t.y)?;
        let e_x = ExtensionMap::new(self.map(t.ex.as_deref(), &base.poset, &x.poset)?);
        let e_y = ExtensionMap::new(self.map(t.ey.as_deref(), &base.poset, &y.poset)?);
        Ok((base, e_x, e_y))
    }

    fn hash(&self) -> String {
        input_hash(&self.parts)
    }
}

pub fn run(cli: &Cli) -> CliResult<(Report, String)> {
    let limits = cli.caps.limits();
    let mut inputs = Inputs::default();
    let report = match &cli.verb {
        Verb::Amalgamate(t) => amalgamate(&mut inputs, t, &limits)?,
        Verb::Macneille { input } => macneille_verb(&mut inputs, input, &limits)?,
        Verb::CanonicalExtension {
            input,
            filters,
            ideals,
            filter_file,
            ideal_file,
        } => {
            let file = inputs.poset(input)?;
            inputs.param(format!("{filters:?}/{ideals:?}"));
            let fs = family(&mut inputs, &file, *filters, filter_file.as_deref(), BoundKind::Meet, &limits)?;
            let is = family(&mut inputs, &file, *ideals, ideal_file.as_deref(), BoundKind::Join, &limits)?;
            canonical_extension_verb(&file, fs, is, &limits)?
        }
        Verb::Lift {
            base,
            x,
            ex,
            y,
            ey,
            target,
            f,
            alpha,
            beta,
        } => {
            let p = inputs.poset(base)?;
            let xf = inputs.poset(x)?;
            let e_x = ExtensionMap::new(inputs.map(ex.as_deref(), &p.poset, &xf.poset)?);
            let q = inputs.poset(target)?;
            let f = inputs.map(Some(f), &p.poset, &q.poset)?;
            inputs.param(alpha);
            inputs.param(beta);
            match y {
                Some(y) => {
                    let yf = inputs.poset(y)?;
                    let e_y = ExtensionMap::new(inputs.map(ey.as_deref(), &p.poset, &yf.poset)?);
                    lift_amalgamation(&f, &e_x, &e_y, *alpha, *beta, &limits)?
                }
                None => lift_partial(&f, &e_x, *alpha, &limits)?,
            }
        }
        Verb::BuildChain { input, stages } => {
            let file = inputs.poset(input)?;
            inputs.param(stages);
            build_chain_verb(&file, *stages, &limits)?
        }
        Verb::WordProblem { input, lhs, rhs } => {
            let file = inputs.poset(input)?;
            inputs.param(lhs);
            inputs.param(rhs);
            word_problem(&file, lhs, rhs, &limits)?
        }
        Verb::Rank {
            input,
            stages,
            term,
            element,
        } => {
            let file = inputs.poset(input)?;
            inputs.param(stages);
            for extra in [term, element].into_iter().flatten() {
                inputs.param(extra);
            }
            rank_verb(&file, *stages, term.as_deref(), element.as_deref(), &limits)?
        }
        Verb::Coherence { triple, relation } => {
            let (_, e_x, e_y) = inputs.triple(triple)?;
            let pol = match relation {
                Some(path) => {
                    let text = inputs.read(path)?;
                    let pairs = parse_relation(&text, e_x.target(), e_y.target())?;
                    ExtensionPolarity::new(e_x, e_y, &pairs)?
                }
                None => minimal_relation(&e_x, &e_y)?,
            };
            coherence(&pol, &limits)?
        }
        Verb::ProductAmalgamate { triple, copies } => {
            let (_, e_x, e_y) = inputs.triple(triple)?;
            inputs.param(copies);
            product(&e_x, &e_y, *copies, &limits)?
        }
        Verb::Verify { input, seed, cases } => {
            let file = inputs.poset(input)?;
            inputs.param(seed);
            inputs.param(cases);
            verify(&file, *seed, *cases, &limits)?
        }
    };
    Ok((report, inputs.hash()))
}

fn origin_role(o: Origin) -> NodeRole {
    match o {
        Origin::Base(_) => NodeRole::Base,
        Origin::X(_) => NodeRole::Filter,
        Origin::Y(_) => NodeRole::Ideal,
    }
}

fn amalgamate(inputs: &mut Inputs, t: &Triple, limits: &Limits) -> CliResult<Report> {
    let (base, e_x, e_y) = inputs.triple(t)?;
    let am = canonical_amalgamation_with(&e_x, &e_y, limits)?;
    let a = am.poset();
    let mut provenance = String::from("element\torigin\n");
    for z in 0..a.len() {
        let origin = match am.origin(z) {
            Origin::Base(p) => format!("base {}", base.poset.name(p)),
            Origin::X(x) => format!("X {}", e_x.target().name(x)),
            Origin::Y(y) => format!("Y {}", e_y.target().name(y)),
        };
        let _ = writeln!(provenance, "{}\t{origin}", a.name(z));
    }
    let mut tsv = String::from("map\tsource\ttarget\n");
    for (label, m) in [("pi_X", am.pi_x()), ("pi_Y", am.pi_y())] {
        for (s, &z) in m.assign().iter().enumerate() {
            let _ = writeln!(tsv, "{label}\t{}\t{}", m.source().name(s), a.name(z));
        }
    }
    Ok(Report {
        summary: a.len().to_string(),
        sizes: Some(a.len().to_string()),
        dot: Some(dot(&format!("{}_amalgamation", base.name), a, |z| origin_role(am.origin(z)))),
        provenance: Some(provenance),
        tsv: Some(tsv),
        results: vec![json!({ "amalgamation": poset_json(a) })],
        ..Report::default()
    })
}

fn macneille_verb(inputs: &mut Inputs, input: &Path, limits: &Limits) -> CliResult<Report> {
    let file = inputs.poset(input)?;
    let m = macneille(&file.poset, limits)?;
    let c = m.target();
    let image = m.map().image();
    let mut provenance = String::from("element\tcut\n");
    for z in 0..c.len() {
        let _ = writeln!(provenance, "{}\t{{{}}}", c.name(z), names_of(&file.poset, m.map().preimage_down(z).ones()));
    }
    Ok(Report {
        summary: c.len().to_string(),
        sizes: Some(c.len().to_string()),
        dot: Some(dot(&format!("{}_macneille", file.name), c, |z| {
            if image.contains(z) {
                NodeRole::Base
            } else {
                NodeRole::Plain
            }
        })),
        provenance: Some(provenance),
        results: vec![json!({ "completion": poset_json(c) })],
        ..Report::default()
    })
}

fn family(
    inputs: &mut Inputs,
    file: &PosetFile,
    choice: FamilyChoice,
    path: Option<&Path>,
    kind: BoundKind,
    limits: &Limits,
) -> CliResult<Vec<ElemSet>> {
    let p = &file.poset;
    if choice == FamilyChoice::File {
        let path = path.ok_or_else(|| {
            let flag = if kind == BoundKind::Meet { "--filter-file" } else { "--ideal-file" };
            CliError::Usage(format!("`file` needs {flag}"))
        })?;
        let text = inputs.read(path)?;
        return Ok(parse_family(&text, p, kind)?);
    }
    Ok(match (choice, kind) {
        (FamilyChoice::Principal, BoundKind::Meet) => (0..p.len()).map(|a| p.up(a).clone()).collect(),
        (FamilyChoice::Principal, BoundKind::Join) => (0..p.len()).map(|a| p.down(a).clone()).collect(),
        (FamilyChoice::All, BoundKind::Meet) => nonempty_upsets(p, limits)?,
        (FamilyChoice::All, BoundKind::Join) => nonempty_downsets(p, limits)?,
        (FamilyChoice::Spec, BoundKind::Meet) => filter_extension(&file.meet_spec()?, limits)?.sets,
        (FamilyChoice::Spec, BoundKind::Join) => ideal_extension(&file.join_spec()?, limits)?.sets,
        (FamilyChoice::File, _) => unreachable!(),
    })
}

fn canonical_extension_verb(
    file: &PosetFile,
    filters: Vec<ElemSet>,
    ideals: Vec<ElemSet>,
    limits: &Limits,
) -> CliResult<Report> {
    let p = &file.poset;
    let ce = canonical_extension(p, filters, ideals, limits)?;
    let e = ce.completion.map();
    let c = ce.completion.target();
    let density = verify_density_compactness(e, &ce.filters.sets, &ce.ideals.sets);
    let role = |z: usize| {
        if let Some(a) = (0..p.len()).find(|&a| e.apply(a) == z) {
            (NodeRole::Base, format!("base {}", p.name(a)))
        } else if let Some(f) = (0..ce.filters.sets.len()).find(|&f| ce.pi_filters.apply(f) == z) {
            (NodeRole::Filter, format!("filter {{{}}}", names_of(p, ce.filters.sets[f].ones())))
        } else if let Some(i) = (0..ce.ideals.sets.len()).find(|&i| ce.pi_ideals.apply(i) == z) {
            (NodeRole::Ideal, format!("ideal {{{}}}", names_of(p, ce.ideals.sets[i].ones())))
        } else {
            (NodeRole::Plain, "cut".to_string())
        }
    };
    let mut provenance = String::from("element\torigin\n");
    for z in 0..c.len() {
        let _ = writeln!(provenance, "{}\t{}", c.name(z), role(z).1);
    }
    Ok(Report {
        summary: c.len().to_string(),
        sizes: Some(c.len().to_string()),
        dot: Some(dot(&format!("{}_canonical", file.name), c, |z| role(z).0)),
        provenance: Some(provenance),
        results: vec![json!({
            "completion": poset_json(c),
            "filters": ce.filters.sets.len(),
            "ideals": ce.ideals.sets.len(),
            "dense_and_compact": density.passed(),
            "failures": density.failures,
        })],
        ..Report::default()
    })
}

fn map_table(values: &[(String, Option<String>)]) -> String {
    let mut tsv = String::from("element\tvalue\n");
    for (k, v) in values {
        let _ = writeln!(tsv, "{k}\t{}", v.as_deref().unwrap_or("-"));
    }
    tsv
}

fn lift_partial(f: &MonotoneMap, e_x: &ExtensionMap, alpha: Cardinal, limits: &Limits) -> CliResult<Report> {
    let lift = partial_lift(f, e_x)?;
    let cont = continuity(f, e_x, alpha, false, limits)?;
    let x = e_x.target();
    let q = f.target();
    let values: Vec<(String, Option<String>)> = (0..x.len())
        .map(|i| (x.name(i).to_string(), lift.value(i).map(|v| q.name(v).to_string())))
        .collect();
    let mut summary = format!("# ({alpha}, e_X)-continuous: {}\n", cont.holds());
    for (k, v) in &values {
        match v {
            Some(v) => {
                let _ = writeln!(summary, "{k} -> {v}");
            }
            None => {
                let _ = writeln!(summary, "# {k} undefined");
            }
        }
    }
    let domain = lift.domain().count_ones(..);
    Ok(Report {
        summary,
        sizes: Some(format!("{domain} {}", x.len())),
        tsv: Some(map_table(&values)),
        results: vec![json!({
            "continuous": cont.holds(),
            "total": lift.is_total(),
            "values": values,
        })],
        ..Report::default()
    })
}

fn lift_amalgamation(
    f: &MonotoneMap,
    e_x: &ExtensionMap,
    e_y: &ExtensionMap,
    alpha: Cardinal,
    beta: Cardinal,
    limits: &Limits,
) -> CliResult<Report> {
    let am = canonical_amalgamation_with(e_x, e_y, limits)?;
    let lam = lift_lambda(f, &am, alpha, beta, limits)?;
    let a = am.poset();
    let values: Vec<(String, Option<String>)> = (0..a.len())
        .map(|z| (a.name(z).to_string(), Some(f.target().name(lam.apply(z)).to_string())))
        .collect();
    Ok(Report {
        summary: write_map(&lam),
        sizes: Some(format!("{} {}", a.len(), a.len())),
        tsv: Some(map_table(&values)),
        results: vec![json!({ "total": true, "values": values })],
        ..Report::default()
    })
}

/// The tag an element was born with, followed back through carried copies.
fn birth_role(chain: &ApproxChain, mut k: usize, mut a: usize) -> NodeRole {
    loop {
        match chain.tag(k, a) {
            StageTag::Filter(_) => return NodeRole::Filter,
            StageTag::Ideal(_) => return NodeRole::Ideal,
            StageTag::Carried(_) if k == 0 => return NodeRole::Base,
            StageTag::Carried(prev) => {
                a = *prev;
                k -= 1;
            }
        }
    }
}

fn build_chain_verb(file: &PosetFile, stages: usize, limits: &Limits) -> CliResult<Report> {
    let chain = build_chain(&file.join_spec()?, &file.meet_spec()?, stages, limits)?;
    let sizes: Vec<String> = chain.sizes().iter().map(usize::to_string).collect();
    let last = chain.depth();
    let mut provenance = String::from("stage\telement\trank\torigin\n");
    for k in 0..=last {
        let s = chain.stage(k);
        for a in 0..s.len() {
            let _ = writeln!(provenance, "{k}\t{}\t{}\t{}", s.name(a), chain.stage_rank(k, a), chain.describe(k, a));
        }
    }
    let maps: Vec<MonotoneMap> = (0..last).map(|k| chain.gamma(k).clone()).collect();
    Ok(Report {
        summary: sizes.join(" "),
        sizes: Some(sizes.join(" ")),
        dot: Some(
            (0..=last)
                .map(|k| dot(&format!("{}_stage{k}", file.name), chain.stage(k), |a| birth_role(&chain, k, a)))
                .collect::<Vec<_>>()
                .join("\n"),
        ),
        provenance: Some(provenance),
        tsv: Some(gamma_table(&maps)),
        results: vec![json!({ "sizes": chain.sizes(), "last_stage": poset_json(chain.stage(last)) })],
        ..Report::default()
    })
}

fn check_generators(base: &FinitePoset, terms: &[&Term]) -> CliResult<()> {
    for t in terms {
        for g in t.generators() {
            if base.index_of(g).is_none() {
                return Err(Error::UnboundGenerator(g.to_string()).into());
            }
        }
    }
    Ok(())
}

fn word_problem(file: &PosetFile, lhs: &str, rhs: &str, limits: &Limits) -> CliResult<Report> {
    let s = parse_term(lhs)?;
    let t = parse_term(rhs)?;
    check_generators(&file.poset, &[&s, &t])?;
    let n = s.complexity().max(t.complexity());
    let chain = build_chain(&file.join_spec()?, &file.meet_spec()?, n, limits)?;
    let ans = compare_in_stage(&chain, n, &s, &t)?;
    let stage = chain.stage(n);
    let provenance = format!(
        "term\telement\torigin\n{s}\t{}\t{}\n{t}\t{}\t{}\n",
        stage.name(ans.lhs),
        chain.describe(n, ans.lhs),
        stage.name(ans.rhs),
        chain.describe(n, ans.rhs)
    );
    Ok(Report {
        summary: ans.verdict.to_string(),
        provenance: Some(provenance),
        results: vec![json!({
            "verdict": ans.verdict.to_string(),
            "stage": ans.stage,
            "lhs": stage.name(ans.lhs),
            "rhs": stage.name(ans.rhs),
        })],
        ..Report::default()
    })
}

fn rank_verb(
    file: &PosetFile,
    stages: usize,
    term: Option<&str>,
    element: Option<&str>,
    limits: &Limits,
) -> CliResult<Report> {
    let term = term.map(parse_term).transpose()?;
    if let Some(t) = &term {
        check_generators(&file.poset, &[t])?;
    }
    let n = term.as_ref().map_or(stages, |t| stages.max(t.complexity()));
    let chain = build_chain(&file.join_spec()?, &file.meet_spec()?, n, limits)?;
    let stage = chain.stage(n);
    let r = ranks(stage, &chain.gamma_between(0, n).image());
    let show = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    if let Some(t) = term {
        let z = evaluate_in_stage(&chain, n, &t)?
            .ok_or_else(|| Error::PreconditionFailed(format!("`{t}` has no correspondent in stage {n}")))?;
        return Ok(Report {
            summary: show(r[z]),
            results: vec![json!({ "term": t.to_string(), "stage": n, "element": stage.name(z), "rank": r[z] })],
            ..Report::default()
        });
    }
    if let Some(name) = element {
        let z = stage.require(name)?;
        return Ok(Report {
            summary: show(r[z]),
            results: vec![json!({ "stage": n, "element": name, "rank": r[z] })],
            ..Report::default()
        });
    }
    let mut table = String::from("element\trank\n");
    let mut rows = Vec::new();
    for a in 0..stage.len() {
        let _ = writeln!(table, "{}\t{}", stage.name(a), show(r[a]));
        rows.push(json!([stage.name(a), r[a]]));
    }
    Ok(Report {
        summary: table.clone(),
        tsv: Some(table),
        results: vec![json!({ "stage": n, "ranks": rows })],
        ..Report::default()
    })
}

fn parse_relation(text: &str, x: &FinitePoset, y: &FinitePoset) -> CliResult<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse = |msg: String| Error::Parse { line: i + 1, msg };
        let (a, b) = line
            .split_once("->")
            .ok_or_else(|| parse("expected `x -> y`".into()))?;
        let (a, b) = (a.trim(), b.trim());
        let xa = x.index_of(a).ok_or_else(|| parse(format!("`{a}` is not in X")))?;
        let yb = y.index_of(b).ok_or_else(|| parse(format!("`{b}` is not in Y")))?;
        pairs.push((xa, yb));
    }
    Ok(pairs)
}

fn coherence(pol: &ExtensionPolarity, limits: &Limits) -> CliResult<Report> {
    let mut summary = String::new();
    let mut levels = Vec::new();
    for level in 0..=3u8 {
        let ok = check_coherence(pol, level, limits)?;
        let _ = writeln!(summary, "level {level}: {ok}");
        levels.push(ok);
    }
    Ok(Report {
        summary,
        results: vec![json!({ "levels": levels })],
        ..Report::default()
    })
}

fn product(e_x: &ExtensionMap, e_y: &ExtensionMap, copies: usize, limits: &Limits) -> CliResult<Report> {
    let parts = vec![(e_x.clone(), e_y.clone()); copies];
    let prod = product_amalgamation(&parts, limits)?;
    let am = canonical_amalgamation_with(e_x, e_y, limits)?;
    let factors = vec![&**am.poset(); copies];
    let power = Arc::new(FinitePoset::product_with_limits(&factors, limits)?);
    let isomorphic = prod.len() == power.len() && find_isomorphism(prod.poset(), &power)?.is_some();
    Ok(Report {
        summary: format!(
            "product amalgamation: {}\nproduct of amalgamations: {}\nisomorphic: {isomorphic}\n",
            prod.len(),
            power.len()
        ),
        sizes: Some(format!("{} {}", prod.len(), power.len())),
        dot: Some(dot("product_amalgamation", prod.poset(), |z| origin_role(prod.origin(z)))),
        results: vec![json!({
            "product_amalgamation": prod.len(),
            "product_of_amalgamations": power.len(),
            "isomorphic": isomorphic,
        })],
        ..Report::default()
    })
}

fn random_family(rng: &mut ChaCha8Rng, p: &FinitePoset, kind: BoundKind) -> Vec<ElemSet> {
    let principal = |a: usize| match kind {
        BoundKind::Meet => p.up(a).clone(),
        BoundKind::Join => p.down(a).clone(),
    };
    let mut fam: Vec<ElemSet> = (0..p.len()).map(principal).collect();
    for _ in 0..rng.gen_range(0..4) {
        let seed = p.set_of((0..p.len()).filter(|_| rng.gen_bool(0.3)));
        let s = match kind {
            BoundKind::Meet => p.up_closure(&seed),
            BoundKind::Join => p.down_closure(&seed),
        };
        if !s.is_clear() && !fam.contains(&s) {
            fam.push(s);
        }
    }
    fam
}

struct Tally {
    name: &'static str,
    passed: usize,
    skipped: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            passed: 0,
            skipped: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, outcome: CliResult<bool>, what: impl FnOnce() -> String) -> CliResult<()> {
        match outcome {
            Ok(true) => self.passed += 1,
            Ok(false) => self.failures.push(what()),
            Err(e) if e.code() == "SizeLimit" => self.skipped += 1,
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

fn verify(file: &PosetFile, seed: u64, cases: usize, limits: &Limits) -> CliResult<Report> {
    let p = &file.poset;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies = Vec::new();

    let mut t = Tally::new("macneille");
    let outcome = macneille(p, limits).map_err(CliError::from).map(|m| {
        let e = m.map();
        m.target().is_complete_lattice() && e.is_embedding() && is_meet_extension(e) && is_join_extension(e)
    });
    t.record(outcome, || "not a complete lattice with a dense embedding".into())?;
    tallies.push(t);

    let mut t = Tally::new("specification-amalgamation");
    let outcome = (|| -> CliResult<bool> {
        let fx = filter_extension(&file.meet_spec()?, limits)?;
        let ix = ideal_extension(&file.join_spec()?, limits)?;
        let am = canonical_amalgamation_with(&fx.extension, &ix.extension, limits)?;
        Ok(am.violations().is_empty())
    })();
    t.record(outcome, || "canonical amalgamation violates its defining properties".into())?;
    tallies.push(t);

    let mut density = Tally::new("density-compactness");
    let mut unique = Tally::new("amalgamation-uniqueness");
    let mut duality = Tally::new("duality");
    for case in 0..cases {
        let filters = random_family(&mut rng, p, BoundKind::Meet);
        let ideals = random_family(&mut rng, p, BoundKind::Join);
        let ce = match canonical_extension(p, filters, ideals, limits) {
            Ok(ce) => ce,
            Err(e) if e.code() == "SizeLimit" => {
                density.skipped += 1;
                unique.skipped += 1;
                duality.skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let report = verify_density_compactness(ce.completion.map(), &ce.filters.sets, &ce.ideals.sets);
        density.record(Ok(report.passed()), || format!("case {case}: {}", report.failures.join("; ")))?;
        let am = &ce.amalgamation;
        let outcome = (|| -> CliResult<bool> {
            let restricted = amalgamation_from_completion(ce.completion.map(), &ce.filters, &ce.ideals)?;
            let fixed: Vec<(usize, usize)> = (0..ce.filters.sets.len())
                .map(|x| (am.pi_x().apply(x), restricted.pi_x().apply(x)))
                .chain((0..ce.ideals.sets.len()).map(|y| (am.pi_y().apply(y), restricted.pi_y().apply(y))))
                .collect();
            Ok(find_isomorphism_extending(am.poset(), restricted.poset(), &fixed, limits)?.is_some())
        })();
        unique.record(outcome, || format!("case {case}: the two constructions differ"))?;
        let outcome = (|| -> CliResult<bool> {
            let dual = dual_amalgamation(am);
            let dual_p = Arc::new(p.dual());
            let ex = ExtensionMap::new(am.e_y().map().dual_between(dual_p.clone(), Arc::new(am.e_y().target().dual())));
            let ey = ExtensionMap::new(am.e_x().map().dual_between(dual_p, Arc::new(am.e_x().target().dual())));
            let direct = canonical_amalgamation_with(&ex, &ey, limits)?;
            Ok(find_isomorphism(dual.poset(), direct.poset())?.is_some())
        })();
        duality.record(outcome, || format!("case {case}: dual amalgamation differs"))?;
    }
    tallies.extend([density, unique, duality]);

    let mut t = Tally::new("stage-completeness-and-rank");
    let outcome = (|| -> CliResult<bool> {
        let chain = build_chain(&file.join_spec()?, &file.meet_spec()?, 2, limits)?;
        for n in 0..=2 {
            let img = chain.gamma_between(0, n).image();
            if !is_k_complete(chain.stage(n), &img, Radius::Finite(n + 1), limits)? {
                return Ok(false);
            }
            let r = ranks(chain.stage(n), &img);
            if (0..chain.stage(n).len()).any(|a| r[a] != Some(chain.stage_rank(n, a))) {
                return Ok(false);
            }
        }
        Ok(true)
    })();
    t.record(outcome, || "stage completeness or rank agreement fails".into())?;
    tallies.push(t);

    let mut summary = String::new();
    let mut results = Vec::new();
    let mut failed = Vec::new();
    for t in &tallies {
        let status = if !t.failures.is_empty() {
            failed.push(t.name);
            "FAIL"
        } else if t.passed == 0 {
            "SKIP"
        } else {
            "PASS"
        };
        let _ = writeln!(summary, "{status}\t{}\t{} passed, {} skipped", t.name, t.passed, t.skipped);
        for f in &t.failures {
            let _ = writeln!(summary, "\t{f}");
        }
        results.push(json!({
            "check": t.name,
            "status": status,
            "passed": t.passed,
            "skipped": t.skipped,
            "failures": t.failures,
        }));
    }
    let sizes = Some(format!("{} {}", tallies.len() - failed.len(), tallies.len()));
    let failure = (!failed.is_empty()).then(|| CliError::InvariantViolated(failed.join(",")));
    Ok(Report {
        summary,
        sizes,
        results,
        failure,
        ..Report::default()
    })
}

