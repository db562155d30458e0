//! Browser demo. Every entry point takes poset text and returns SVG or plain text,
//! so the page only has to drop strings into the DOM.

use std::fmt::Write as _;

use amalgam::format::{parse_poset, NodeRole, PosetFile};
use amalgam::{build_chain, decide_word_problem, macneille, parse_term, ApproxChain, FinitePoset, Limits, StageTag};
use wasm_bindgen::prelude::wasm_bindgen;

const LIMITS: Limits = Limits {
    carrier: 400,
    isomorphism: 64,
    subsets: 16,
    stage: 400,
    closed_sets: 4000,
};

const ROW: f64 = 70.0;
const COL: f64 = 64.0;
const PAD: f64 = 30.0;

/// Height of each element: length of the longest chain below it.
fn levels(p: &FinitePoset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&a| p.down(a).count_ones(..));
    let mut level = vec![0; p.len()];
    for &b in &order {
        for (a, c) in p.covers() {
            if c == b {
                level[b] = level[b].max(level[a] + 1);
            }
        }
    }
    level
}

/// Node positions: rows by height, each row ordered by the mean position of lower covers.
pub fn layout(p: &FinitePoset) -> Vec<(f64, f64)> {
    let level = levels(p);
    let height = level.iter().copied().max().map_or(0, |h| h + 1);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); height];
    for a in 0..p.len() {
        rows[level[a]].push(a);
    }
    let width = rows.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let covers = p.covers();
    let mut x = vec![0.0; p.len()];
    for row in &mut rows {
        let key = |a: usize| {
            let below: Vec<f64> = covers.iter().filter(|&&(_, c)| c == a).map(|&(l, _)| x[l]).collect();
            if below.is_empty() {
                a as f64
            } else {
                below.iter().sum::<f64>() / below.len() as f64
            }
        };
        let mut keyed: Vec<(f64, usize)> = row.iter().map(|&a| (key(a), a)).collect();
        keyed.sort_by(|u, v| u.0.total_cmp(&v.0).then(u.1.cmp(&v.1)));
        *row = keyed.into_iter().map(|(_, a)| a).collect();
        let offset = (width - row.len() as f64) / 2.0;
        for (i, &a) in row.iter().enumerate() {
            x[a] = offset + i as f64;
        }
    }
    (0..p.len())
        .map(|a| (PAD + x[a] * COL + COL / 2.0, PAD + (height - 1 - level[a]) as f64 * ROW))
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fill(role: NodeRole) -> &'static str {
    match role {
        NodeRole::Base => "#2b6cb0",
        NodeRole::Filter => "#2f855a",
        NodeRole::Ideal => "#c05621",
        _ => "#718096",
    }
}

/// Hasse diagram of `p` as an SVG document; colours follow `role`.
pub fn hasse_svg(p: &FinitePoset, role: &dyn Fn(usize) -> NodeRole) -> String {
    let pos = layout(p);
    let w = pos.iter().map(|q| q.0).fold(0.0, f64::max) + COL / 2.0 + PAD;
    let h = pos.iter().map(|q| q.1).fold(0.0, f64::max) + PAD;
    let mut svg = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    for (a, b) in p.covers() {
        let (x1, y1) = pos[a];
        let (x2, y2) = pos[b];
        let _ = write!(svg, r##"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#a0aec0"/>"##);
    }
    for (a, &(x, y)) in pos.iter().enumerate() {
        let name = escape(p.name(a));
        let _ = write!(
            svg,
            r#"<g><title>{name}</title><circle cx="{x}" cy="{y}" r="7" fill="{}"/><text x="{}" y="{}" font-size="11">{name}</text></g>"#,
            fill(role(a)),
            x + 10.0,
            y + 4.0
        );
    }
    svg.push_str("</svg>");
    svg
}

fn load(text: &str) -> Result<PosetFile, String> {
    parse_poset(text).map_err(|e| format!("{}: {e}", e.code()))
}

fn fail(e: amalgam::Error) -> String {
    format!("{}: {e}", e.code())
}

/// The input poset itself.
#[wasm_bindgen]
pub fn poset_svg(text: &str) -> Result<String, String> {
    let f = load(text)?;
    Ok(hasse_svg(&f.poset, &|_| NodeRole::Base))
}

/// MacNeille completion, with the original elements highlighted.
#[wasm_bindgen]
pub fn macneille_svg(text: &str) -> Result<String, String> {
    let f = load(text)?;
    let m = macneille(&f.poset, &LIMITS).map_err(fail)?;
    let image = m.map().image();
    Ok(hasse_svg(m.target(), &|z| if image.contains(z) { NodeRole::Base } else { NodeRole::Plain }))
}

fn chain(text: &str, stages: usize) -> Result<ApproxChain, String> {
    let f = load(text)?;
    let u = f.join_spec().map_err(fail)?;
    let d = f.meet_spec().map_err(fail)?;
    build_chain(&u, &d, stages, &LIMITS).map_err(fail)
}

fn birth_role(c: &ApproxChain, mut k: usize, mut a: usize) -> NodeRole {
    loop {
        match c.tag(k, a) {
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

/// The last stage of the approximation chain, coloured by how each element was born.
#[wasm_bindgen]
pub fn chain_svg(text: &str, stages: usize) -> Result<String, String> {
    let c = chain(text, stages)?;
    let n = c.depth();
    Ok(hasse_svg(c.stage(n), &|a| birth_role(&c, n, a)))
}

/// Stage sizes separated by spaces.
#[wasm_bindgen]
pub fn chain_sizes(text: &str, stages: usize) -> Result<String, String> {
    let c = chain(text, stages)?;
    Ok(c.sizes().iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
}

/// `below`, `above`, `equal` or `incomparable`, with the stage that decided it.
#[wasm_bindgen]
pub fn word_problem(text: &str, lhs: &str, rhs: &str) -> Result<String, String> {
    let f = load(text)?;
    let s = parse_term(lhs).map_err(fail)?;
    let t = parse_term(rhs).map_err(fail)?;
    let u = f.join_spec().map_err(fail)?;
    let d = f.meet_spec().map_err(fail)?;
    let ans = decide_word_problem(&u, &d, &s, &t, &LIMITS).map_err(fail)?;
    Ok(format!("{} (decided in stage {})", ans.verdict, ans.stage))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = "poset d\nelements: bot a b top\norder: bot < a < top\norder: bot < b < top\n";
    const PAIR: &str = "poset v\nelements: a b\n";

    #[test]
    fn layers_put_larger_elements_higher() {
        let f = parse_poset(DIAMOND).unwrap();
        let pos = layout(&f.poset);
        let y = |n: &str| pos[f.poset.index_of(n).unwrap()].1;
        assert!(y("top") < y("a") && y("a") == y("b") && y("b") < y("bot"));
        let x = |n: &str| pos[f.poset.index_of(n).unwrap()].0;
        assert_ne!(x("a"), x("b"));
    }

    #[test]
    fn every_cover_is_drawn() {
        let svg = poset_svg(DIAMOND).unwrap();
        assert_eq!(svg.matches("<line").count(), 4);
        assert_eq!(svg.matches("<circle").count(), 4);
    }

    #[test]
    fn completion_adds_bounds_to_an_antichain() {
        let svg = macneille_svg(PAIR).unwrap();
        assert_eq!(svg.matches("<circle").count(), 4);
    }

    #[test]
    fn chain_matches_the_command_line() {
        assert_eq!(chain_sizes(PAIR, 2).unwrap(), "2 4 4");
        assert_eq!(chain_svg(PAIR, 2).unwrap().matches("<circle").count(), 4);
    }

    #[test]
    fn word_problem_reports_verdicts_and_errors() {
        assert!(word_problem(PAIR, "meet(a,b)", "join(a,b)").unwrap().starts_with("below"));
        assert!(word_problem(PAIR, "join(a", "b").unwrap_err().starts_with("SyntaxError"));
        assert!(poset_svg("nonsense").unwrap_err().starts_with("ParseError"));
    }

    #[test]
    fn page_example_fits_the_browser_limits() {
        let canon = include_str!("../../../data/canon.poset");
        assert!(word_problem(canon, "join(a,b)", "join(x,y)").unwrap().starts_with("equal"));
        assert!(chain_svg(canon, 1).is_ok());
        assert!(macneille_svg(canon).is_ok());
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a<b&\"c\""), "a&lt;b&amp;&quot;c&quot;");
    }
}
