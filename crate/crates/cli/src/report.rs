use std::fmt::Write as _;

use amalgam::format::{to_dot, NodeRole};
use amalgam::FinitePoset;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Emit;
use crate::error::{CliError, CliResult};

/// Everything a verb can print. `summary` is shown when no format is requested.
#[derive(Debug, Default)]
pub struct Report {
    pub summary: String,
    pub sizes: Option<String>,
    pub dot: Option<String>,
    pub provenance: Option<String>,
    pub tsv: Option<String>,
    /// One JSON-lines record per entry.
    pub results: Vec<Value>,
    /// Reported after the output is printed.
    pub failure: Option<CliError>,
}

impl Report {
    pub fn render(&self, emit: Option<Emit>, verb: &str, input_hash: &str, elapsed_ms: u128) -> CliResult<String> {
        let pick = |v: &Option<String>, what: &str| {
            v.clone()
                .ok_or_else(|| CliError::Usage(format!("`{verb}` has no {what} output")))
        };
        let mut out = match emit {
            None => self.summary.clone(),
            Some(Emit::Sizes) => pick(&self.sizes, "sizes")?,
            Some(Emit::Dot) => pick(&self.dot, "dot")?,
            Some(Emit::Provenance) => pick(&self.provenance, "provenance")?,
            Some(Emit::Tsv) => pick(&self.tsv, "tsv")?,
            Some(Emit::JsonLines) => {
                let mut s = String::new();
                for r in &self.results {
                    let line = json!({
                        "verb": verb,
                        "input_hash": input_hash,
                        "result": r,
                        "elapsed_ms": elapsed_ms,
                    });
                    let _ = writeln!(s, "{line}");
                }
                s
            }
        };
        if !out.is_empty() && !out.ends_with('\n') {
            out.push('\n');
        }
        Ok(out)
    }
}

/// SHA-256 over every input, each prefixed by its length.
pub fn input_hash(parts: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

pub fn poset_json(p: &FinitePoset) -> Value {
    let covers: Vec<[&str; 2]> = p.covers().into_iter().map(|(a, b)| [p.name(a), p.name(b)]).collect();
    json!({ "size": p.len(), "elements": p.names(), "covers": covers })
}

pub fn dot(name: &str, p: &FinitePoset, role: impl Fn(usize) -> NodeRole) -> String {
    to_dot(name, p, &role)
}

pub fn names_of(p: &FinitePoset, items: impl IntoIterator<Item = usize>) -> String {
    let v: Vec<&str> = items.into_iter().map(|i| p.name(i)).collect();
    v.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_separates_inputs_by_length() {
        let ab = input_hash(&[b"ab".to_vec(), b"c".to_vec()]);
        let a_bc = input_hash(&[b"a".to_vec(), b"bc".to_vec()]);
        assert_ne!(ab, a_bc);
        assert_eq!(ab, input_hash(&[b"ab".to_vec(), b"c".to_vec()]));
    }

    #[test]
    fn missing_renditions_are_usage_errors() {
        let r = Report {
            summary: "x".into(),
            ..Report::default()
        };
        assert_eq!(r.render(None, "v", "h", 0).unwrap(), "x\n");
        assert!(matches!(r.render(Some(Emit::Dot), "v", "h", 0), Err(CliError::Usage(_))));
    }

    #[test]
    fn json_lines_have_one_record_per_result() {
        let r = Report {
            results: vec![json!(1), json!({ "k": 2 })],
            ..Report::default()
        };
        let out = r.render(Some(Emit::JsonLines), "verb", "abc", 5).unwrap();
        let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1]["result"]["k"], 2);
        assert_eq!(lines[0]["elapsed_ms"], 5);
    }
}
