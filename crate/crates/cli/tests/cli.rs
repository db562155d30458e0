use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn amalgam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn no_prod(verb: &str) -> Vec<String> {
    vec![
        verb.to_string(),
        "--x".into(),
        data("noProd_X.poset"),
        "--y".into(),
        data("noProd_Y.poset"),
        "--base".into(),
        data("noProd_P.poset"),
    ]
}

fn run(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    amalgam(&refs)
}

#[test]
fn amalgamation_of_the_product_counterexample_has_six_elements() {
    let mut args = no_prod("amalgamate");
    args.extend(["--emit".into(), "sizes".into()]);
    let out = run(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "6\n");
}

#[test]
fn product_of_amalgamations_is_larger() {
    let mut args = no_prod("product-amalgamate");
    args.extend(["--emit".into(), "sizes".into()]);
    let out = run(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "34 36\n");
}

#[test]
fn word_problem_decides_the_canon_example() {
    let canon = data("canon.poset");
    let out = amalgam(&["word-problem", "--input", &canon, "--lhs", "join(a,b)", "--rhs", "join(x,y)"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "equal\n");
    let out = amalgam(&["word-problem", "--input", &canon, "--lhs", "meet(a,x)", "--rhs", "join(a,b)"]);
    assert_eq!(stdout(&out), "below\n");
}

#[test]
fn chain_sizes_for_two_incomparable_generators() {
    let out = amalgam(&["build-chain", "--input", &data("antichain2.poset"), "--stages", "2", "--emit", "sizes"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "2 4 4\n");
}

#[test]
fn chain_dot_has_one_graph_per_stage() {
    let out = amalgam(&["build-chain", "--input", &data("antichain2.poset"), "--stages", "2", "--emit", "dot"]);
    let text = stdout(&out);
    assert_eq!(text.matches("digraph").count(), 3);
    assert!(!text.contains("rankdir"));
}

#[test]
fn chain_tsv_is_a_gamma_table() {
    let out = amalgam(&["build-chain", "--input", &data("antichain2.poset"), "--stages", "2", "--emit", "tsv"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("stage\tsource\ttarget"));
    assert_eq!(text.lines().count(), 1 + 2 + 4);
}

#[test]
fn json_lines_carry_the_report_fields_and_are_reproducible() {
    let args = ["macneille", "--input", &data("diamond.poset"), "--emit", "json-lines", "--no-timing"];
    let first = stdout(&amalgam(&args));
    let second = stdout(&amalgam(&args));
    assert_eq!(first, second);
    let line: Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    assert_eq!(line["verb"], "macneille");
    assert_eq!(line["elapsed_ms"], 0);
    assert_eq!(line["input_hash"].as_str().unwrap().len(), 64);
    assert_eq!(line["result"]["completion"]["size"], 4);
}

#[test]
fn input_hash_depends_on_the_inputs() {
    let hash = |file: &str| {
        let out = amalgam(&["macneille", "--input", &data(file), "--emit", "json-lines"]);
        let line: Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
        line["input_hash"].as_str().unwrap().to_string()
    };
    assert_ne!(hash("diamond.poset"), hash("antichain2.poset"));
}

#[test]
fn partial_lift_reports_the_missing_element() {
    let out = amalgam(&[
        "lift",
        "--base",
        &data("domMeet_P.poset"),
        "--x",
        &data("domMeet_X.poset"),
        "--ex",
        &data("domMeet_eX.map"),
        "--target",
        &data("domMeet_Q.poset"),
        "--f",
        &data("domMeet_f.map"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("continuous: true"));
    assert!(text.contains("x -> q\n"));
    assert!(text.contains("# y undefined\n"));
}

#[test]
fn rank_of_an_element_and_of_a_term() {
    let input = data("antichain2.poset");
    let out = amalgam(&["rank", "--input", &input, "--stage", "2", "--element", "a"]);
    assert_eq!(stdout(&out), "0\n");
    let out = amalgam(&["rank", "--input", &input, "--term", "join(a,b)"]);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn canonical_extension_reads_family_files() {
    let dir = std::env::temp_dir().join(format!("amalgam-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let filters = dir.join("filters.txt");
    std::fs::write(&filters, "{ a }\n{ b }\n{ c }\n").unwrap();
    let out = amalgam(&[
        "canonical-extension",
        "--input",
        &data("antichain3.poset"),
        "--filters",
        "file",
        "--filter-file",
        filters.to_str().unwrap(),
        "--ideals",
        "principal",
        "--emit",
        "sizes",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "5\n");
    let out = amalgam(&["canonical-extension", "--input", &data("antichain3.poset"), "--filters", "file"]);
    assert_eq!(out.status.code(), Some(64));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn coherence_reports_every_level() {
    let out = run(&no_prod("coherence"));
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn verify_passes_on_a_small_lattice() {
    let out = amalgam(&["verify", "--input", &data("diamond.poset"), "--cases", "4", "--seed", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn domain_errors_exit_with_two() {
    let out = amalgam(&["word-problem", "--input", &data("canon.poset"), "--lhs", "join(a", "--rhs", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("ERROR SyntaxError"));
    let out = amalgam(&["word-problem", "--input", &data("canon.poset"), "--lhs", "zz", "--rhs", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("ERROR UnboundGenerator"));
    let out = amalgam(&["macneille", "--input", "/nonexistent/file.poset"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn size_limits_exit_with_three() {
    let out = amalgam(&["build-chain", "--input", &data("antichain3.poset"), "--stages", "3", "--stage-cap", "20"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("ERROR SizeLimit"));
}

#[test]
fn usage_errors_exit_with_sixty_four() {
    assert_eq!(amalgam(&["bogus"]).status.code(), Some(64));
    assert_eq!(amalgam(&["build-chain"]).status.code(), Some(64));
    assert_eq!(amalgam(&["build-chain", "--input", "x", "--stage-cap", "0"]).status.code(), Some(64));
    let out = amalgam(&["word-problem", "--input", &data("canon.poset"), "--lhs", "a", "--rhs", "b", "--emit", "dot"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("Usage"));
    assert!(amalgam(&["--help"]).status.success());
}
