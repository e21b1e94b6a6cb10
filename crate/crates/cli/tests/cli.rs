use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

fn boolalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const NONCOMM: &str = r#"{"ground": 3, "subalgebras": [
    {"ground": 3, "blocks": [[0], [1, 2]]},
    {"ground": 3, "blocks": [[0, 2], [1]]}
]}"#;

const TWO_ALGEBRAS: &str = r#"{"atomCounts": [3, 2], "pairs": [
    {"i": 0, "j": 1, "interAtoms": 2, "mapI": [0, 1, 1], "mapJ": [1, 0]}
]}"#;

#[test]
fn commutes_reports_noncomm_counterexample() {
    let f = json_file(NONCOMM);
    let out = boolalg(&["commutes", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"], false);
    let cx = v["counterexample"].as_array().unwrap();
    assert_eq!(cx.len(), 2);

    let human = boolalg(&["commutes", f.path().to_str().unwrap()]);
    assert_eq!(code(&human), 1);
    assert!(stdout(&human).contains("counterexample"));
}

#[test]
fn weakly_commutes_and_commutes_well_on_a_pair() {
    let f = json_file(NONCOMM);
    let p = f.path().to_str().unwrap();
    assert_eq!(code(&boolalg(&["weakly-commutes", p])), 1);
    assert_eq!(code(&boolalg(&["commutes-well", p, "--max-arity", "2"])), 1);
}

#[test]
fn two_algebra_system_amalgamates() {
    let f = json_file(TWO_ALGEBRAS);
    let out = boolalg(&["amalgamates", f.path().to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"], true);
    assert_eq!(v["counterexample"], Value::Null);
}

#[test]
fn pushout_and_assemble_accept_systems() {
    let f = json_file(TWO_ALGEBRAS);
    let p = f.path().to_str().unwrap();
    let out = boolalg(&["pushout", p, "--json", "--emit-coprojections"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    // atom a of A_0 and b of A_1 pair up when they agree in the overlap
    assert_eq!(v["atoms"], 3);
    assert_eq!(v["coprojections"].as_array().unwrap().len(), 2);

    let out = boolalg(&["assemble", p, "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"], true);
}

#[test]
fn overlapping_blocks_are_rejected() {
    let f = json_file(
        r#"{"ground": 3, "subalgebras": [{"ground": 3, "blocks": [[0, 1], [1, 2]]}]}"#,
    );
    let out = boolalg(&["commutes", f.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_file_is_invalid_input() {
    assert_eq!(code(&boolalg(&["commutes", "/nonexistent/family.json"])), 2);
}

#[test]
fn interpolants_of_unsat_pair() {
    let out = boolalg(&["interpolate", "p & q", "!p & r"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().collect::<Vec<_>>(), ["p", "!p"]);

    let out = boolalg(&["interpolate", "p & q", "!p & r", "--json"]);
    assert_eq!(code(&out), 0);
    serde_json::from_str::<Value>(&stdout(&out)).unwrap();
}

#[test]
fn satisfiable_input_prints_model() {
    let out = boolalg(&["interpolate", "p", "q"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("p=1,q=1"), "{}", stdout(&out));
}

#[test]
fn parse_error_exits_2() {
    assert_eq!(code(&boolalg(&["interpolate", "p &", "q"])), 2);
}

#[test]
fn algebra_search_on_one_point_is_exhausted() {
    let out = boolalg(&["search", "algebra", "--functor", "exp", "--ground", "1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out).trim(), "none");
}

#[test]
fn sp2_algebra_search_on_four_points_finds_witness() {
    let out = boolalg(&["search", "algebra", "--functor", "sp2", "--ground", "4"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn cube_search_finds_exp_witness() {
    let out = boolalg(&["search", "cube", "--functor", "exp", "--universe", "6", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["witness"]["sets"].as_array().unwrap().len(), 3);
}

#[test]
fn cube_search_is_independent_of_worker_count() {
    let run = |w: &str| stdout(&boolalg(&["search", "cube", "--functor", "sp2", "--workers", w, "--json"]));
    assert_eq!(run("1"), run("4"));
}

#[test]
fn bad_functor_flag_exits_2() {
    assert_eq!(code(&boolalg(&["search", "cube", "--functor", "nope"])), 2);
}

#[test]
fn verify_paper_passes() {
    let out = boolalg(&["verify-paper"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = boolalg(&["verify-paper", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["pass"] == true));
}
