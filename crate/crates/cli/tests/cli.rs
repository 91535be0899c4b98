use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;

use seplab::dto::{AutomatonDto, FamilyDto};
use seplab_core::automaton::{counter_automaton, counter_separator};
use seplab_core::extremal::SetFamily;
use seplab_core::Subset;

fn run(args: &[&str]) -> seplab::Outcome {
    seplab::run(std::iter::once("seplab").chain(args.iter().copied()), None)
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn automaton_file(dir: &Path, name: &str, a: &seplab_core::SafetyAutomaton) -> String {
    write_json(dir, name, &AutomatonDto::from(a))
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["verify", "--n", "2"]).code, 2);
    assert_eq!(run(&["--jobs", "0", "classify", "--n", "1"]).code, 2);
    assert_eq!(run(&["params", "--n", "0", "--t", "5"]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("classify"));
}

#[test]
fn caps_refuse_and_can_be_raised() {
    let refused = run(&["classify", "--n", "5"]);
    assert_eq!(refused.code, 2);
    assert!(refused.stderr.contains("cap exceeded"), "{}", refused.stderr);
    // Two nodes with three priorities exceed the priority cap, until raised.
    assert_eq!(run(&["classify", "--n", "2", "--d", "3"]).code, 2);
    let raised = seplab::run(["seplab", "classify", "--n", "2", "--d", "3"], Some("priorities=3"));
    assert_eq!(raised.code, 0, "{}", raised.stderr);
    let v: Value = serde_json::from_str(&raised.stdout).unwrap();
    assert_eq!(v["graphs"], 15 * 15);
    // A flag after the environment wins.
    let lowered = seplab::run(["seplab", "--cap", "priorities=2", "classify", "--n", "2", "--d", "3"], Some("priorities=3"));
    assert_eq!(lowered.code, 2);
    assert_eq!(seplab::run(["seplab", "classify", "--n", "1"], Some("nodes=3")).code, 2);
}

#[test]
fn binary_reads_caps_from_the_environment() {
    let exe = env!("CARGO_BIN_EXE_seplab");
    let out = Command::new(exe).args(["classify", "--n", "2", "--d", "3"]).env("SEPLAB_CAPS", "priorities=3").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(exe).args(["classify", "--n", "2", "--d", "3"]).env_remove("SEPLAB_CAPS").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap exceeded"));
}

#[test]
fn verify_exit_codes_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let a = automaton_file(dir.path(), "c.json", &counter_separator(2).unwrap());
    assert_eq!(run(&["verify", "--automaton", &a, "--n", "2", "--time", "6"]).code, 0);
    assert_eq!(run(&["verify", "--automaton", &a, "--n", "2"]).code, 0);
    let short = run(&["--format", "csv", "verify", "--automaton", &a, "--n", "2", "--time", "5"]);
    assert_eq!(short.code, 1);
    let mut lines = short.stdout.lines();
    assert_eq!(lines.next(), Some("verdict,graph_index,reason,word,loop_start"));
    assert!(lines.next().unwrap().starts_with("counterexample,"));
    let dot = run(&["--format", "dot", "verify", "--automaton", &a, "--n", "2", "--time", "5"]);
    assert_eq!(dot.stdout.matches("digraph").count(), 2);
}

#[test]
fn bad_automata_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut dto = AutomatonDto::from(&counter_separator(1).unwrap());
    dto.delta.remove(0);
    let a = write_json(dir.path(), "bad.json", &dto);
    let out = run(&["verify", "--automaton", &a, "--n", "1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("no transition"), "{}", out.stderr);
    let missing = run(&["verify", "--automaton", "/nonexistent/a.json", "--n", "1"]);
    assert_eq!(missing.code, 2);
}

#[test]
fn refute_table_has_one_row_per_automaton() {
    let out = run(&["--format", "csv", "refute", "--all", "--states", "2", "--n", "2"]);
    assert_eq!(out.code, 0);
    let rows: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(rows[0], "index,states,accept,reason,word,loop_start,confirmed,verify_fails");
    let json: Value = serde_json::from_str(&run(&["refute", "--all", "--states", "2", "--n", "2"]).stdout).unwrap();
    assert_eq!(rows.len() - 1, json["automata"].as_u64().unwrap() as usize);
    assert!(rows[1..].iter().all(|r| r.ends_with(",true,true")));
}

#[test]
fn solve_single_arena_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    // Even owns node 1 and may loop on priority 2 or move to the odd loop at node 2.
    let arena = serde_json::json!({
        "n": 2, "d": 2, "edges": [[1, 1, 2], [1, 2, 1], [2, 2, 1]], "owner": [0, 1], "initial": 1
    });
    let path = write_json(dir.path(), "arena.json", &arena);
    for via in ["separator", "direct"] {
        let out = run(&["solve", "--arena", &path, "--via", via]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["winner"], "even");
    }
    let direct: Value = serde_json::from_str(&run(&["solve", "--arena", &path, "--via", "direct"]).stdout).unwrap();
    assert_eq!(direct["strategy"], serde_json::json!([1, 0]));
    // A separator that does not separate is refused unless trusted.
    let cap = automaton_file(dir.path(), "cap.json", &counter_automaton(2, 1).unwrap());
    assert_eq!(run(&["solve", "--arena", &path, "--automaton", &cap]).code, 2);
    assert_eq!(run(&["solve", "--arena", &path, "--automaton", &cap, "--trust"]).code, 0);
}

#[test]
fn structured_certificates_round_trip_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let a = automaton_file(dir.path(), "a.json", &counter_automaton(40, 1).unwrap());
    let found = run(&["fool", "--automaton", &a, "--n", "40", "--t", "40", "--structured"]);
    assert_eq!(found.code, 1, "{}", found.stderr);
    let mut cert: Value = serde_json::from_str(&found.stdout).unwrap();
    let path = write_json(dir.path(), "cert.json", &cert);
    let checked = run(&["fool", "--automaton", &a, "--check", &path]);
    assert_eq!(checked.code, 0, "{}", checked.stdout);
    let v: Value = serde_json::from_str(&checked.stdout).unwrap();
    assert_eq!((v["kind"].as_str(), v["valid"].as_bool()), (Some("structured"), Some(true)));

    cert["gs"][0] = serde_json::json!([]);
    let path = write_json(dir.path(), "bad.json", &cert);
    let checked = run(&["fool", "--automaton", &a, "--check", &path]);
    assert_eq!(checked.code, 1);
    let v: Value = serde_json::from_str(&checked.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["failure"].is_string());
}

#[test]
fn tampered_pairs_fail_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let a = automaton_file(dir.path(), "a.json", &counter_automaton(2, 1).unwrap());
    let mut pair: Value = serde_json::from_str(&run(&["fool", "--automaton", &a, "--n", "2", "--t", "6"]).stdout).unwrap();
    pair["state"] = Value::from(0);
    let path = write_json(dir.path(), "p.json", &pair);
    assert_eq!(run(&["fool", "--automaton", &a, "--check", &path]).code, 1);
}

#[test]
fn shift_suite_depends_on_seed_only() {
    let a = run(&["--seed", "7", "--jobs", "1", "--format", "csv", "extremal", "shift", "--trials", "300"]);
    let b = run(&["--seed", "7", "--jobs", "3", "--format", "csv", "extremal", "shift", "--trials", "300"]);
    let c = run(&["--seed", "8", "--jobs", "1", "--format", "csv", "extremal", "shift", "--trials", "300"]);
    assert_eq!(a, b);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(a.stdout.lines().count(), 301);
}

#[test]
fn shift_and_compress_single_families() {
    let dir = tempfile::tempdir().unwrap();
    let f = SetFamily::new(4, 2, [Subset::from_elements([3, 4]).unwrap(), Subset::from_elements([2, 4]).unwrap()]).unwrap();
    let g = SetFamily::new(4, 2, [Subset::from_elements([1, 2]).unwrap()]).unwrap();
    let fp = write_json(dir.path(), "f.json", &FamilyDto::from(&f));
    let gp = write_json(dir.path(), "g.json", &FamilyDto::from(&g));
    let shifted: FamilyDto = serde_json::from_str(&run(&["extremal", "shift", "--family", &fp, "--i", "1", "--j", "4"]).stdout).unwrap();
    assert_eq!(shifted.members, vec![vec![1, 2], vec![1, 3]]);
    let c: Value = serde_json::from_str(&run(&["extremal", "compress", "--f", &fp, "--g", &gp]).stdout).unwrap();
    assert_eq!(c["f"]["members"], serde_json::json!([[1, 2], [1, 3]]));
    let potentials: Vec<u64> = serde_json::from_value(c["potentials"].clone()).unwrap();
    assert!(potentials.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn documented_examples_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = automaton_file(dir.path(), "counter2.json", &counter_separator(2).unwrap());
    assert_eq!(run(&["verify", "--automaton", &a, "--n", "2", "--d", "2", "--time", "6"]).code, 0);
    assert_eq!(run(&["refute", "--all", "--states", "2", "--n", "2"]).code, 0);
    assert_eq!(run(&["extremal", "fi-check", "--n", "6", "--a", "3"]).code, 0);
}

#[test]
fn comm_commands() {
    let d = run(&["--format", "csv", "comm", "gen", "--n", "4", "--k", "2"]);
    assert_eq!(d.code, 0);
    assert_eq!(d.stdout.lines().count(), 1 + 6);
    let cover: Value = serde_json::from_str(&run(&["comm", "mincover", "--n", "3", "--k", "3", "--gamma", "1/2"]).stdout).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(dir.path(), "cover.json", &cover["cover"]);
    assert_eq!(run(&["comm", "check", "--cert", &path]).code, 0);
    // Dropping a box leaves some tuple of D uncovered.
    let mut fewer = cover["cover"].clone();
    fewer["boxes"].as_array_mut().unwrap().pop();
    let path = write_json(dir.path(), "fewer.json", &fewer);
    let out: Value = serde_json::from_str(&run(&["comm", "check", "--cert", &path]).stdout).unwrap();
    assert_eq!(out["status"], "uncovered");
    assert_eq!(run(&["comm", "bound", "--n", "99999999", "--k", "10", "--gamma", "1/10"]).code, 1);
    assert_eq!(run(&["comm", "bound", "--n", "100000000", "--k", "10", "--gamma", "1/10"]).code, 0);
    assert_eq!(run(&["comm", "mincover", "--n", "2", "--k", "2", "--gamma", "half"]).code, 2);
}

#[test]
fn params_single_point() {
    let out = run(&["params", "--n", "1000000000000000000", "--t", "8000000000000000000"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["hypotheses"], true);
    let out = run(&["--format", "csv", "params", "--n", "40", "--t", "40"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("n,t,n_prime,k,a,blocks,log2_q,"));
}

#[test]
fn bounds_single_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let a = automaton_file(dir.path(), "c.json", &counter_separator(2).unwrap());
    let v: Value = serde_json::from_str(&run(&["bounds", "--automaton", &a, "--n", "2"]).stdout).unwrap();
    assert_eq!(v["within"], true);
    assert_eq!(v["qn"], 8);
    let cap = automaton_file(dir.path(), "cap.json", &counter_automaton(2, 1).unwrap());
    let out = run(&["bounds", "--automaton", &cap, "--n", "2"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("\"separating\": false"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classify_counts_do_not_depend_on_jobs(jobs in 1usize..6, n in 1usize..=3) {
        let n = n.to_string();
        let one = run(&["--jobs", "1", "--format", "csv", "classify", "--n", &n]);
        let many = run(&["--jobs", &jobs.to_string(), "--format", "csv", "classify", "--n", &n]);
        prop_assert_eq!(one, many);
    }
}
