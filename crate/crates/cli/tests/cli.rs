use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tiltcube::family_file::parse_family;
use tiltcube::predicates::is_valid;
use tiltcube::{ConflictPredicate, ConstructionSpec};
use tiltcube_cli::{run, Outcome, EXIT_INVALID, EXIT_OK, EXIT_USAGE};

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("tiltcube").chain(args.iter().copied()))
}

fn json(outcome: &Outcome) -> Value {
    serde_json::from_str(&outcome.stdout).unwrap_or_else(|e| panic!("{e}: {}", outcome.stdout))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_then_verify_b0() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f.txt");
    let built = cli(&["construct", "--family", "b0", "--n", "4", "-o", path(&file)]);
    assert_eq!(built.code, EXIT_OK, "{}", built.stderr);
    assert_eq!(json(&built)["size"], 8);
    let checked = cli(&["verify", "--predicate", "ratio:1:2", "--input", path(&file)]);
    assert_eq!(checked.code, EXIT_OK);
    assert_eq!(json(&checked)["valid"], true);
    let pairwise = cli(&["verify", "--predicate", "ratio:1:2", "--input", path(&file), "--strategy", "pairwise"]);
    assert_eq!(json(&pairwise)["strategy"], "pairwise");
    assert_eq!(json(&pairwise)["valid"], true);
}

#[test]
fn construct_to_stdout_is_a_family_file() {
    let out = cli(&["construct", "--family", "levels:0,2", "--n", "3"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "n=3\n{}\n1,2\n1,3\n2,3\n");
}

#[test]
fn distance_one_violation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    std::fs::write(&file, "n=3\n{}\n1\n").unwrap();
    let out = cli(&["verify", "--predicate", "dist:1", "--input", path(&file)]);
    assert_eq!(out.code, EXIT_INVALID);
    let report = json(&out);
    assert_eq!(report["valid"], false);
    assert_eq!(report["violations"][0], serde_json::json!([[1], []]));
}

#[test]
fn lp_bound_n4_full() {
    let out = cli(&["lp-bound", "--n", "4", "--p", "1", "--q", "2", "--full"]);
    assert_eq!(out.code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["optimum"], "10/1");
    assert_eq!(v["variant"], "full");
    assert_eq!(v["unique"], true);
    assert_eq!(v["profile"], serde_json::json!(["1/1", "4/1", "0/1", "4/1", "1/1"]));
    assert_eq!(v["certificate_verified"], true);
}

#[test]
fn lp_bound_jk_and_bad_variant() {
    let jk = json(&cli(&["lp-bound", "--n", "5", "--p", "1", "--q", "3", "--jk"]));
    assert_eq!(jk["optimum"], "32/1");
    assert_eq!(jk["variant"], "jk");
    assert_eq!(cli(&["lp-bound", "--n", "5", "--p", "1", "--q", "3", "--full"]).code, EXIT_USAGE);
    assert_eq!(cli(&["lp-bound", "--n", "5", "--full", "--jk"]).code, EXIT_USAGE);
}

#[test]
fn solve_small_cases() {
    let v = json(&cli(&["solve", "--n", "4", "--predicate", "ratio:1:2", "--deterministic"]));
    assert_eq!(v["size"], 10);
    assert_eq!(v["status"], "proved-optimal");
    assert_eq!(v["witness"].as_array().unwrap().len(), 10);
    let d = json(&cli(&["solve", "--n", "3", "--predicate", "dist:1", "--no-witness"]));
    assert_eq!(d["size"], 2);
    assert!(d.get("witness").is_none());
}

#[test]
fn solve_is_deterministic_and_greedy_is_seeded() {
    let args = ["solve", "--n", "5", "--predicate", "ratio:1:2", "--deterministic"];
    assert_eq!(cli(&args).stdout, cli(&args).stdout);
    let greedy = ["solve", "--n", "6", "--predicate", "dist:1", "--greedy", "--seed", "11"];
    assert_eq!(cli(&greedy).stdout, cli(&greedy).stdout);
    assert_eq!(json(&cli(&greedy))["seed"], 11);
}

#[test]
fn chains_reproducible_with_seed() {
    let args = ["chains", "--n", "6", "--l", "2", "--trials", "500", "--seed", "3"];
    let first = cli(&args);
    assert_eq!(first.code, EXIT_OK);
    assert_eq!(first.stdout, cli(&args).stdout);
    let v = json(&first);
    assert_eq!(v["identity_check"], "pass");
    assert_eq!(v["seed"], 3);
    assert_eq!(v["mean"], 1.0);
    assert_eq!(cli(&["chains", "--n", "6", "--l", "3"]).code, EXIT_USAGE);
}

#[test]
fn shadow_of_powersum_family() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.txt");
    cli(&["construct", "--family", "powersum:1", "--n", "5", "-o", path(&file)]);
    let v = json(&cli(&["shadow", "--input", path(&file), "--k", "1"]));
    assert_eq!(v["shadow_size"], 4);
    assert_eq!(v["identity_sum"], 4);
    assert_eq!(v["identity_holds"], true);
    assert_eq!(v["antichain"], true);
}

#[test]
fn bounds_on_constructions() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.txt");
    cli(&["construct", "--family", "modular", "--n", "8", "-o", path(&file)]);
    let out = cli(&["bounds", "--input", path(&file), "--k", "1"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["distance_1"]["applicable"], true);
    assert_eq!(v["distance_1"]["all_pass"], true);
    let b0 = dir.path().join("b0.txt");
    cli(&["construct", "--family", "b0", "--n", "8", "-o", path(&b0)]);
    let v = json(&cli(&["bounds", "--input", path(&b0)]));
    assert_eq!(v["ratio_1_2"]["applicable"], true);
    assert_eq!(v["ratio_1_2"]["all_pass"], true);
    assert_eq!(v["atmost_k"], Value::Null);
}

#[test]
fn table_rows() {
    let out = cli(&["table", "--min-n", "2", "--max-n", "7"]);
    assert_eq!(out.code, EXIT_OK);
    let rows: Vec<Vec<&str>> = out.stdout.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][..6], ["n", "b0", "lp_full", "lp_jk", "exact_max", "middle_binomial"]);
    let row = |n: &str| rows.iter().find(|r| r[0] == n).unwrap().clone();
    assert_eq!(row("2")[1..6], ["4", "4", "4", "4", "2"]);
    assert_eq!((row("4")[1], row("4")[2], row("4")[4], row("4")[5]), ("8", "10", "10", "6"));
    assert_eq!((row("6")[1], row("6")[3]), ("34", "34"));
    assert_eq!(row("7")[4], "");
    let v = json(&cli(&["table", "--min-n", "4", "--max-n", "4", "--format", "json"]));
    assert_eq!(v[0]["b0"], "8");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&["verify", "--predicate", "ratio:1:2"]).code, EXIT_USAGE);
    assert_eq!(cli(&["solve", "--n", "3", "--predicate", "ratio:2:4"]).code, EXIT_USAGE);
    assert_eq!(cli(&["construct", "--family", "b0", "--n", "5"]).code, EXIT_USAGE);
    assert_eq!(cli(&["verify", "--predicate", "dist:1", "--input", "/nonexistent/f"]).code, EXIT_USAGE);
    let unknown = cli(&["table", "--bogus"]);
    assert_eq!(unknown.code, EXIT_USAGE);
    assert!(unknown.stderr.contains("Usage"));
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn construction_round_trip_matches_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    for n in 1..=12u32 {
        let mut specs = vec!["modular".to_string(), "powersum:1".into(), "powersum:2".into(), "levels:0,1".into()];
        if n % 2 == 0 {
            specs.push("b0".into());
        }
        for (p, q) in [(1, 2), (1, 3), (2, 3)] {
            specs.push(format!("interval:{p}:{q}"));
        }
        for spec_text in specs {
            let spec: ConstructionSpec = spec_text.parse().unwrap();
            let Ok(built) = spec.build(n) else { continue };
            let file = dir.path().join(format!("{n}-{}.txt", spec_text.replace(':', "_")));
            let out = cli(&["construct", "--family", &spec_text, "--n", &n.to_string(), "-o", path(&file)]);
            assert_eq!(out.code, EXIT_OK, "{spec_text} n={n}: {}", out.stderr);
            let read = parse_family(&std::fs::read_to_string(&file).unwrap()).unwrap();
            assert_eq!(read, built.family, "{spec_text} n={n}");
            for pred in [
                ConflictPredicate::Ratio { p: 1, q: 2 },
                ConflictPredicate::ExactDistance(1),
                ConflictPredicate::AtMostDistance(1),
            ] {
                let expected = is_valid(&built.family, pred).unwrap();
                let out = cli(&["verify", "--predicate", &pred.to_string(), "--input", path(&file)]);
                assert_eq!(out.code, if expected { EXIT_OK } else { EXIT_INVALID }, "{spec_text} n={n} {pred}");
            }
        }
    }
}

#[test]
fn binary_exit_codes_and_thread_override() {
    let bin = env!("CARGO_BIN_EXE_tiltcube");
    let ok = Command::new(bin)
        .args(["lp-bound", "--n", "4", "--full"])
        .env("TILTCUBE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["optimum"], "10/1");
    let bad_threads = Command::new(bin)
        .args(["lp-bound", "--n", "4"])
        .env("TILTCUBE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
    let unknown = Command::new(bin).arg("--frobnicate").output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}
