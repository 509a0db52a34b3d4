//! End-to-end tests of the binary: exit codes, formats, determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freevertex"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn gen_writes_named_instances_and_prints_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen", "fano", "--out", "fano.hg"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "vertices=7 edges=7");
    let text = fs::read_to_string(dir.path().join("fano.hg")).unwrap();
    assert!(text.starts_with("h 7 7\n"));

    let out = run(
        &["gen", "prop-family", "--s", "2", "--out", "p.cnf"],
        dir.path(),
    );
    assert_eq!(stdout(&out).trim(), "variables=6 clauses=5");
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.hg", "b.hg"] {
        let out = run(
            &[
                "gen",
                "random-regular",
                "--n",
                "20",
                "--k",
                "4",
                "--seed",
                "7",
                "--out",
                name,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0);
    }
    let a = fs::read(dir.path().join("a.hg")).unwrap();
    let b = fs::read(dir.path().join("b.hg")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gen_rejects_bad_params() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen", "complete", "--n", "3", "--k", "9"], dir.path());
    assert_eq!(code(&out), 2);
    let out = run(&["gen", "random-regular", "--n", "3"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_two_color_reports_the_uncolorable_plane() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "fano", "--out", "fano.hg"], dir.path());
    let out = run(&["solve", "--mode", "two-color", "fano.hg"], dir.path());
    assert_eq!(code(&out), 5);
}

#[test]
fn solve_free_vertex_on_the_complement() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "fano-complement", "--out", "fc.hg"], dir.path());
    let out = run(
        &[
            "solve",
            "--mode",
            "free-vertex",
            "fc.hg",
            "--out",
            "fc.cert.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fc.cert.json")).unwrap())
            .unwrap();
    assert_eq!(cert["kind"], "coloring");
    let blanks = cert["values"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| *v == "-")
        .count();
    assert_eq!(blanks, 1);

    let out = run(&["verify", "fc.hg", "fc.cert.json"], dir.path());
    assert_eq!(code(&out), 0);
}

#[test]
fn solve_nae_free_frees_the_extremal_variable() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &["gen", "prop-family", "--s", "2", "--out", "p2.cnf"],
        dir.path(),
    );
    let out = run(&["solve", "--mode", "nae-free", "p2.cnf"], dir.path());
    assert_eq!(code(&out), 0);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["free"], 3);
}

#[test]
fn solve_rejects_precondition_violations_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "fano", "--out", "fano.hg"], dir.path());
    // 3-regular 3-uniform input to the 4-regular solver.
    let out = run(&["solve", "--mode", "free-vertex", "fano.hg"], dir.path());
    assert_eq!(code(&out), 4);
}

#[test]
fn verify_distinguishes_invalid_from_mismatched() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &["gen", "prop-family", "--s", "1", "--out", "p1.cnf"],
        dir.path(),
    );
    let good = r#"{"kind":"nae","values":["-","T","F"],"free":0}"#;
    fs::write(dir.path().join("good.json"), good).unwrap();
    let out = run(&["verify", "p1.cnf", "good.json"], dir.path());
    assert_eq!(code(&out), 0);

    // Free entry carries a value: invalid, exit 1, reasons in the report.
    let bad = r#"{"kind":"nae","values":["T","T","F"],"free":0}"#;
    fs::write(dir.path().join("bad.json"), bad).unwrap();
    let out = run(&["verify", "p1.cnf", "bad.json"], dir.path());
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["ok"], false);
    assert!(!report["reasons"].as_array().unwrap().is_empty());

    // Wrong size: shape mismatch, exit 2.
    let short = r#"{"kind":"nae","values":["-","T"],"free":0}"#;
    fs::write(dir.path().join("short.json"), short).unwrap();
    let out = run(&["verify", "p1.cnf", "short.json"], dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_queries() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "fano", "--out", "fano.hg"], dir.path());
    run(&["gen", "fano-complement", "--out", "fc.hg"], dir.path());
    run(
        &["gen", "prop-family", "--s", "1", "--out", "p1.cnf"],
        dir.path(),
    );

    // The plane's corresponding instance is unsatisfiable.
    let sat = run(&["oracle", "fano.hg", "free-vars"], dir.path());
    let report: serde_json::Value = serde_json::from_str(&stdout(&sat)).unwrap();
    assert_eq!(report["colorable"], false);
    assert!(report["free_vertices"].as_array().unwrap().is_empty());

    let pairs = run(&["oracle", "fc.hg", "free-sets", "--size", "2"], dir.path());
    let report: serde_json::Value = serde_json::from_str(&stdout(&pairs)).unwrap();
    assert!(report["free_sets"].as_array().unwrap().is_empty());

    let vars = run(&["oracle", "p1.cnf", "free-vars"], dir.path());
    let report: serde_json::Value = serde_json::from_str(&stdout(&vars)).unwrap();
    assert_eq!(report["free_variables"], serde_json::json!([0]));
}

#[test]
fn oracle_refuses_instances_above_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "gen",
            "random-regular",
            "--n",
            "30",
            "--k",
            "4",
            "--seed",
            "1",
            "--out",
            "big.hg",
        ],
        dir.path(),
    );
    let out = run(
        &["oracle", "big.hg", "free-sets", "--size", "1"],
        dir.path(),
    );
    assert_eq!(code(&out), 7);
}

#[test]
fn limit_comes_from_flag_or_environment() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "fano", "--out", "fano.hg"], dir.path());
    // A tight environment limit rejects even the 7-vertex instance.
    let out = bin()
        .args(["oracle", "fano.hg", "free-vars"])
        .env("FREEVERTEX_LIMIT", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 7);
    // The flag takes precedence over the environment.
    let out = bin()
        .args(["oracle", "fano.hg", "free-vars", "--limit", "24"])
        .env("FREEVERTEX_LIMIT", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code().unwrap(), 0);
}

#[test]
fn oracle_fixed_query_uses_the_certificate() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "fano-complement", "--out", "fc.hg"], dir.path());
    run(
        &[
            "solve",
            "--mode",
            "free-vertex",
            "fc.hg",
            "--out",
            "cert.json",
        ],
        dir.path(),
    );
    let out = run(
        &["oracle", "fc.hg", "fixed", "--coloring", "cert.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["fixed_vertices"].as_array().is_some());
}

#[test]
fn bench_writes_ordered_verified_rows() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = r#"[
        {"generator": "random-nae", "n": 8, "m": 7, "seed_start": 0, "seed_end": 5},
        {"generator": "prop-family", "s_start": 1, "s_end": 3}
    ]"#;
    fs::write(dir.path().join("corpus.json"), corpus).unwrap();
    let out = run(
        &[
            "bench",
            "--corpus",
            "corpus.json",
            "--jobs",
            "3",
            "--out",
            "rows.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("index,generator"));
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(
            line.starts_with(&format!("{i},")),
            "row order broken: {line}"
        );
        assert!(line.contains(",true,"), "unverified row: {line}");
    }
}

#[test]
fn bench_empty_corpus_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.json"), "[]").unwrap();
    let out = run(&["bench", "--corpus", "empty.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn solve_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "gen",
            "random-nae",
            "--n",
            "11",
            "--m",
            "10",
            "--seed",
            "5",
            "--out",
            "i.cnf",
        ],
        dir.path(),
    );
    let a = run(&["solve", "--mode", "nae-free", "i.cnf"], dir.path());
    let b = run(&["solve", "--mode", "nae-free", "i.cnf"], dir.path());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(code(&a), 0);
}
