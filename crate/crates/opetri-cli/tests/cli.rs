//! End-to-end checks of the `opetri` binary against the sample documents.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opetri"))
}

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../sample-nets")
        .join(name)
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> &str {
    std::str::from_utf8(&out.stderr).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited")
}

#[test]
fn validate_summarizes_sample_documents() {
    let out = bin()
        .arg("validate")
        .arg(sample("relay.opn"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("net stage_one: 4 places, 2 transitions, 1 inputs, 3 outputs"));
    assert!(stdout(&out).contains("ok: 2 nets"));

    let out = bin()
        .arg("validate")
        .arg(sample("fork.opn"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("net fork: 4 places, 1 transitions, 3 inputs, 2 outputs"));
}

#[test]
fn failures_pick_the_documented_exit_codes() {
    // missing file: runtime failure, exit 1
    let out = bin()
        .arg("validate")
        .arg("no-such-file.opn")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cannot read"));

    // broken document: diagnostic with a line number, exit 1
    let broken = tmp("broken.opn");
    fs::write(
        &broken,
        "opennet 1\nnet n {\n  places A\n  inputs 1 -> Z\n}\n",
    )
    .unwrap();
    let out = bin().arg("validate").arg(&broken).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
    assert!(stderr(&out).contains("`Z`"), "{}", stderr(&out));

    // unknown net name: exit 1, diagnostic names it
    let out = bin()
        .args(["export-dot"])
        .arg(sample("relay.opn"))
        .arg("missing")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("`missing`"));

    // usage problems: exit 2
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(code(&out), 2);

    // --help is not an error
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn compose_emits_a_document_validate_accepts() {
    let composed = tmp("relay-composite.opn");
    let out = bin()
        .arg("compose")
        .arg(sample("relay.opn"))
        .args(["stage_one", "stage_two", "-o"])
        .arg(&composed)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let text = fs::read_to_string(&composed).unwrap();
    assert!(text.contains("places A B C D E"), "{text}");

    let out = bin().arg("validate").arg(&composed).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("net composite: 5 places, 4 transitions, 1 inputs, 1 outputs"));
}

#[test]
fn compose_merges_places_fed_by_one_point() {
    let out = bin()
        .arg("compose")
        .arg(sample("fork.opn"))
        .args(["fork", "swapper"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // both output points of `fork` land on E of `swapper`, so C, D, and E
    // collapse to one place that alpha fills twice
    assert!(stdout(&out).contains("places A B C F"), "{}", stdout(&out));
    assert!(
        stdout(&out).contains("transition alpha : A + B -> 2*C"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn tensor_keeps_the_parts_apart() {
    let out = bin()
        .arg("tensor")
        .arg(sample("relay.opn"))
        .args(["stage_one", "stage_one"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("net tensor {"), "{text}");
    // the second copy's names pick up suffixes instead of merging
    assert!(text.contains("A#2"), "{text}");
    assert!(text.contains("alpha#2"), "{text}");

    let reparsed = tmp("tensored.opn");
    fs::write(&reparsed, text).unwrap();
    let out = bin().arg("validate").arg(&reparsed).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("net tensor: 8 places, 4 transitions, 2 inputs, 6 outputs"));
}

#[test]
fn reach_reports_witnesses_and_dead_ends() {
    let composed = tmp("relay-for-reach.opn");
    let out = bin()
        .arg("compose")
        .arg(sample("relay.opn"))
        .args(["stage_one", "stage_two", "-o"])
        .arg(&composed)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = bin()
        .arg("reach")
        .arg(&composed)
        .args(["composite", "--from", "A:1", "--to", "E:1"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "reachable: alpha, gamma, beta, delta\n");

    // the stages preserve token count, so two tokens on E need two on A
    let out = bin()
        .arg("reach")
        .arg(&composed)
        .args(["composite", "--from", "A:1", "--to", "E:2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "unreachable\n");

    // an exploration that cannot finish is a failure, not an answer
    let out = bin()
        .arg("reach")
        .arg(&composed)
        .args([
            "composite",
            "--from",
            "A:1",
            "--to",
            "E:1",
            "--max-states",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("undecided"), "{}", stderr(&out));

    // without --to, the whole reachable set is listed
    let out = bin()
        .arg("reach")
        .arg(&composed)
        .args(["composite", "--from", "A:1"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "A\nB\nC\nD\nE\n5 markings\n");
}

#[test]
fn relation_tabulates_boundary_pairs() {
    let out = bin()
        .arg("relation")
        .arg(sample("relay.opn"))
        .args(["stage_one", "--bound", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("0 -> {0}"), "{text}");
    assert!(text.contains("1 -> {2}"), "{text}");
    assert!(text.contains("3*1 -> {3*2}"), "{text}");
    assert!(
        text.contains("pairs: 4; rows: 4; complete rows: 4"),
        "{text}"
    );
}

#[test]
fn check_laws_passes_and_repeats_byte_for_byte() {
    let run = || {
        bin()
            .arg("check-laws")
            .arg(sample("relay.opn"))
            .args(["--seed", "3", "--instances", "3"])
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let text = stdout(&first);
    let mut lines = text.lines().collect::<Vec<_>>();
    assert_eq!(lines.pop(), Some("all laws hold"));
    assert!(lines.len() >= 12, "{text}");
    for line in lines {
        let report: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(report["failed"], 0, "{line}");
    }
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn one_way_experiment_reports_deterministically() {
    let run = || {
        bin()
            .args(["one-way-experiment", "--seed", "7", "--instances", "4"])
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let summary: serde_json::Value =
        serde_json::from_str(stdout(&first).lines().last().unwrap()).unwrap();
    assert_eq!(summary["instances"], 4);
    let tallied = summary["equal"].as_u64().unwrap()
        + summary["unequal"].as_u64().unwrap()
        + summary["inconclusive"].as_u64().unwrap();
    assert_eq!(tallied, 4);
    assert_eq!(first.stdout, run().stdout);
}

#[test]
fn export_dot_draws_the_merged_double_arc() {
    let composed = tmp("fork-composite.opn");
    let out = bin()
        .arg("compose")
        .arg(sample("fork.opn"))
        .args(["fork", "swapper", "-o"])
        .arg(&composed)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = bin()
        .arg("export-dot")
        .arg(&composed)
        .arg("composite")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph {"), "{dot}");
    assert!(
        dot.contains("\"transition alpha\" -> \"place C\" [label=\"2\"];"),
        "{dot}"
    );
}
