//! End-to-end runs of the binary against the shipped fixtures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doceval"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "doceval {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn build_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let src = fixture("src.txt");
    let tgt = fixture("tgt.txt");
    for out in ["a", "b"] {
        run_ok(&[
            "build",
            "--src",
            src.to_str().unwrap(),
            "--tgt",
            tgt.to_str().unwrap(),
            "--l-max",
            "120",
            "--mode",
            "gaussian",
            "--seed",
            "7",
            "--out",
            tmp.path().join(out).to_str().unwrap(),
        ]);
    }
    for name in ["pseudo_docs.jsonl", "stats.tsv", "metadata.json"] {
        assert_eq!(
            read(&tmp.path().join("a"), name),
            read(&tmp.path().join("b"), name),
            "{name} must be byte-identical across reruns"
        );
    }
    let jsonl = read(&tmp.path().join("a"), "pseudo_docs.jsonl");
    assert!(
        jsonl.lines().count() > 6,
        "a 120-token budget must cut the longer fixture documents"
    );
}

#[test]
fn score_identity_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let tgt = fixture("tgt.txt");
    run_ok(&[
        "score",
        "--hyp",
        tgt.to_str().unwrap(),
        "--ref",
        tgt.to_str().unwrap(),
        "--config",
        "ident:256",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let report = read(tmp.path(), "report.tsv");
    assert!(report.contains("bleu\t100\t100.0 (1.00)"), "{report}");
    assert!(report.contains("d-bleu\t100\t"), "{report}");
    let scores = read(tmp.path(), "scores.tsv");
    assert_eq!(scores.lines().count(), 6, "one row per fixture document");
    assert!(scores.lines().all(|l| l.ends_with("\t100")), "{scores}");
}

#[test]
fn score_reports_all_three_metrics_on_real_output() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&[
        "score",
        "--hyp",
        fixture("hyp.txt").to_str().unwrap(),
        "--ref",
        fixture("tgt.txt").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    let bleu = report["bleu"]["score"].as_f64().unwrap();
    let d_bleu = report["d_bleu"]["score"].as_f64().unwrap();
    let ds_bleu = report["ds_bleu"]["corpus_score"].as_f64().unwrap();
    for (name, value) in [("bleu", bleu), ("d-bleu", d_bleu), ("ds-bleu", ds_bleu)] {
        assert!(
            value > 50.0 && value < 100.0,
            "{name} = {value} out of range for the lightly edited hypothesis"
        );
    }
    assert_eq!(
        report["ds_bleu"]["per_document"].as_array().unwrap().len(),
        6
    );
}

#[test]
fn realign_identity_recovers_boundaries() {
    let tmp = tempfile::tempdir().unwrap();
    let tgt = fixture("tgt.txt");
    run_ok(&[
        "realign",
        "--hyp",
        tgt.to_str().unwrap(),
        "--ref",
        tgt.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "report.json")).unwrap();
    assert_eq!(report["total_edit_cost"], 0, "identity aligns at zero cost");
    assert_eq!(report["empty_segments"], 0);
    assert_eq!(report["sentences"], 76);
    assert_eq!(
        read(tmp.path(), "realigned.jsonl").lines().count(),
        76,
        "one record per reference sentence"
    );
}

#[test]
fn compare_runs_on_scored_output() {
    let tmp = tempfile::tempdir().unwrap();
    let tgt = fixture("tgt.txt");
    for (config, hyp, dir) in [
        ("base:256", fixture("hyp.txt"), "s256"),
        ("base:512", tgt.clone(), "s512"),
    ] {
        run_ok(&[
            "score",
            "--hyp",
            hyp.to_str().unwrap(),
            "--ref",
            tgt.to_str().unwrap(),
            "--metric",
            "dsbleu",
            "--config",
            config,
            "--out",
            tmp.path().join(dir).to_str().unwrap(),
        ]);
    }
    let merged = format!(
        "{}{}",
        read(&tmp.path().join("s256"), "scores.tsv"),
        read(&tmp.path().join("s512"), "scores.tsv")
    );
    fs::write(tmp.path().join("scores.tsv"), merged).unwrap();
    run_ok(&[
        "compare",
        "--scores",
        tmp.path().join("scores.tsv").to_str().unwrap(),
        "--ladder",
        "256,512",
        "--pair",
        "base:256=base:512",
        "--out",
        tmp.path().join("cmp").to_str().unwrap(),
    ]);
    let adjacent = read(&tmp.path().join("cmp"), "adjacent.tsv");
    assert!(adjacent.starts_with("system\t256-512\n"), "{adjacent}");
    assert!(adjacent.lines().nth(1).unwrap().starts_with("base\t"));
    let report: serde_json::Value = serde_json::from_str(&read(&tmp.path().join("cmp"), "report.json")).unwrap();
    assert_eq!(report["adjacent"].as_array().unwrap().len(), 1);
    assert_eq!(report["pairs"].as_array().unwrap().len(), 1);
    // Identity beats the edited hypothesis on every document, so the paired
    // test must find the step significant.
    let p = report["pairs"][0]["result"]["p_value"].as_f64().unwrap();
    assert!(p <= 0.05, "identity vs edited hypothesis should separate, p = {p}");
}

#[test]
fn repeats_flags_degenerate_output() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("hyp.txt");
    fs::write(
        &corpus,
        "# doc looping\nthe plan covers the plan covers the plan covers the plan covers the plan covers it\n# doc clean\nA short sensible translation with no repeats at all here.\n",
    )
    .unwrap();
    run_ok(&[
        "repeats",
        "--group",
        &format!("base:512={}", corpus.display()),
        "--run-len",
        "5",
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    let rates = read(&tmp.path().join("out"), "rates.tsv");
    assert!(rates.contains("base\t512\t1\t2\t0.5"), "{rates}");
    let flagged = read(&tmp.path().join("out"), "flagged.tsv");
    assert!(flagged.contains("base\t512\tlooping"), "{flagged}");
    assert!(!flagged.contains("clean"));
}

#[test]
fn positions_profiles_the_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(&[
        "positions",
        "--corpus",
        fixture("src.txt").to_str().unwrap(),
        "--l-max",
        "512",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let coverage = read(tmp.path(), "coverage.csv");
    assert_eq!(coverage.lines().next().unwrap(), "position,baseline,shape,unifpe");
    assert_eq!(coverage.lines().count(), 513, "header plus one row per position");
    let flatness = read(tmp.path(), "flatness.tsv");
    assert_eq!(flatness.lines().count(), 4);
}

#[test]
fn missing_boundary_reports_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, "\nstray sentence before any marker\n").unwrap();
    let out = run(&[
        "score",
        "--hyp",
        bad.to_str().unwrap(),
        "--ref",
        bad.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "runtime errors exit 1");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("line 2") && stderr.contains("boundary"),
        "error must name the offending line: {stderr}"
    );
}

#[test]
fn bad_usage_exits_two() {
    let out = run(&["score", "--hyp", "only-one-side.txt"]);
    assert_eq!(out.status.code(), Some(2), "clap usage errors exit 2");
}

#[test]
fn unaligned_sentence_scoring_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let hyp = tmp.path().join("hyp.txt");
    let reference = tmp.path().join("ref.txt");
    // Same document, different segment counts: fine for d-BLEU, fatal for
    // sentence BLEU.
    fs::write(&hyp, "# doc a\nOne single merged segment here.\n").unwrap();
    fs::write(&reference, "# doc a\nOne single.\nMerged segment here.\n").unwrap();
    let out = run(&[
        "score",
        "--hyp",
        hyp.to_str().unwrap(),
        "--ref",
        reference.to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dbleu"));

    run_ok(&[
        "score",
        "--hyp",
        hyp.to_str().unwrap(),
        "--ref",
        reference.to_str().unwrap(),
        "--metric",
        "dbleu",
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
}
