//! End-to-end pipeline tests through the CLI binary: simulate -> embed ->
//! evaluate, manifest reproducibility, and exit-code conventions.

use std::path::Path;
use std::process::Command;

fn auase_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_auase"))
}

fn run_ok(args: &[&str]) -> String {
    let out = auase_cmd().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn simulate_into(dir: &Path, nodes: usize, seed: u64) {
    run_ok(&[
        "simulate",
        "--nodes",
        &nodes.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        dir.to_str().unwrap(),
    ]);
}

#[test]
fn simulate_embed_evaluate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let emb = dir.path().join("emb");
    simulate_into(&data, 120, 7);
    for t in 0..10 {
        assert!(data.join(format!("edges_t{t}.txt")).exists());
        assert!(data.join(format!("covariates_t{t}.csv")).exists());
    }
    assert!(data.join("labels.csv").exists());

    let edges = data.join("edges_t*.txt");
    let covs = data.join("covariates_t*.csv");
    run_ok(&[
        "embed",
        "--edges",
        edges.to_str().unwrap(),
        "--covariates",
        covs.to_str().unwrap(),
        "--alpha",
        "0.2",
        "--dim",
        "3",
        "--seed",
        "11",
        "--out",
        emb.to_str().unwrap(),
    ]);
    assert!(emb.join("embedding_t0.csv").exists());
    assert!(emb.join("singular_values.csv").exists());
    let manifest = std::fs::read_to_string(emb.join("manifest.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(parsed["n"], 120);
    assert_eq!(parsed["dim"], 3);
    assert_eq!(parsed["alpha"], 0.2);
    assert_eq!(parsed["seed"], 11);

    let stdout = run_ok(&[
        "evaluate",
        "--edges",
        edges.to_str().unwrap(),
        "--covariates",
        covs.to_str().unwrap(),
        "--labels",
        data.join("labels.csv").to_str().unwrap(),
        "--alpha",
        "0.2",
        "--dim",
        "3",
    ]);
    assert!(stdout.contains("classification accuracy"), "stdout: {stdout}");
    assert!(stdout.contains("f1:"), "stdout: {stdout}");
}

#[test]
fn embed_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    simulate_into(&data, 80, 3);
    let edges = data.join("edges_t*.txt");
    let covs = data.join("covariates_t*.csv");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("emb{run}"));
        run_ok(&[
            "embed",
            "--edges",
            edges.to_str().unwrap(),
            "--covariates",
            covs.to_str().unwrap(),
            "--alpha",
            "0.3",
            "--dim",
            "3",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        let mut bytes = Vec::new();
        for t in 0..10 {
            bytes.extend(std::fs::read(out.join(format!("embedding_t{t}.csv"))).unwrap());
        }
        bytes.extend(std::fs::read(out.join("singular_values.csv")).unwrap());
        outputs.push(bytes);
    }
    assert_eq!(outputs[0], outputs[1], "reruns with the same seed must be byte-identical");
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    simulate_into(&a, 60, 9);
    simulate_into(&b, 60, 9);
    for t in 0..10 {
        let name = format!("edges_t{t}.txt");
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
        let name = format!("covariates_t{t}.csv");
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
    }
}

#[test]
fn invalid_inputs_exit_code_one() {
    // missing input files
    let status = auase_cmd()
        .args(["embed", "--edges", "/nonexistent/*.txt", "--covariates", "/nonexistent/*.csv", "--out", "/tmp/never"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // bad alpha
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    simulate_into(&data, 30, 1);
    let status = auase_cmd()
        .args([
            "embed",
            "--edges",
            data.join("edges_t*.txt").to_str().unwrap(),
            "--covariates",
            data.join("covariates_t*.csv").to_str().unwrap(),
            "--alpha",
            "7",
            "--dim",
            "2",
            "--out",
            dir.path().join("emb").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1), "alpha out of range is a validation error");

    // unknown subcommand is a usage error
    let status = auase_cmd().args(["frobnicate"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn dimension_autoselection_reports_choice() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    simulate_into(&data, 80, 13);
    let stdout = run_ok(&[
        "embed",
        "--edges",
        data.join("edges_t*.txt").to_str().unwrap(),
        "--covariates",
        data.join("covariates_t*.csv").to_str().unwrap(),
        "--alpha",
        "0.2",
        "--seed",
        "17",
        "--out",
        dir.path().join("emb").to_str().unwrap(),
    ]);
    assert!(stdout.contains("selected dimension"), "stdout: {stdout}");
}

#[test]
fn stability_and_rate_commands_run() {
    let stdout = run_ok(&[
        "stability-check",
        "--nodes",
        "80",
        "--seed",
        "3",
        "--svd-power-iters",
        "20",
    ]);
    assert!(stdout.contains("unfolded embedding"), "stdout: {stdout}");
    assert!(stdout.contains("per-interval embedding"), "stdout: {stdout}");

    let stdout = run_ok(&[
        "rate-check",
        "--sizes",
        "60,120",
        "--reps",
        "2",
        "--seed",
        "5",
        "--svd-power-iters",
        "10",
    ]);
    assert!(stdout.contains("log-log slope"), "stdout: {stdout}");
}
