//! End-to-end checks of the command-line binary: pipeline plumbing, file
//! formats, manifests, exit statuses and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dtim::manifest::RunManifest;

fn dtim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = dtim(dir, args);
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    fs::write(
        dir.join("edges.txt"),
        "0 1\n0 2\n1 2\n2 3\n3 1\n4 2\n4 3\n1 0\n5 3\n5 1\n",
    )
    .unwrap();

    ok(dir, &["ingest", "--input", "edges.txt", "--output", "canon.txt"]);
    ok(dir, &["rank", "--input", "canon.txt", "--output", "scores.txt"]);
    ok(dir, &["weight", "--input", "canon.txt", "--output", "dg.txt"]);
    ok(dir, &["targets", "--graph", "dg.txt", "--L-perc", "40", "--output", "ts.txt"]);
    ok(
        dir,
        &[
            "select", "--graph", "dg.txt", "--variant", "local", "--k", "2", "--L-perc", "40",
            "--output", "seeds.txt",
        ],
    );
    ok(
        dir,
        &[
            "simulate", "--graph", "dg.txt", "--seeds", "seeds.txt", "--runs", "500",
            "--L-perc", "40", "--output", "sim.txt",
        ],
    );
    ok(
        dir,
        &[
            "ris-select", "--graph", "dg.txt", "--variant", "global", "--k", "2", "--epsilon",
            "0.3", "--L-perc", "40", "--output", "ris.txt",
        ],
    );
    ok(
        dir,
        &[
            "sweep", "--graph", "dg.txt", "--variant", "local", "--alphas", "0,1", "--ks", "1",
            "--runs", "200", "--L-perc", "40", "--output", "sweep.tsv",
        ],
    );
    ok(dir, &["overlap", "--k", "2", "--output", "ov.tsv", "seeds.txt", "ris.txt"]);

    // formats: seed result has 5 columns, simulate one line per node + header
    let seeds = fs::read_to_string(dir.join("seeds.txt")).unwrap();
    assert_eq!(seeds.lines().count(), 2);
    assert!(seeds.lines().all(|l| l.split_whitespace().count() == 5));
    let sim = fs::read_to_string(dir.join("sim.txt")).unwrap();
    assert_eq!(sim.lines().filter(|l| !l.starts_with('#')).count(), 6);
    let sweep = fs::read_to_string(dir.join("sweep.tsv")).unwrap();
    assert!(sweep.starts_with("# variant=local"));
    assert_eq!(sweep.lines().count(), 4);
    let ov = fs::read_to_string(dir.join("ov.tsv")).unwrap();
    assert!(ov.lines().nth(1).unwrap().contains("1.000000")); // self overlap

    // each output carries a manifest recording parameters and input hash
    let manifest = RunManifest::read(
        fs::File::open(dir.join("seeds.txt.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest.subcommand, "select");
    assert_eq!(manifest.parameters["k"], "2");
    assert_eq!(manifest.parameters["L_perc"], "40");
    assert!(manifest.input_hash.is_some());
}

#[test]
fn reruns_reproduce_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    fs::write(dir.join("edges.txt"), "0 1\n1 2\n2 0\n3 2\n3 1\n4 0\n").unwrap();
    ok(dir, &["weight", "--input", "edges.txt", "--output", "dg.txt"]);
    for out in ["a.txt", "b.txt"] {
        ok(
            dir,
            &[
                "simulate", "--graph", "dg.txt", "--seeds", "edges.txt", "--runs", "300",
                "--rng-seed", "9", "--output", out,
            ],
        );
    }
    assert_eq!(
        fs::read_to_string(dir.join("a.txt")).unwrap(),
        fs::read_to_string(dir.join("b.txt")).unwrap()
    );
}

#[test]
fn ris_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    fs::write(dir.join("edges.txt"), "0 1\n1 2\n0 2\n3 1\n4 2\n4 1\n").unwrap();
    ok(dir, &["weight", "--input", "edges.txt", "--output", "dg.txt"]);
    let args = |out| {
        vec![
            "ris-select", "--graph", "dg.txt", "--variant", "capital", "--k", "1", "--epsilon",
            "0.3", "--cache", "pool.bin", "--output", out,
        ]
    };
    ok(dir, &args("first.txt"));
    assert!(dir.join("pool.bin").exists());
    ok(dir, &args("second.txt")); // served from the cache
    assert_eq!(
        fs::read_to_string(dir.join("first.txt")).unwrap(),
        fs::read_to_string(dir.join("second.txt")).unwrap()
    );
}

#[test]
fn example2_prints_both_variant_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["example2"]);
    assert_eq!(out, "seed: b\nseed: u1\n");
    let global = ok(dir.path(), &["example2", "--variant", "global"]);
    assert_eq!(global, "seed: u1\n");
}

#[test]
fn exit_statuses_distinguish_usage_from_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    // usage errors: unknown flag, invalid budget
    let usage = dtim(dir, &["select", "--bogus"]);
    assert_eq!(usage.status.code(), Some(2));
    let zero_k = dtim(
        dir,
        &["select", "--graph", "x", "--variant", "local", "--k", "0", "--output", "y"],
    );
    assert_eq!(zero_k.status.code(), Some(2));
    // runtime error: missing input file
    let missing = dtim(
        dir,
        &["select", "--graph", "absent.txt", "--variant", "local", "--k", "1", "--output", "y"],
    );
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("dtim:"));
}

#[test]
fn environment_variables_override_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    fs::write(dir.join("edges.txt"), "0 1\n1 2\n0 2\n3 1\n").unwrap();
    ok(dir, &["weight", "--input", "edges.txt", "--output", "dg.txt"]);
    let out = Command::new(env!("CARGO_BIN_EXE_dtim"))
        .current_dir(dir)
        .env("DTIM_K", "2")
        .env("DTIM_ETA", "0")
        .args(["select", "--graph", "dg.txt", "--variant", "local", "--output", "seeds.txt"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = RunManifest::read(
        fs::File::open(dir.join("seeds.txt.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest.parameters["k"], "2");
    assert_eq!(manifest.parameters["eta"], "0");
}
