//! End-to-end tests driving the `bicell` binary as a subprocess.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use bicell::map::PlantedBicellularMap;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bicell"));
    cmd.env_remove("BICELL_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("stdout is text")
}

fn manifest_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).expect("manifest exists"))
        .expect("manifest is valid JSON")
}

#[test]
fn count_trees_matches_catalan() {
    let output = run(&["count", "--family", "trees", "--n", "3"]);
    assert_eq!(stdout_of(&output), "5\n");
}

#[test]
fn count_cross_check_agrees_three_ways() {
    let output = run(&[
        "count", "--family", "bi", "--g", "1", "--n", "5", "--cross-check",
    ]);
    let stdout = stdout_of(&output);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    for line in lines {
        assert!(line.ends_with(": 5440"), "unexpected line: {line}");
    }
}

#[test]
fn count_empty_diagram_family_is_zero() {
    let output = run(&["count", "--family", "diagrams", "--g", "1", "--len", "3"]);
    assert_eq!(stdout_of(&output), "0\n");
}

#[test]
fn count_table_lands_in_csv_with_manifest() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("bi.csv");
    let output = run(&[
        "count", "--family", "bi", "--g", "1", "--n", "5",
        "--out", table.to_str().unwrap(),
    ]);
    stdout_of(&output);
    let csv = fs::read_to_string(&table).unwrap();
    assert!(csv.starts_with("# family=bi g=1 n=5\nn,count\n"));
    assert!(csv.contains("\n5,5440\n"));

    let manifest = manifest_json(&dir.path().join("bi.csv.manifest.json"));
    assert_eq!(manifest["command"], "count");
    assert_eq!(manifest["outputs"][0]["path"], table.to_str().unwrap());
    let expected = format!("{:x}", Sha256::digest(csv.as_bytes()));
    assert_eq!(manifest["outputs"][0]["sha256"], expected.as_str());
    assert_eq!(
        manifest["count_table_sha256"], expected.as_str(),
        "the emitted table is the count table backing the run"
    );
}

#[test]
fn sample_is_deterministic_under_seed() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (path, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let output = run(&[
            "sample", "--mode", "diagram", "--g", "1", "--len", "12",
            "--N", "40", "--seed", seed, "--out", path.to_str().unwrap(),
        ]);
        stdout_of(&output);
    }
    let bytes_a = fs::read(&a).unwrap();
    assert_eq!(bytes_a, fs::read(&b).unwrap(), "same seed, same bytes");
    assert_ne!(bytes_a, fs::read(&c).unwrap(), "new seed, new draws");
    assert_eq!(bytes_a.iter().filter(|&&b| b == b'\n').count(), 40);
}

#[test]
fn sample_thread_count_does_not_change_bytes() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("t1"), dir.path().join("t4"));
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let output = run(&[
            "sample", "--mode", "diagram", "--g", "2", "--len", "20",
            "--N", "60", "--seed", "5", "--threads", threads,
            "--out", path.to_str().unwrap(),
        ]);
        stdout_of(&output);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sample_env_seed_matches_flag() {
    let dir = TempDir::new().unwrap();
    let (flagged, env) = (dir.path().join("flag"), dir.path().join("env"));
    let output = run(&[
        "sample", "--mode", "diagram", "--g", "1", "--len", "10",
        "--N", "20", "--seed", "9", "--out", flagged.to_str().unwrap(),
    ]);
    stdout_of(&output);
    let output = bin()
        .args([
            "sample", "--mode", "diagram", "--g", "1", "--len", "10",
            "--N", "20", "--out", env.to_str().unwrap(),
        ])
        .env("BICELL_SEED", "9")
        .output()
        .unwrap();
    stdout_of(&output);
    assert_eq!(fs::read(&flagged).unwrap(), fs::read(&env).unwrap());

    let manifest = manifest_json(&dir.path().join("env.manifest.json"));
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["seed_source"], "env");
}

#[test]
fn sample_zero_draws_keeps_manifest_valid() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("none.txt");
    let output = run(&[
        "sample", "--mode", "matching", "--g", "1", "--n", "4",
        "--N", "0", "--seed", "1", "--out", out.to_str().unwrap(),
    ]);
    stdout_of(&output);
    assert_eq!(fs::read(&out).unwrap().len(), 0);
    let manifest = manifest_json(&dir.path().join("none.txt.manifest.json"));
    assert_eq!(manifest["outputs"][0]["bytes"], 0);
    assert_eq!(manifest["config"]["N"], 0);
}

#[test]
fn sample_empty_family_exits_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never.txt");
    let output = run(&[
        "sample", "--mode", "diagram", "--g", "1", "--len", "3",
        "--N", "5", "--seed", "1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("admits no diagram"), "stderr: {stderr}");
    assert!(!out.exists(), "no output file for an empty family");
}

#[test]
fn matching_blocks_parse_back_at_the_right_genus() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("maps.txt");
    let output = run(&[
        "sample", "--mode", "matching", "--g", "1", "--n", "3",
        "--N", "4", "--seed", "2", "--out", out.to_str().unwrap(),
    ]);
    stdout_of(&output);
    let text = fs::read_to_string(&out).unwrap();
    let blocks: Vec<&str> = text.split("\n\n").collect();
    assert_eq!(blocks.len(), 4);
    for block in blocks {
        let map = PlantedBicellularMap::from_text(block).expect("block parses");
        assert_eq!(map.genus(), 1);
        assert_eq!(map.arc_count(), 3);
    }
}

#[test]
fn decompose_rebuild_round_trip_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let fixture = dir.path().join("map.txt");
    let map = PlantedBicellularMap::from_arcs(2, &[(1, 3), (2, 4)]).unwrap();
    fs::write(&fixture, map.to_text()).unwrap();

    let trace = stdout_of(&run(&["decompose", "--in", fixture.to_str().unwrap()]));
    let trace_file = dir.path().join("trace.txt");
    fs::write(&trace_file, &trace).unwrap();
    let rebuilt = stdout_of(&run(&["rebuild", "--in", trace_file.to_str().unwrap()]));
    assert_eq!(rebuilt, map.to_text());
}

#[test]
fn rebuild_reads_stdin_with_dash() {
    let dir = TempDir::new().unwrap();
    let fixture = dir.path().join("map.txt");
    let map = PlantedBicellularMap::from_arcs(1, &[(1, 2)]).unwrap();
    fs::write(&fixture, map.to_text()).unwrap();
    let trace = stdout_of(&run(&["decompose", "--in", fixture.to_str().unwrap()]));

    let mut child = bin()
        .args(["rebuild", "--in", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(trace.as_bytes())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert_eq!(stdout_of(&output), map.to_text());
}

#[test]
fn decompose_accepts_diagram_lines() {
    let dir = TempDir::new().unwrap();
    let fixture = dir.path().join("diagram.txt");
    fs::write(&fixture, "2 2 | 1-3 2-4\n").unwrap();
    let trace = stdout_of(&run(&["decompose", "--in", fixture.to_str().unwrap()]));
    assert!(trace.starts_with("arcs: 2\ngenus: 0\n"), "trace: {trace}");
}

#[test]
fn decompose_entry_choice_round_trips_and_bounds_are_checked() {
    let dir = TempDir::new().unwrap();
    let fixture = dir.path().join("map.txt");
    let map = PlantedBicellularMap::from_arcs(2, &[(1, 3), (2, 4)]).unwrap();
    fs::write(&fixture, map.to_text()).unwrap();

    // Entering through the second trisection still inverts cleanly.
    let trace = stdout_of(&run(&[
        "decompose", "--in", fixture.to_str().unwrap(), "--trisection", "1",
    ]));
    let trace_file = dir.path().join("trace.txt");
    fs::write(&trace_file, &trace).unwrap();
    let rebuilt = stdout_of(&run(&["rebuild", "--in", trace_file.to_str().unwrap()]));
    assert_eq!(rebuilt, map.to_text());

    // This genus-0 map has 2(0+1) = 2 trisections, so index 2 is out of range.
    let output = run(&[
        "decompose", "--in", fixture.to_str().unwrap(), "--trisection", "2",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("out of range"), "stderr: {stderr}");
}

#[test]
fn genus_zero_trace_has_single_connect_step() {
    let dir = TempDir::new().unwrap();
    let fixture = dir.path().join("map.txt");
    let map = PlantedBicellularMap::from_arcs(1, &[(1, 2)]).unwrap();
    fs::write(&fixture, map.to_text()).unwrap();
    let trace = stdout_of(&run(&["decompose", "--in", fixture.to_str().unwrap()]));
    let glue_lines: Vec<&str> = trace.lines().filter(|l| l.starts_with("glue:")).collect();
    assert_eq!(glue_lines.len(), 1);
    assert!(glue_lines[0].starts_with("glue: connect"));
}

#[test]
fn stats_emits_requested_histograms_reproducibly() {
    let dir = TempDir::new().unwrap();
    let (first, second) = (dir.path().join("one"), dir.path().join("two"));
    for out_dir in [&first, &second] {
        let output = run(&[
            "stats", "--len", "30", "--g", "1", "--N", "120", "--seed", "3",
            "--out-dir", out_dir.to_str().unwrap(),
        ]);
        stdout_of(&output);
    }
    let stems = [
        "loop_len", "pk_loop_len", "stack_len", "beta_stack_count", "stack_count",
    ];
    for stem in stems {
        let file = format!("{stem}.csv");
        let bytes = fs::read(first.join(&file)).unwrap();
        assert_eq!(bytes, fs::read(second.join(&file)).unwrap(), "{file} reproduces");
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("# meta: len=30 genus=1 samples=120 seed=3\n"));
        assert!(text.contains("value,count"));
    }
    let manifest = manifest_json(&first.join("manifest.json"));
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), stems.len());

    let subset = dir.path().join("subset");
    let output = run(&[
        "stats", "--len", "30", "--g", "1", "--N", "120", "--seed", "3",
        "--which", "loop_len,stack_count",
        "--out-dir", subset.to_str().unwrap(),
    ]);
    stdout_of(&output);
    assert!(subset.join("loop_len.csv").exists());
    assert!(subset.join("stack_count.csv").exists());
    assert!(!subset.join("stack_len.csv").exists());
}

#[test]
fn verify_counts_suite_passes() {
    let output = run(&["verify", "--suite", "counts"]);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("ok   bi-recursion-vs-path-sum"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn config_file_is_echoed_into_the_manifest() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("batch.toml");
    fs::write(&config, "label = \"batch7\"\nreplicates = 3\n").unwrap();
    let out = dir.path().join("s.txt");
    let output = run(&[
        "sample", "--mode", "diagram", "--g", "0", "--len", "8",
        "--N", "3", "--seed", "4", "--out", out.to_str().unwrap(),
        "--config", config.to_str().unwrap(),
    ]);
    stdout_of(&output);
    let manifest = manifest_json(&dir.path().join("s.txt.manifest.json"));
    assert_eq!(manifest["config_file"]["contents"]["label"], "batch7");
    assert_eq!(manifest["config_file"]["contents"]["replicates"], 3);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let output = run(&["count", "--family", "trees", "--n", "3", "--bogus"]);
    assert_eq!(output.status.code(), Some(2));
}
