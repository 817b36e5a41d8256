use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gst_cli::report::COLUMNS;

fn gst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gst")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// The CSV cell in `column` for the row whose algorithm is `algorithm`.
fn cell(csv: &str, algorithm: &str, column: &str) -> String {
    let idx = COLUMNS.iter().position(|c| *c == column).unwrap();
    let row = csv.lines().find(|l| l.starts_with(&format!("{algorithm},"))).unwrap();
    row.split(',').nth(idx).unwrap().to_string()
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| (dir.path().join(format!("{i}.csv")), dir.path().join(format!("{i}.json")))).collect();
    for (csv, json) in &paths {
        let out = gst(&[
            "compare",
            "--config",
            scenario("gnp_batch.json").to_str().unwrap(),
            "--seed",
            "11",
            "--trials",
            "4",
            "--csv",
            csv.to_str().unwrap(),
            "--json",
            json.to_str().unwrap(),
        ]);
        stdout(&out);
    }
    assert_eq!(std::fs::read(&paths[0].0).unwrap(), std::fs::read(&paths[1].0).unwrap());
    assert_eq!(std::fs::read(&paths[0].1).unwrap(), std::fs::read(&paths[1].1).unwrap());
    let text = std::fs::read_to_string(&paths[0].0).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 4);
}

#[test]
fn header_and_tree_row() {
    let csv = stdout(&gst(&["run", "--config", scenario("tree3.json").to_str().unwrap()]));
    assert_eq!(csv.lines().next().unwrap(), COLUMNS.join(","));
    assert_eq!(cell(&csv, "gst", "epr_pairs"), "34");
    assert_eq!(cell(&csv, "gst", "timesteps"), "7");
    assert_eq!(cell(&csv, "edcg", "epr_pairs"), "105");
    assert_eq!(cell(&csv, "edcg", "timesteps"), "14");
}

#[test]
fn flags_match_scenario_file() {
    let from_flags = stdout(&gst(&["run", "--generate", "tree:3", "--root", "center", "--strategy", "shortest"]));
    let from_file = stdout(&gst(&["run", "--config", scenario("tree3.json").to_str().unwrap()]));
    assert_eq!(from_flags, from_file);
}

#[test]
fn file_overrides_flags() {
    let csv = stdout(&gst(&["run", "--generate", "line:5", "--config", scenario("tree3.json").to_str().unwrap()]));
    assert_eq!(cell(&csv, "gst", "n"), "15");
}

#[test]
fn bottleneck_fixed_root_flow() {
    let cfg = scenario("bottleneck.json");
    let csv = stdout(&gst(&["run", "--config", cfg.to_str().unwrap()]));
    assert_eq!(cell(&csv, "gst", "timesteps"), "2");
    assert_eq!(cell(&csv, "gst", "root"), "root");
    assert_eq!(cell(&csv, "gst", "strategy"), "flow");

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("opt.json");
    let text = stdout(&gst(&["optimize", "--config", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]));
    assert!(text.lines().any(|l| l == "k 2"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["max_flow"], 3);
    assert_eq!(v["rounds"], 2);
    assert_eq!(v["paths"].as_array().unwrap().len(), 3);
}

#[test]
fn bottleneck_any_root_reaches_one() {
    let topo = scenario("bottleneck_topology.json");
    let text = stdout(&gst(&["optimize", "--topology-file", topo.to_str().unwrap(), "--targets", "s1,s2,s3"]));
    assert!(text.lines().any(|l| l == "k 1"));
}

#[test]
fn invalid_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"roots": "center"}"#).unwrap();
    assert_eq!(gst(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(gst(&["run", "--root", "fixed:nowhere"]).status.code(), Some(3));
    assert_eq!(gst(&["run", "--generate", "gnp:5:2"]).status.code(), Some(3));
    assert_eq!(gst(&["run", "--targets", "random:99"]).status.code(), Some(3));
    assert_eq!(gst(&["run", "--no-such-flag"]).status.code(), Some(3));
}

#[test]
fn gen_topo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    stdout(&gst(&["gen-topo", "--spec", "grid:3x3", "--out", path.to_str().unwrap()]));
    let csv = stdout(&gst(&["run", "--topology-file", path.to_str().unwrap(), "--targets", "random:4", "--seed", "2"]));
    assert_eq!(cell(&csv, "gst", "n"), "9");
    assert_eq!(cell(&csv, "gst", "s"), "4");
}

#[test]
fn verify_oracle_passes() {
    let text = stdout(&gst(&["verify-oracle", "--random", "3"]));
    assert!(text.contains(", 0 failures"), "{text}");
}
