//! End-to-end CLI behavior: exit codes, JSON error payloads, and artifact
//! round trips through the subcommands.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qwalk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
}

fn run_demo(dir: &Path) {
    let status = qwalk().args(["demo", "--out-dir"]).arg(dir).status().unwrap();
    assert!(status.success());
}

fn stderr_json(output: &Output) -> Value {
    let text = String::from_utf8_lossy(&output.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("non-JSON stderr: {text}"))
}

#[test]
fn verify_walk_against_its_szegedy_form() {
    let dir = tempfile::tempdir().unwrap();
    run_demo(dir.path());
    let out = dir.path().join("report.json");
    let output = qwalk()
        .arg("verify")
        .args(["--a"])
        .arg(dir.path().join("paw_walk.json"))
        .args(["--b"])
        .arg(dir.path().join("paw_szegedy.json"))
        .args(["--map"])
        .arg(dir.path().join("paw_bijection.json"))
        .args(["--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["verdict"], Value::Bool(true));
    assert!(report["max_abs_diff"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["idle_dimension"], 8);
}

#[test]
fn conversion_rejects_degree_three_y_with_named_index() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(
        &input,
        r#"{"schema":1,"x":3,"y":1,"edges":[{"x":0,"y":0},{"x":1,"y":0},{"x":2,"y":0}]}"#,
    )
    .unwrap();
    let output = qwalk()
        .args(["convert", "--from", "szegedy", "--to", "coined", "--in"])
        .arg(&input)
        .args(["--out"])
        .arg(dir.path().join("out.json"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = stderr_json(&output);
    assert_eq!(err["error"], "HypothesisViolated");
    assert_eq!(err["index"], 0);
}

#[test]
fn search_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    run_demo(dir.path());
    let out = dir.path().join("trace.csv");
    let status = qwalk()
        .args(["search", "--model", "szegedy", "--graph"])
        .arg(dir.path().join("torus_szegedy_presink.json"))
        .args(["--marked", "4", "--steps", "50", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 52, "header plus 51 rows");
    assert_eq!(lines[0], "t,p_marked,p_max_vertex,argmax_flag");
    let p0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((p0 - 1.0 / 9.0).abs() < 1e-12);
}

#[test]
fn coined_and_szegedy_search_traces_agree_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    run_demo(dir.path());
    let graph = dir.path().join("torus.json");
    std::fs::write(
        &graph,
        serde_json::to_string(&serde_json::json!({
            "schema": 1,
            "vertices": 9,
            "edges": [[0,1],[0,3],[1,2],[1,4],[2,0],[2,5],[3,4],[3,6],[4,5],[4,7],
                      [5,3],[5,8],[6,7],[6,0],[7,8],[7,1],[8,6],[8,2]],
        }))
        .unwrap(),
    )
    .unwrap();
    let coined_out = dir.path().join("coined.csv");
    let status = qwalk()
        .args(["search", "--model", "coined", "--graph"])
        .arg(&graph)
        .args(["--marked", "4", "--steps", "20", "--out"])
        .arg(&coined_out)
        .status()
        .unwrap();
    assert!(status.success());
    let szegedy_out = dir.path().join("szegedy.csv");
    let status = qwalk()
        .args(["search", "--model", "szegedy", "--graph"])
        .arg(dir.path().join("torus_szegedy_presink.json"))
        .args(["--marked", "4", "--steps", "20", "--out"])
        .arg(&szegedy_out)
        .status()
        .unwrap();
    assert!(status.success());

    let read_p = |path: &Path| -> Vec<f64> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let a = read_p(&coined_out);
    let b = read_p(&szegedy_out);
    assert_eq!(a.len(), b.len());
    for (t, (x, y)) in a.iter().zip(&b).enumerate() {
        assert!((x - y).abs() <= 1e-10, "t={t}: {x} vs {y}");
    }
}

#[test]
fn tolerance_env_var_loosens_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    run_demo(dir.path());
    // Below machine epsilon the verdict fails; QWALK_TOL restores it.
    let a = dir.path().join("paw_walk.json");
    let b = dir.path().join("paw_szegedy.json");
    let map = dir.path().join("paw_bijection.json");

    let strict = qwalk()
        .args(["--tolerance", "1e-20", "verify", "--a"])
        .arg(&a)
        .args(["--b"])
        .arg(&b)
        .args(["--map"])
        .arg(&map)
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(stderr_json(&strict)["error"], "VerdictFailed");

    let relaxed = qwalk()
        .env("QWALK_TOL", "1e-6")
        .args(["verify", "--a"])
        .arg(&a)
        .args(["--b"])
        .arg(&b)
        .args(["--map"])
        .arg(&map)
        .output()
        .unwrap();
    assert!(relaxed.status.success());
}

#[test]
fn io_failure_exits_with_code_two() {
    let output = qwalk()
        .args(["build", "--input", "/nonexistent/walk.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "Io");
}

#[test]
fn dump_then_verify_against_source_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    run_demo(dir.path());
    let op = dir.path().join("op.json");
    let status = qwalk()
        .args(["dump", "--input"])
        .arg(dir.path().join("paw_walk.json"))
        .args(["--out"])
        .arg(&op)
        .status()
        .unwrap();
    assert!(status.success());
    let output = qwalk()
        .args(["verify", "--a"])
        .arg(dir.path().join("paw_walk.json"))
        .args(["--b"])
        .arg(&op)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
}

#[test]
fn state_dump_lists_arc_labels_with_unit_norm() {
    let dir = tempfile::tempdir().unwrap();
    run_demo(dir.path());
    let output = qwalk()
        .args(["dump", "--what", "state", "--input"])
        .arg(dir.path().join("paw_walk.json"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let state: Value = serde_json::from_slice(&output.stdout).unwrap();
    let basis = state["basis"].as_array().unwrap();
    assert_eq!(basis.len(), 8);
    assert_eq!(basis[0], "(0,0)");
    assert_eq!(basis[7], "(3,1)");
    let norm: f64 = state["amplitudes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|pair| {
            let re = pair[0].as_f64().unwrap();
            let im = pair[1].as_f64().unwrap();
            re * re + im * im
        })
        .sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn staggered_conversion_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    run_demo(dir.path());
    // coined -> staggered -> szegedy through files, then verify against the
    // original walk with the emitted map.
    let staggered = dir.path().join("stag.json");
    let status = qwalk()
        .args(["convert", "--from", "coined", "--to", "staggered", "--in"])
        .arg(dir.path().join("paw_walk.json"))
        .args(["--out"])
        .arg(&staggered)
        .status()
        .unwrap();
    assert!(status.success());
    let szegedy = dir.path().join("sz.json");
    let map = dir.path().join("map.json");
    let status = qwalk()
        .args(["convert", "--from", "staggered", "--to", "szegedy", "--in"])
        .arg(&staggered)
        .args(["--out"])
        .arg(&szegedy)
        .args(["--map-out"])
        .arg(&map)
        .status()
        .unwrap();
    assert!(status.success());
    let output = qwalk()
        .args(["verify", "--a"])
        .arg(dir.path().join("paw_walk.json"))
        .args(["--b"])
        .arg(&szegedy)
        .args(["--map"])
        .arg(&map)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
}
