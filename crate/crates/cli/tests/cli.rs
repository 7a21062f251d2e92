use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokes-cluster"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn airy_tuple_by_default() {
    let out = run(&["stokes", "--n", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let w = v["w"].as_array().unwrap();
    assert_eq!(w.len(), 3);
    assert!(w.iter().all(|p| p.as_array().unwrap().len() == 4));
    assert_eq!(v["method"], "wronskian");
    assert_eq!(v["normalized"], false);
}

#[test]
fn flip_coherence_suite_passes() {
    let out = run(&["verify", "--suite", "flip-coherence", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("flip-coherence: PASS (50 samples)"), "{text}");
}

#[test]
fn malformed_json_is_an_input_error() {
    let out = run(&["stokes", "--input", "{\"n\": 1, \"a\": [[1, 2]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));

    let out = run(&["chart", "--coeffs", "[1, 2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_arguments_are_input_errors() {
    assert_eq!(run(&["stokes", "--n", "7"]).status.code(), Some(2));
    assert_eq!(run(&["chart", "--n", "1", "--hbar", "-1,0"]).status.code(), Some(2));
    assert_eq!(run(&["chart", "--n", "1", "--hbar", "one"]).status.code(), Some(2));
    assert_eq!(run(&["stokes", "--coeffs", "[[0,0]]", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_names_the_error() {
    let out = run(&["stokes", "--coeffs", "[[0,0]]"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DiscriminantViolation"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["chart", "--coeffs", "[[0.3,-0.2],[0.5,0.4]]", "--hbar", "0.5,0.1"],
        vec!["sweep", "--coeffs", "[[-1,0]]", "--points", "4"],
        vec!["verify", "--suite", "round-trip", "--samples", "5", "--seed", "9"],
    ] {
        let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("{}-{i}", args[0]))).collect();
        for p in &paths {
            let mut full = args.clone();
            full.extend(["--out", p.to_str().unwrap()]);
            assert_eq!(run(&full).status.code(), Some(0), "{args:?}");
        }
        assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap(), "{args:?}");
    }
}

#[test]
fn chart_report_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let out = run(&["chart", "--coeffs", "[[-1,0]]", "--hbar", "0.25", "--out", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let again = run(&["chart", "--input", first.to_str().unwrap()]);
    assert_eq!(again.stdout, std::fs::read(&first).unwrap());

    let report: Value = serde_json::from_slice(&again.stdout).unwrap();
    let x = &report["chart"]["X"][0];
    let expected = (-std::f64::consts::PI / 0.25).sin_cos();
    assert!((x[0].as_f64().unwrap() - expected.1).abs() < 1e-8);
    assert!((x[1].as_f64().unwrap() - expected.0).abs() < 1e-8);
}

#[test]
fn trajectories_write_svg_and_structure() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("f.svg");
    let out = run(&["trajectories", "--coeffs", "[[0.3,-0.2],[0.5,0.4]]", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["saddle_free"], true);
    assert_eq!(v["wkb_triangulation"]["arcs"].as_array().unwrap().len(), 2);
    assert_eq!(v["separatrices"].as_array().unwrap().len(), 3);
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.contains("<svg") && text.contains("id=\"wkb-arcs\""));
}

#[test]
fn exchange_graph_is_a_pentagon() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let out = run(&["exchange-graph", "--n", "2", "--dot", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("graph"));
    assert_eq!(text.matches(" -- ").count(), 5);
}
