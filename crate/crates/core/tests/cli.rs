use std::path::Path;
use std::process::{Command, Output};

use localfactor::harness::Report;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localfactor")).args(args).output().expect("binary runs")
}

fn report_of(out: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a report")
}

#[test]
fn threshold_window_is_empty_by_theory() {
    let out = run(&["window", "--model", "er", "--beta", "0.707107"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report_of(&out);
    assert_eq!(r.outputs["window"]["empty_by_theory"], true);
    assert_eq!(r.outputs["window"]["theoretical_bound"], 0.0);
}

#[test]
fn density_command_reports_a_quarter() {
    let out = run(&["density", "--rule", "local-min", "--d", "3", "--trials", "1000000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report_of(&out);
    let a = r.outputs["estimate"]["alpha_hat"].as_f64().unwrap();
    let se = r.outputs["estimate"]["std_error"].as_f64().unwrap();
    assert!((a - 0.25).abs() <= 3.0 * se);
    assert!(r.all_passed());
}

#[test]
fn odd_replica_count_exits_nonzero_with_parity_error() {
    let out = run(&["gen", "--model", "reg", "--n", "3", "--d", "1", "--seed", "1"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity"));
}

#[test]
fn seed_is_required() {
    let out = run(&["density", "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn report_file_round_trips_and_embeds_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["moments", "--model", "er", "--n", "4", "--d", "1", "--m", "2", "--k", "1", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let r = Report::from_json(&text).unwrap();
    assert_eq!(Report::from_json(&r.to_json().unwrap()).unwrap(), r);
    assert_eq!(r.config.command.name(), "moments");
}

fn body(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["gen", "--model", "reg", "--n", "5000", "--d", "3", "--seed", "3"],
        vec!["gen", "--model", "er", "--n", "5000", "--d", "2.5", "--seed", "3"],
        vec!["sweep", "--rule", "multi-round-greedy", "--rounds", "3", "--d", "4", "--points", "6", "--trials", "20000", "--seed", "3"],
        vec!["couple", "--n", "20000", "--d", "3", "--p", "0.5", "--graphs", "3", "--seed", "3"],
        vec!["rate", "--model", "reg", "--d", "500", "--beta", "0.9", "--points", "101"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let mut bodies = Vec::new();
        for threads in ["1", "3"] {
            let file = dir.path().join(format!("{i}-{threads}.out"));
            let mut full = args.clone();
            full.extend(["--threads", threads, "--out", file.to_str().unwrap()]);
            let out = run(&full);
            assert_eq!(out.status.code(), Some(0), "{full:?}: {}", String::from_utf8_lossy(&out.stderr));
            bodies.push(body(&file));
        }
        assert!(!bodies[0].is_empty());
        assert_eq!(bodies[0], bodies[1], "{args:?}");
    }
}

#[test]
fn thread_count_falls_back_to_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_localfactor"))
        .args(["density", "--d", "3", "--trials", "1000", "--seed", "1"])
        .env("LOCALFACTOR_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report_of(&out).config.threads, Some(2));
}
