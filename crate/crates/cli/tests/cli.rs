use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn markovspan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markovspan"))
        .args(args)
        .env_remove("MARKOVSPAN_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/models")
}

fn model(name: &str) -> String {
    models_dir().join(name).display().to_string()
}

fn temp_model(name: &str, src: &str) -> String {
    let dir = std::env::temp_dir().join(format!("markovspan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, src).unwrap();
    path.display().to_string()
}

#[test]
fn deadlock_series_for_two_philosophers() {
    let o = markovspan(&["deadlock", "--model", "dining", "--n", "2", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "0, 0");
    assert_eq!(lines[1], "1, 1/4 ≈ 0.25");
    assert!(lines[4].starts_with("4, 4415/6912 ≈ 0.6387442129"), "{}", lines[4]);
}

#[test]
fn file_and_builtin_agree() {
    let a = markovspan(&["deadlock", "--model", "dining", "--n", "2", "--k", "6", "--format", "csv"]);
    let b = markovspan(&[
        "deadlock", "--file", &model("phil_fork.mkv"), "--init", "(1,1,1,1)", "--k", "6", "--format", "csv",
    ]);
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn deadlock_series_is_nondecreasing() {
    let o = markovspan(&["deadlock", "--model", "dining", "--n", "2", "--k", "30", "--float", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let values: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 31);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn limit_is_one_and_conditions_hold() {
    let o = markovspan(&["limit", "--model", "dining", "--n", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"]["limit"]["total"]["exact"], "1");
    assert_eq!(v["results"]["limit"]["deadlocks"][0]["state"], "(2,3,2,3)");
    assert_eq!(v["results"]["all_conditions_hold"], true);
    let c = &v["results"]["convergence"];
    for key in ["unique_deadlock", "return_paths", "self_loops"] {
        assert_eq!(c[key], true, "{key}");
    }
}

#[test]
fn limit_without_deadlock_is_a_finding() {
    let f = temp_model(
        "cycle.mkv",
        "alphabet A = { eps };\nautomaton P [A, A] { states: a b; a -(eps|eps)-> b : 1; b -(eps|eps)-> a : 1; }\nsystem S = P;\n",
    );
    let o = markovspan(&["limit", "--file", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no absorbing"));
}

#[test]
fn negative_weight_is_a_positioned_input_error() {
    let f = temp_model(
        "negative.mkv",
        "alphabet A = { eps };\nautomaton P [A, A] {\n  states: a b;\n  a -(eps|eps)-> a : -1/2;\n  a -(eps|eps)-> b : 3/2;\n  b -(eps|eps)-> b : 1;\n}\n",
    );
    let o = markovspan(&["check", "--file", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("negative.mkv:4:"), "{err}");
    assert!(err.contains("negative"), "{err}");
}

#[test]
fn check_reports_non_markov_automata() {
    let f = temp_model(
        "heavy.mkv",
        "alphabet A = { eps };\nautomaton P [A, A] { states: a; a -(eps|eps)-> a : 2; }\n",
    );
    let o = markovspan(&["check", "--file", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "P: not Markov\n");

    let o = markovspan(&["check", "--file", &model("phil_fork.mkv")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Phil: Markov\nFork: Markov\nDF2: Markov\n");
}

#[test]
fn open_system_and_unknown_state_are_input_errors() {
    let f = temp_model(
        "open.mkv",
        "alphabet A = { eps, t };\nautomaton P [A, A] { states: a; a -(eps|eps)-> a : 1/2; a -(t|t)-> a : 1/2; }\nsystem S = P;\n",
    );
    let o = markovspan(&["deadlock", "--file", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("closed system"));

    let o = markovspan(&["deadlock", "--model", "dining", "--init", "9,9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown state"));

    let o = markovspan(&["limit", "--file", &model("constants.mkv")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--system"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(markovspan(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(markovspan(&["deadlock", "--model", "dining", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(markovspan(&["deadlock"]).status.code(), Some(2));
    assert_eq!(markovspan(&["deadlock", "--model", "dining", "--exact", "--float"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let phil_fork = model("phil_fork.mkv");
    let runs: Vec<Vec<&str>> = vec![
        vec!["deadlock", "--model", "dining", "--n", "2", "--k", "8", "--format", "json"],
        vec!["limit", "--model", "dining", "--n", "3", "--format", "json"],
        vec!["compose", "--file", &phil_fork, "--format", "json"],
        vec!["simulate", "--model", "dining", "--k", "4", "--trajectories", "5000", "--seed", "11", "--format", "json"],
    ];
    for args in runs {
        let a = markovspan(&args);
        let b = markovspan(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn simulation_ignores_thread_count() {
    let args = ["simulate", "--model", "dining", "--k", "4", "--trajectories", "20000", "--seed", "3", "--format", "csv"];
    let one = Command::new(env!("CARGO_BIN_EXE_markovspan"))
        .args(args)
        .env("MARKOVSPAN_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_markovspan"))
        .args(args)
        .env("MARKOVSPAN_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let line = stdout(&one).lines().nth(1).unwrap().to_string();
    let estimate: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
    assert!((estimate - 4415.0 / 6912.0).abs() < 0.02, "{estimate}");
}

#[test]
fn json_report_envelope() {
    for args in [
        vec!["check", "--model", "dining", "--format", "json"],
        vec!["deadlock", "--model", "dining", "--k", "2", "--format", "json", "--float"],
        vec!["laws", "--model", "dining", "--format", "json"],
        vec!["dining", "--n", "2", "--format", "json"],
    ] {
        let o = markovspan(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["command", "model", "parameters", "results", "version"], "{args:?}");
        assert_eq!(v["command"], args[0]);
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn float_values_use_shortest_form() {
    let o = markovspan(&["deadlock", "--model", "dining", "--k", "1", "--float"]);
    assert_eq!(stdout(&o), "0, 0\n1, 0.25\n");
}

#[test]
fn emit_matches_library_source_and_bundled_file() {
    for n in 1..=3 {
        let o = markovspan(&["dining", "--n", &n.to_string(), "--emit"]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), markovspan::models::dining_source(n).unwrap());
    }
    let bundled = std::fs::read_to_string(models_dir().join("dining3.mkv")).unwrap();
    assert_eq!(bundled, markovspan::models::dining_source(3).unwrap());
}

#[test]
fn dining_summary() {
    let o = markovspan(&["dining", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("states: 144"), "{out}");
    assert!(out.contains("reachable deadlocks: (2,3,2,3)"), "{out}");
}

#[test]
fn laws_hold_on_the_components() {
    let o = markovspan(&["laws", "--file", &model("phil_fork.mkv")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with(", 0 failed"));
}

#[test]
fn compose_emits_canonical_automaton() {
    let o = markovspan(&["compose", "--file", &model("phil_fork.mkv")]);
    assert_eq!(o.status.code(), Some(0));
    let json: markovspan::AutomatonJson = serde_json::from_slice(&o.stdout).unwrap();
    let m = markovspan::MarkovAutomaton::<markovspan::Rational>::from_json(&json).unwrap();
    assert_eq!(m.num_states(), 144);
}
