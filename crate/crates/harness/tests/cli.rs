//! End-to-end checks of the installed binary: exit codes, output shapes,
//! and the documented CSV/JSON contracts, driven through a real process.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regsubmax"))
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("regsubmax-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn gen_writes_a_loadable_instance_and_exits_zero() {
    let dir = tempdir("gen");
    let path = dir.join("instance.json");
    let output = run(&[
        "gen",
        "--n",
        "6",
        "--seed",
        "3",
        "--k",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let loaded = regsubmax_harness::load_instance(&path).unwrap();
    assert_eq!(loaded.n(), 6);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_without_out_prints_the_instance_json() {
    let output = run(&["gen", "--n", "4", "--seed", "5"]);
    assert!(output.status.success());
    let file = regsubmax_harness::parse_instance_json(&stdout(&output)).unwrap();
    assert_eq!(file.n, 4);
}

#[test]
fn solve_single_rep_prints_header_run_and_summary() {
    let dir = tempdir("solve");
    let path = dir.join("instance.json");
    assert!(run(&[
        "gen",
        "--n",
        "5",
        "--seed",
        "11",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let output = run(&[
        "solve",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "unconstrained",
        "--seed",
        "42",
        "--reps",
        "1",
    ]);
    assert!(output.status.success());
    let csv = stdout(&output);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3, "expected header + run + summary:\n{csv}");
    assert_eq!(lines[0], regsubmax_harness::CSV_HEADER);
    assert!(lines[1].starts_with("unconstrained,5,"));
    assert!(lines[2].starts_with("summary:unconstrained,5,"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_fills_bound_columns() {
    let dir = tempdir("verify");
    let path = dir.join("instance.json");
    assert!(run(&[
        "gen",
        "--n",
        "5",
        "--seed",
        "13",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let output = run(&[
        "verify",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "random-greedy",
        "--k",
        "2",
        "--reps",
        "500",
        "--seed",
        "7",
    ]);
    assert!(output.status.success());
    let csv = stdout(&output);
    let summary = csv.lines().last().unwrap();
    let cells: Vec<&str> = summary.split(',').collect();
    assert_eq!(cells.len(), 16);
    assert!(cells[0].starts_with("summary:random_greedy"));
    for idx in [11, 12, 13] {
        assert!(
            !cells[idx].is_empty(),
            "verify left column {idx} blank: {summary}"
        );
    }
    assert_eq!(cells[14], "true");
    assert!(!cells[15].is_empty());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_on_a_large_ground_set_exits_with_the_size_guard() {
    let dir = tempdir("guard");
    let path = dir.join("instance.json");
    assert!(run(&[
        "gen",
        "--n",
        "25",
        "--seed",
        "17",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let output = run(&[
        "verify",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "unconstrained",
        "--reps",
        "2",
    ]);
    assert_eq!(output.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&output.stderr).contains("25"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_of_window_epsilon_exits_with_the_precondition_code() {
    let dir = tempdir("eps");
    let path = dir.join("instance.json");
    assert!(run(&[
        "gen",
        "--n",
        "6",
        "--seed",
        "19",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let output = run(&[
        "solve",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "sampling-greedy",
        "--k",
        "3",
        "--epsilon",
        "0.2",
    ]);
    assert_eq!(output.status.code(), Some(3));
    let output = run(&[
        "solve",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "auto",
        "--k",
        "3",
        "--epsilon",
        "0.9",
    ]);
    assert_eq!(output.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_instance_file_exits_with_the_schema_code() {
    let dir = tempdir("schema");
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        "{\"n\": 3, \"g\": {\"type\": \"directed_cut\", \"arcs\": []}}",
    )
    .unwrap();
    let output = run(&[
        "solve",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "unconstrained",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("$.ell"));
    std::fs::write(&path, "not json at all").unwrap();
    let output = run(&[
        "solve",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "unconstrained",
    ]);
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_emits_one_header_and_a_block_per_grid_point() {
    let dir = tempdir("sweep");
    let path = dir.join("instance.json");
    assert!(run(&[
        "gen",
        "--n",
        "6",
        "--seed",
        "23",
        "--out",
        path.to_str().unwrap()
    ])
    .status
    .success());
    let out_csv = dir.join("sweep.csv");
    let output = run(&[
        "sweep",
        "--instance",
        path.to_str().unwrap(),
        "--algorithm",
        "random-greedy",
        "--k-grid",
        "1,2,3",
        "--reps",
        "4",
        "--seed",
        "31",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    // Header plus three grid points of four runs and a summary each.
    assert_eq!(lines.len(), 1 + 3 * 5);
    assert_eq!(lines[0], regsubmax_harness::CSV_HEADER);
    assert_eq!(
        lines.iter().filter(|l| l.starts_with("summary:")).count(),
        3
    );
    std::fs::remove_dir_all(&dir).ok();
}
