use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use maze_modularity::maze::Dataset;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maze-modularity"))
        .args(args)
        .env_remove("MAZE_MODULARITY_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const SMALL: [&str; 8] = [
    "--num-doors",
    "2",
    "--maze-length",
    "1",
    "--num-context-mazes",
    "2",
    "--num-independent-mazes",
    "2",
];

#[test]
fn generate_writes_loadable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.json");
    let mut args = vec!["generate", "--out", path.to_str().unwrap()];
    args.extend(SMALL);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"num_doors\":2"));
    let ds = Dataset::load(&path).unwrap();
    assert_eq!((ds.train.len(), ds.test.len()), (2 + 4 + 2, 4));
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("m.json");
    let mut args = vec!["train", "--model", "oracle", "--out", ckpt.to_str().unwrap()];
    args.extend(SMALL);
    assert_eq!(code(&run(&args)), 0);
    let mut args = vec!["eval", "--checkpoint", ckpt.to_str().unwrap()];
    args.extend(SMALL);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("oracle: train_acc=1.0000 test_acc=1.0000"));
}

#[test]
fn verification_commands_pass() {
    let out = run(&["gradcheck"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let out = run(&["oracle-check", "--seeds", "25"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn gradcheck_impossible_threshold_is_verification_failure() {
    assert_eq!(code(&run(&["gradcheck", "--threshold", "0"])), 2);
}

#[test]
fn usage_and_config_errors_exit_1() {
    assert_eq!(code(&run(&["sweep", "--feature", "doors", "--no-such-flag"])), 1);
    assert_eq!(code(&run(&["sweep", "--feature", "colour"])), 1);
    assert_eq!(code(&run(&["generate", "--num-doors", "1", "--out", "x.json"])), 1);
    assert_eq!(
        code(&run(&["sweep", "--feature", "doors", "--values", "4,3", "--models", "oracle"])),
        1
    );
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn io_failures_exit_3_with_path() {
    let out = run(&["eval", "--checkpoint", "/definitely/missing.json"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/missing.json"));
}

fn sweep_into(dir: &Path) {
    let out = run(&[
        "sweep",
        "--feature",
        "doors",
        "--values",
        "2,3",
        "--trials",
        "2",
        "--models",
        "oracle,morphognosis,lstm",
        "--maze-length",
        "1",
        "--num-context-mazes",
        "2",
        "--num-independent-mazes",
        "2",
        "--mlp-hidden",
        "6",
        "--epochs-mlp",
        "20",
        "--lstm-hidden",
        "4",
        "--epochs-lstm",
        "5",
        "--jobs",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    sweep_into(a.path());
    sweep_into(b.path());
    for name in ["doors_trials.csv", "doors_summary.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name} differs");
    }
    let trials = fs::read_to_string(a.path().join("doors_trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 2 * 2 * 3);
    assert!(a.path().join("doors_metadata.json").exists());
}
