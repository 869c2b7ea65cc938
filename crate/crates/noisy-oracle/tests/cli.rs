use std::path::Path;
use std::process::{Command, Output};

fn noisy_oracle(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisy-oracle"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn concentration_example_writes_tail_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let out = noisy_oracle(
        dir.path(),
        &["concentration", "--t", "493", "--gamma", "0.3", "--trials", "10000", "--seed", "7", "--out", "c.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "source,n,t,gamma,delta,trials,tail_freq,half_width,seed");
    assert!(lines[1].starts_with("walk,,493,"));
    assert!(text.contains("# metric tail_freq = "));
}

#[test]
fn walk_enumerate_two_steps() {
    let dir = tempfile::tempdir().unwrap();
    let out = noisy_oracle(dir.path(), &["walk", "enumerate", "--t", "2", "--out", "d.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert_eq!(
        data_lines(&text),
        ["phi_multiple,probability_numerator,probability_denominator", "0,1,2", "2,1,2"]
    );
}

#[test]
fn default_output_path_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = noisy_oracle(dir.path(), &["commutator", "--N", "8", "--r-phase", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("commutator.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["experiment"], "commutator");
    assert_eq!(value["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn out_of_range_parameter_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = noisy_oracle(dir.path(), &["concentration", "--gamma", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
    assert!(!dir.path().join("concentration.csv").exists());
}

#[test]
fn unknown_subcommand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(noisy_oracle(dir.path(), &["teleport"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = noisy_oracle(dir.path(), &["walk", "enumerate", "--t", "2", "--out", "missing/dir/d.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing/dir/d.csv"));
}

#[test]
fn config_file_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "experiment = \"concentration\"\n[params]\ngamma = \"high\"\n").unwrap();
    let out = noisy_oracle(dir.path(), &["run", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn config_file_run_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.toml"),
        "experiment = \"walk-chernoff\"\nseed = 5\noutput = \"file.csv\"\n[params]\nt = 64\ndelta = 0.2\ntrials = 500\n",
    )
    .unwrap();
    assert_eq!(noisy_oracle(dir.path(), &["run", "--config", "c.toml"]).status.code(), Some(0));
    let args = ["walk", "chernoff", "--t", "64", "--delta", "0.2", "--trials", "500", "--seed", "5", "--out", "flags.csv"];
    assert_eq!(noisy_oracle(dir.path(), &args).status.code(), Some(0));
    let a = std::fs::read(dir.path().join("file.csv")).unwrap();
    let b = std::fs::read(dir.path().join("flags.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_noisy-oracle"))
            .args(["classical-or", "--trials", "3000", "--seed", "11", "--out", name])
            .env("NOISY_ORACLE_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let one = run("1", "one.csv");
    assert_eq!(one, run("4", "four.csv"));
    assert_eq!(one, run("1", "again.csv"));
}

#[test]
fn robust_run_on_algorithm_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("algo.txt"),
        "registers Z=2 B=1 T=0; measure Z\ngate H Z\ngate X B\ngate H B\noracle\ngate DIFF Z\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("f.txt"), "00 -> 0\n01 -> 0\n10 -> 1\n11 -> 0\n").unwrap();
    let out = noisy_oracle(
        dir.path(),
        &["robust-run", "--algo", "algo.txt", "--oracle", "f.txt", "--mode", "exact", "--trials", "50", "--out", "r.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(data_lines(&text), ["outcome,count,frequency", "10,50,1.0000000000000000e0"]);
}
