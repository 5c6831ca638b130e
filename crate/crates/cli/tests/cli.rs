use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ivote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivote"))
        .args(args)
        .env_remove("IVOTE_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_scenario(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.txt");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn honest_election_exits_zero_with_a_tally() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(dir.path(), "variant = proposed\nm = 3\nvoters = 12\n");
    let out = dir.path().join("out");
    let o = ivote(&["run-election", "--scenario", &scenario, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let tally = json(&out.join("tally.json"));
    assert_eq!(tally["ballots_counted"], 12);
    assert!(out.join("events.jsonl").exists());
}

#[test]
fn student_attack_election_exits_with_alarm() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "variant = proposed\nm = 3\nvoters = 8\nadversary.kind = student_substitution\n",
    );
    let out = dir.path().join("out");
    let o = ivote(&["run-election", "--scenario", &scenario, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_or_malformed_scenario_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("nope.txt");
    let o = ivote(&["run-election", "--scenario", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 64);

    let bad = write_scenario(dir.path(), "m = 1\n");
    let o = ivote(&["run-election", "--scenario", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 64);

    let bad = write_scenario(dir.path(), "colour = blue\n");
    let o = ivote(&["run-election", "--scenario", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 64);
}

#[test]
fn flag_errors_exit_64_and_help_exits_zero() {
    assert_eq!(code(&ivote(&["--help"])), 0);
    assert_eq!(code(&ivote(&["--version"])), 0);
    assert_eq!(code(&ivote(&["frobnicate"])), 64);
    assert_eq!(code(&ivote(&["reproduce-tables", "--variant", "hybrid"])), 64);
    assert_eq!(code(&ivote(&["reproduce-tables", "--seed", "xyz"])), 64);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("out");
    let o = ivote(&["reproduce-tables", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 74);
}

#[test]
fn seed_flag_overrides_environment_and_reproduces_runs() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(dir.path(), "m = 4\nvoters = 6\n");
    let run = |name: &str, seed: Option<&str>, env: Option<&str>| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ivote"));
        cmd.args(["run-election", "--scenario", &scenario, "--out", out.to_str().unwrap()]);
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        match env {
            Some(e) => cmd.env("IVOTE_SEED", e),
            None => cmd.env_remove("IVOTE_SEED"),
        };
        assert_eq!(code(&cmd.output().unwrap()), 0);
        fs::read_to_string(out.join("trials.csv")).unwrap()
    };
    let a = "11".repeat(32);
    let b = "22".repeat(32);
    let flag = run("flag", Some(&a), Some(&b));
    assert_eq!(flag, run("flag_again", Some(&a), None));
    assert_eq!(run("env", None, Some(&b)), run("flag_b", Some(&b), None));
    assert_ne!(flag, run("env_b", None, Some(&b)));
}

#[test]
fn privacy_experiment_separates_the_variants() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = ivote(&["privacy-experiment", "--trials", "4000", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let verdict = json(&out.join("privacy.json"));
    assert_eq!(verdict["original_rate"], 1.0);
    let proposed = json(&out.join("proposed").join("report.json"));
    let best = proposed["rates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "guess_best")
        .unwrap()["rate"]
        .as_f64()
        .unwrap();
    assert!((0.17..=0.23).contains(&best), "{best}");
    assert!(out.join("privacy.csv").exists());
    assert!(out.join("original").join("trials.csv").exists());
}

#[test]
fn privacy_experiment_at_two_candidates_is_a_coin_toss() {
    let dir = TempDir::new().unwrap();
    let scenario = write_scenario(dir.path(), "m = 2\ntrials = 2000\n");
    let out = dir.path().join("out");
    let o = ivote(&["privacy-experiment", "--scenario", &scenario, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let verdict = json(&out.join("privacy.json"));
    assert_eq!(verdict["expected_rate"], 0.5);
    assert_eq!(verdict["proposed_within_guessing"], true);
}

#[test]
fn leaky_transcripts_violate_the_privacy_claim() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = ivote(&["privacy-experiment", "--leaky", "--trials", "500", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&out.join("privacy.json"))["passed"], false);
}

#[test]
fn reproduce_tables_matches_builtin_expectations() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = ivote(&["reproduce-tables", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("mAlQ"));
    let truncation = fs::read_to_string(out.join("truncation.csv")).unwrap();
    assert!(truncation.contains("aBxQwSOckfrzdYuaDNcvtTIDqKjEmAlQ,aBxQwSOckfrzdYuaDNcvtTIDqKjE,mAlQ,mAlQ"));
    let cost = fs::read_to_string(out.join("cost.csv")).unwrap();
    assert!(cost.contains("proposed,3,verif_app,sym_dec,3,3"));
    assert!(cost.contains("original,3,vfs,sym_enc,0,0"));
}

#[test]
fn tampered_expectations_exit_one_with_a_diff() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let exp = dir.path().join("exp.txt");
    fs::write(
        &exp,
        "cost proposed vfs sym_enc 2\ntruncate aBxQwSOckfrzdYuaDNcvtTIDqKjEmAlQ mAlX\n",
    )
    .unwrap();
    let o = ivote(&[
        "reproduce-tables",
        "--expectations",
        exp.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("vfs.sym_enc: expected 2, measured 1"), "{stderr}");
    assert!(stderr.contains("expected mAlX, shown mAlQ"), "{stderr}");
}
