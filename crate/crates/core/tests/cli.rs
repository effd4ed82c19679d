use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intension"))
        .args(args)
        .env_remove("INTENSION_SEED")
        .env_remove("INTENSION_TIMING")
        .output()
        .unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn toy_task() -> PathBuf {
    let path = tmp("cli-toy.task");
    fs::write(&path, "task v1\nvars 2\nframe 0\ngoal 10\ngoal 00\n").unwrap();
    path
}

#[test]
fn fit_prints_the_weakest_sentence() {
    let task = toy_task();
    let out = run(&["fit", "--task", task.to_str().unwrap(), "--samples", "1", "--width", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "(x1=0)"), "{text}");
    assert!(text.lines().any(|l| l == "weakness 2"), "{text}");
}

#[test]
fn fit_extensional_lists_the_sample() {
    let task = toy_task();
    let out = run(&["fit", "--task", task.to_str().unwrap(), "--learner", "extensional", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("weakness 1"));
}

#[test]
fn curve_writes_one_row_per_trial_and_learner() {
    let out_path = tmp("cli-curve.csv");
    let out = run(&[
        "curve", "--generator", "addition", "--params", "w=1", "--samples", "1,2,3", "--trials", "30",
        "--seed", "7", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("task,learner,m,trial,seed,rate,weakness,exact,fit_ms"));
    // 3 sample sizes x 30 trials x 3 learners
    assert_eq!(lines.count(), 270);
    assert!(String::from_utf8_lossy(&out.stderr).contains("verdict: PASS"));
}

#[test]
fn seed_comes_from_flag_or_environment() {
    let args = ["curve", "--generator", "addition", "--params", "w=1", "--trials", "3"];
    let with_flag = run(&[&args[..], &["--seed", "17"]].concat());
    let with_env = Command::new(env!("CARGO_BIN_EXE_intension"))
        .args(args)
        .env("INTENSION_SEED", "17")
        .env_remove("INTENSION_TIMING")
        .output()
        .unwrap();
    let other = run(&[&args[..], &["--seed", "18"]].concat());
    assert_eq!(with_flag.stdout, with_env.stdout);
    assert_ne!(with_flag.stdout, other.stdout);
}

#[test]
fn gen_output_reads_back() {
    let path = tmp("cli-gen.task");
    let out = run(&["gen", "--generator", "toycpu", "--params", "w=1,ops=ADD+XOR", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let task = intension::read_task(&text).unwrap();
    assert_eq!(task.goals().len(), 8);
    assert_eq!(intension::write_task(&task), text);
}

#[test]
fn eval_reports_a_rate() {
    let out = run(&["eval", "--generator", "addition", "--params", "w=1", "--eval-mode", "full"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().last().unwrap().starts_with("rate "));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["curve"]).status.code(), Some(1));
    assert_eq!(run(&["fit", "--generator", "parity", "--params", "n=3", "--learner", "psychic"]).status.code(), Some(1));
    assert_eq!(run(&["fit", "--task", "/nonexistent/file.task"]).status.code(), Some(2));

    let bad = tmp("cli-bad.task");
    fs::write(&bad, "task v1\nvars 2\ngoal 1\n").unwrap();
    assert_eq!(run(&["fit", "--task", bad.to_str().unwrap()]).status.code(), Some(2));

    // single literals cannot carve out parity
    let infeasible = run(&["fit", "--generator", "parity", "--params", "n=3", "--samples", "3", "--width", "1"]);
    assert_eq!(infeasible.status.code(), Some(3));

    let selftest = run(&["selftest", "--seed", "1"]);
    assert_eq!(selftest.status.code(), Some(0), "{}", stdout(&selftest));
}

#[test]
fn dominance_failure_exits_four() {
    // Width 2 cannot carve a random goal set, so every intensional fit is
    // infeasible and its missing rates count as zero against the strongest fit.
    let out = run(&[
        "curve", "--generator", "random", "--width", "2", "--learner", "intensional,strongest",
        "--samples", "8,16", "--trials", "5",
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("verdict: FAIL"));
    assert_eq!(out.status.code(), Some(4));
}
