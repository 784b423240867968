use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use matchkit::cli::{EXIT_OK, EXIT_OUTPUT, EXIT_SIZE, EXIT_UNSTABLE, EXIT_USAGE};

fn matchkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchkit"))
        .args(args)
        .env_remove("MATCHKIT_EPS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> u8 {
    out.status.code().expect("exited normally") as u8
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("matchkit-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_str().unwrap().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

const BOXED: &str = r#"{"n": 2, "theta_m": [[1, 0], [0, 1]], "theta_w": [[1, 5], [0, 1]]}"#;

#[test]
fn solve_both_regimes_on_boxed_example() {
    let s = Scratch::new("solve");
    let inst = s.file("boxed.json", BOXED);

    let nt = matchkit(&["solve", "nt", "--instance", &inst]);
    assert_eq!(code(&nt), EXIT_OK);
    assert!(stdout(&nt).contains("matching: 1→1' 2→2'"));

    let women = matchkit(&["solve", "nt", "--instance", &inst, "--proposer", "women"]);
    assert_eq!(code(&women), EXIT_OK);
    assert!(stdout(&women).contains("blocking pairs: none"));

    let ft = matchkit(&["solve", "ft", "--instance", &inst]);
    assert_eq!(code(&ft), EXIT_OK);
    let text = stdout(&ft);
    assert!(text.contains("matching: 1→2' 2→1'"));
    assert!(text.contains("total value: 5"));
    assert!(text.contains("dual cuts: u1=3 u2=0 v1'=0 v2'=2"));
}

#[test]
fn check_reports_blocking_chain() {
    let s = Scratch::new("check");
    let inst = s.file("boxed.json", BOXED);
    let id = s.file("id.json", r#"{"assignment": [0, 1]}"#);
    let swap = s.file("swap.json", r#"{"assignment": [1, 0]}"#);

    let out = matchkit(&["check", "--instance", &inst, "--matching", &id, "--p", "1", "--q", "1"]);
    assert_eq!(code(&out), EXIT_UNSTABLE);
    assert!(stdout(&out).contains("unstable: chain (1 2)"));

    let out = matchkit(&["check", "--instance", &inst, "--matching", &swap, "--p", "1", "--q", "1"]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(stdout(&out).contains("stable"));

    // no transfers: the identity plan is stable
    let out = matchkit(&["check", "--instance", &inst, "--matching", &id, "--p", "0", "--q", "0"]);
    assert_eq!(code(&out), EXIT_OK);
}

#[test]
fn usage_errors_exit_with_two() {
    let s = Scratch::new("usage");
    let inst = s.file("boxed.json", BOXED);
    let id = s.file("id.json", r#"{"assignment": [0, 1]}"#);
    let bad = s.file("bad.json", r#"{"n": 2, "theta_m": [[1, 0]], "theta_w": [[1, 5], [0, 1]]}"#);
    let not_perm = s.file("dup.json", r#"{"assignment": [0, 0]}"#);

    for args in [
        vec!["check", "--instance", &inst, "--matching", &id, "--p", "1.5", "--q", "1"],
        vec!["check", "--instance", &inst, "--matching", &not_perm, "--p", "0", "--q", "0"],
        vec!["solve", "nt", "--instance", &bad],
        vec!["solve", "nt", "--instance", "/nonexistent/instance.json"],
        vec!["counterexample", "--p", "0.5", "--q", "0.5"],
        vec!["gen", "--n", "3", "--seed", "1", "--dist", "normal"],
        vec!["core", "--model", "ft_sideways", "--instance", &inst, "--matching", &id],
        vec!["frobnicate"],
    ] {
        let out = matchkit(&args);
        assert_eq!(code(&out), EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn invalid_tolerance_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_matchkit"))
        .args(["gen", "--n", "2", "--seed", "0"])
        .env("MATCHKIT_EPS", "-1")
        .output()
        .unwrap();
    assert_eq!(code(&out), EXIT_USAGE);
}

#[test]
fn size_limits_exit_with_three() {
    let out = matchkit(&["sweep", "--n", "7", "--grid", "2", "--trials", "1"]);
    assert_eq!(code(&out), EXIT_SIZE);

    let s = Scratch::new("size");
    let gen = matchkit(&["gen", "--n", "4", "--seed", "3"]);
    let inst = s.file("four.json", &stdout(&gen));
    let m = s.file("m.json", r#"{"assignment": [0, 1, 2, 3]}"#);
    let out = matchkit(&["core", "--model", "ft_nonneg", "--instance", &inst, "--matching", &m]);
    assert_eq!(code(&out), EXIT_SIZE);
}

#[test]
fn unwritable_output_exits_with_four() {
    let out = matchkit(&["gen", "--n", "2", "--seed", "0", "--out", "/nonexistent/dir/x.json"]);
    assert_eq!(code(&out), EXIT_OUTPUT);
}

#[test]
fn sweep_csv_has_a_row_per_cell_and_is_reproducible() {
    let args = ["sweep", "--grid", "11", "--trials", "6", "--seed", "5"];
    let a = matchkit(&args);
    let b = matchkit(&args);
    assert_eq!(code(&a), EXIT_OK);
    let text = stdout(&a);
    assert_eq!(text, stdout(&b));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,q,trials,exists"));
    assert_eq!(lines.count(), 121);

    let s = Scratch::new("sweep");
    let path = s.path("sweep.csv");
    let c = matchkit(&["sweep", "--grid", "11", "--trials", "6", "--seed", "5", "--out", &path]);
    assert_eq!(code(&c), EXIT_OK);
    assert_eq!(std::fs::read_to_string(Path::new(&path)).unwrap(), text);
}

#[test]
fn counterexample_defeats_both_matchings() {
    let s = Scratch::new("counter");
    let path = s.path("counter.json");
    let out = matchkit(&["counterexample", "--p", "0.2", "--q", "0.6", "--out", &path]);
    assert_eq!(code(&out), EXIT_OK);
    for m in [r#"{"assignment": [0, 1]}"#, r#"{"assignment": [1, 0]}"#] {
        let mpath = s.file("m.json", m);
        let out = matchkit(&["check", "--instance", &path, "--matching", &mpath, "--p", "0.2", "--q", "0.6"]);
        assert_eq!(code(&out), EXIT_UNSTABLE, "{m}");
    }
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let a = matchkit(&["gen", "--n", "3", "--seed", "42", "--dist", "int:0:9"]);
    let b = matchkit(&["gen", "--n", "3", "--seed", "42", "--dist", "int:0:9"]);
    assert_eq!(code(&a), EXIT_OK);
    assert_eq!(stdout(&a), stdout(&b));
    let inst = matchkit::Instance::from_json(&stdout(&a)).unwrap();
    assert_eq!(inst.n(), 3);
    assert!(inst.theta_m().values().iter().all(|x| x.fract() == 0.0 && (0.0..=9.0).contains(x)));
}

#[test]
fn core_membership_by_model() {
    let s = Scratch::new("core");
    let inst = s.file("boxed.json", BOXED);
    let id = s.file("id.json", r#"{"assignment": [0, 1]}"#);
    let swap = s.file("swap.json", r#"{"assignment": [1, 0]}"#);
    let run = |model: &str, m: &str| code(&matchkit(&["core", "--model", model, "--instance", &inst, "--matching", m]));
    assert_eq!(run("fnt", &id), EXIT_OK);
    assert_eq!(run("ft", &id), EXIT_UNSTABLE);
    assert_eq!(run("ft", &swap), EXIT_OK);
    assert_eq!(run("ft_nonneg", &swap), EXIT_OK);
    assert_eq!(run("ft_m2w", &swap), EXIT_OK);
}
