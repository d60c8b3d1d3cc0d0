use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const K4: &str = "\
structure K4
size 4
signature rel E/2
rel E: (0,1); (1,0); (0,2); (2,0); (0,3); (3,0); (1,2); (2,1); (1,3); (3,1); (2,3); (3,2)
";

const PAIR: &str = "\
structure pair
size 2
signature rel E/2
rel E: (0,1); (1,0)
";

const NET_B: &str = "\
structure relay
size 6
signature rel P/1; rel Q/1; rel T1/2; rel T2/3; rel T3/4; const C; const D
rel P: (0); (1); (2); (3)
rel Q: (4)
rel T1: (1,0)
rel T2: (0,3,4)
rel T3: (0,1,4,5)
const C = 0
const D = 3
";

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.sch"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn schemata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schemata"))
        .args(args)
        .env_remove("SCHEMATA_LIMITS")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_reports_verdicts_through_the_exit_code() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.st", K4);
    let out = schemata(&["run", s(&fixture("cub")), s(&k4)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: accepted"));
    assert!(stdout(&out).contains("invariance: invariant (12 pairs)"));
    let out = schemata(&["run", s(&fixture("reject_all")), s(&k4)]);
    assert_eq!(code(&out), 1);
}

#[test]
fn budgets_come_from_flags_and_environment() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.st", K4);
    let out = schemata(&["run", s(&fixture("cub")), s(&k4), "--max-states", "10"]);
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_schemata"))
        .args(["run", s(&fixture("cub")), s(&k4)])
        .env("SCHEMATA_LIMITS", "max_states=10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_schemata"))
        .args(["run", s(&fixture("cub")), s(&k4), "--max-states", "5000000"])
        .env("SCHEMATA_LIMITS", "max_states=10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn witness_is_printed_on_request() {
    let dir = TempDir::new().unwrap();
    let pair = write(&dir, "pair.st", PAIR);
    let out = schemata(&["run", s(&fixture("has_edge")), s(&pair), "--witness"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("witness (0 = 0, max = 1):"));
}

#[test]
fn dependence_on_zero_and_max_is_undecided() {
    let dir = TempDir::new().unwrap();
    let p3 = write(
        &dir,
        "p3.st",
        "structure p3\nsize 3\nsignature rel E/2\nrel E: (0,1); (1,0); (1,2); (2,1)\n",
    );
    let out = schemata(&["run", s(&fixture("edge_zero_max")), s(&p3)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("invariance:"));
}

#[test]
fn passed_arrays_are_opt_in() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.st", K4);
    let scheme = fixture("even_size_p");
    assert_eq!(code(&schemata(&["run", s(&scheme), s(&k4)])), 3);
    let out = schemata(&["run", s(&scheme), s(&k4), "--semantics", "passed-arrays"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn successor_schemes_take_an_ordering() {
    let dir = TempDir::new().unwrap();
    let k4 = write(&dir, "k4.st", K4);
    let order = write(&dir, "order", "3 1 0 2\n");
    let out = schemata(&[
        "run",
        s(&fixture("succ_size3")),
        s(&k4),
        "--succ",
        s(&order),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("ordering: [3, 1, 0, 2]"));
}

#[test]
fn translate_writes_a_net_that_solve_accepts() {
    let dir = TempDir::new().unwrap();
    let pair = write(&dir, "pair.st", PAIR);
    let net = dir.path().join("net.st");
    let out = schemata(&[
        "translate",
        s(&fixture("accept_all")),
        s(&pair),
        "-o",
        s(&net),
        "--verify",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("translated: 10 places"));
    assert!(stdout(&out).contains("0 mismatches"));
    let out = schemata(&["lint", s(&net), "--as", "omega-b"]);
    assert_eq!(code(&out), 0);
    let out = schemata(&["solve", s(&net), "--problem", "omega-b", "--oracle"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: accepted"));
}

#[test]
fn translate_refuses_nested_tests() {
    let dir = TempDir::new().unwrap();
    let d = write(
        &dir,
        "d.st",
        "structure d\nsize 2\nsignature rel E/2; const C\nrel E: (0,1)\nconst C = 0\n",
    );
    assert_eq!(
        code(&schemata(&["translate", s(&fixture("prop14")), s(&d)])),
        3
    );
}

#[test]
fn solve_and_dot() {
    let dir = TempDir::new().unwrap();
    let net = write(&dir, "net.st", NET_B);
    let out = schemata(&["solve", s(&net), "--problem", "omega-b", "--oracle"]);
    assert_eq!(code(&out), 0);
    let out = schemata(&["solve", s(&net), "--problem", "omega-a"]);
    assert_eq!(code(&out), 3);
    let pair = write(&dir, "pair.st", PAIR);
    let out = schemata(&["translate", s(&fixture("accept_all")), s(&pair), "--dot"]);
    assert!(stdout(&out).starts_with("digraph"));
}

#[test]
fn fmt_checks_canonical_form() {
    let dir = TempDir::new().unwrap();
    let messy = write(&dir, "m.sch", "input(x)   x:=max\noutput(x)");
    let out = schemata(&["fmt", s(&messy)]);
    assert_eq!(code(&out), 0);
    let canonical = write(&dir, "c.sch", &stdout(&out));
    assert_eq!(code(&schemata(&["fmt", s(&canonical), "--check"])), 0);
    assert_eq!(code(&schemata(&["fmt", s(&messy), "--check"])), 1);
}

#[test]
fn fuzz_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.txt");
    let args = [
        "fuzz",
        "--seed",
        "3",
        "--suite",
        "translate",
        "--count",
        "20",
    ];
    let a = schemata(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["-o", s(&report)]);
    let b = schemata(&with_file);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(fs::read(&report).unwrap(), a.stdout);
    assert_eq!(code(&schemata(&["fuzz", "--suite", "nope"])), 3);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&schemata(&["frobnicate"])), 3);
    assert_eq!(
        code(&schemata(&["run", "/nonexistent.sch", "/nonexistent.st"])),
        3
    );
    assert_eq!(
        code(&schemata(&["--threads", "0", "fuzz", "--count", "1"])),
        3
    );
}
