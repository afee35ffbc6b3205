use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const S8: &str = "\
8
2 1 4 3 6 5 8 7
2 1 6 7 8 3 4 5
5 6 1 3 4 7 8 2
3 8 6 2 4 7 1 5
7 4 8 2 6 5 1 3
7 4 1 5 8 3 6 2
3 8 4 5 1 2 6 7
5 6 8 7 1 2 4 3
";

const TRIVIAL3: &str = "3\n1 2 3\n1 2 3\n1 2 3\n";

fn ybe(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ybe"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().expect("stdin is piped");
    pipe.write_all(stdin.unwrap_or("").as_bytes()).expect("write stdin");
    drop(pipe);
    child.wait_with_output().expect("binary exits")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn cable_then_tpartition_through_a_pipe() {
    let dir = TempDir::new().unwrap();
    let s8 = write(&dir, "s8.sol", S8);
    let cabled = ybe(&["cable", "-k", "3", &s8], None);
    assert_eq!(status(&cabled), 0);
    let t = ybe(&["tpartition", "-"], Some(&stdout(&cabled)));
    assert_eq!(status(&t), 0);
    assert_eq!(stdout(&t), "2 2 2 2\n");
}

#[test]
fn cable_writes_to_a_file() {
    let dir = TempDir::new().unwrap();
    let s8 = write(&dir, "s8.sol", S8);
    let out = dir.path().join("c3.sol");
    assert_eq!(status(&ybe(&["cable", "-k", "3", &s8, "-o", out.to_str().unwrap()], None)), 0);
    let dec = ybe(&["decomposable", out.to_str().unwrap()], None);
    assert_eq!(stdout(&dec), "indecomposable\n");
}

#[test]
fn dehornoy_of_trivial() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "trivial3.sol", TRIVIAL3);
    let out = ybe(&["dehornoy", &f], None);
    assert_eq!(status(&out), 0);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn s8_queries() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s8.sol", S8);
    assert_eq!(stdout(&ybe(&["check", &f], None)), "valid solution of size 8\n");
    assert_eq!(stdout(&ybe(&["tpartition", &f], None)), "6 2\n");
    assert_eq!(stdout(&ybe(&["orbits", &f], None)), "1 2 3 4 5 6 7 8\n");
    assert_eq!(stdout(&ybe(&["primitive", &f], None)), "imprimitive\n");
    assert_eq!(stdout(&ybe(&["iso", &f, &f], None)), "()\n");
    let blocks = stdout(&ybe(&["blocks", &f], None));
    assert!(blocks.lines().count() >= 1 && !blocks.contains("none"), "{blocks}");
}

#[test]
fn iso_against_cable_is_none() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s8.sol", S8);
    let c = dir.path().join("c3.sol");
    ybe(&["cable", "-k", "3", &f, "-o", c.to_str().unwrap()], None);
    let out = ybe(&["iso", &f, c.to_str().unwrap()], None);
    assert_eq!(status(&out), 0);
    assert_eq!(stdout(&out), "none\n");
}

#[test]
fn retract_output_parses() {
    let dir = TempDir::new().unwrap();
    // the 3-cycle shift on {1, 2, 3} next to the fixed point 4
    let f = write(&dir, "z3-plus-1.sol", "4\n2 3 1 4\n2 3 1 4\n2 3 1 4\n1 2 3 4\n");
    let out = stdout(&ybe(&["retract", &f], None));
    assert!(out.starts_with("# class of each point: 1 1 1 2\n"), "{out}");
    assert_eq!(stdout(&ybe(&["check", "-"], Some(&out))), "valid solution of size 2\n");
}

#[test]
fn enumerate_four_gives_23_records() {
    let out = ybe(&["enumerate", "-n", "4"], None);
    assert_eq!(status(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.split("\n\n").count(), 23);
    assert_eq!(text, stdout(&ybe(&["enumerate", "-n", "4"], None)));
}

#[test]
fn enumerate_filters_and_directory_output() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("out");
    let out = ybe(&["enumerate", "-n", "4", "--indecomposable", "-o", target.to_str().unwrap()], None);
    assert_eq!(status(&out), 0);
    assert_eq!(fs::read_dir(&target).unwrap().count(), 5);
    let sq = stdout(&ybe(&["enumerate", "-n", "4", "--square-free", "--tpartition", "1 1 1 1"], None));
    assert!(!sq.is_empty());
    assert!(sq.split("\n\n").all(|r| r
        .lines()
        .skip(1)
        .enumerate()
        .all(|(x, row)| { row.split(' ').nth(x) == Some(&(x + 1).to_string()) })));
}

#[test]
fn verify_directory_corpus() {
    let dir = TempDir::new().unwrap();
    write(&dir, "t3.sol", TRIVIAL3);
    let json = dir.path().join("report.json");
    let out = ybe(&["verify", "--corpus", dir.path().to_str().unwrap(), "--json", json.to_str().unwrap()], None);
    assert_eq!(status(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).ends_with("all checks clean\n"));
    assert!(fs::read_to_string(&json).unwrap().contains("\"theorem_id\": \"cms\""));
}

#[test]
fn verify_reports_violations_with_status_one() {
    // the size-8 fixture violates the literal diagonal-tau identity
    let out = ybe(&["verify", "--fixtures"], None);
    assert_eq!(status(&out), 1);
    assert!(stdout(&out).contains("diagonal-tau-identity "));
}

#[test]
fn empty_corpus_is_clean_with_a_warning() {
    let dir = TempDir::new().unwrap();
    let out = ybe(&["verify", "--corpus", dir.path().to_str().unwrap()], None);
    assert_eq!(status(&out), 0);
    assert!(stdout(&out).contains("warning: empty corpus"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(status(&ybe(&["bogus"], None)), 2);
    assert_eq!(status(&ybe(&[], None)), 2);
    assert_eq!(status(&ybe(&["cable", "-"], None)), 2);
    assert_eq!(status(&ybe(&["tpartition", "-"], Some("x\n"))), 2);
    assert_eq!(status(&ybe(&["tpartition", "/nonexistent/file.sol"], None)), 2);
    assert_eq!(status(&ybe(&["enumerate", "-n", "9"], None)), 2);
    assert_eq!(status(&ybe(&["verify", "--corpus", "/nonexistent"], None)), 2);
    assert_eq!(status(&ybe(&["primitive", "-"], Some(TRIVIAL3))), 2);
    let err = ybe(&["tpartition", "-"], Some("3\n1 2 3\n1 2 3\n1 2 2\n"));
    assert_eq!(status(&err), 2);
    assert!(String::from_utf8_lossy(&err.stderr).contains("line 4: row 3 is not a bijection"));
}

#[test]
fn check_reports_invalid_solutions_with_status_one() {
    let out = ybe(&["check", "-"], Some("3\n1 2 3\n1 2 3\n1 2 2\n"));
    assert_eq!(status(&out), 1);
    assert_eq!(stdout(&out), "invalid: line 4: row 3 is not a bijection\n");
}

#[test]
fn help_exits_zero() {
    let out = ybe(&["--help"], None);
    assert_eq!(status(&out), 0);
    assert!(Path::new(env!("CARGO_BIN_EXE_ybe")).exists());
}
