use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regrank::BoolMatrix;
use tempfile::TempDir;

fn regrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn complement_i3() -> String {
    BoolMatrix::identity(3).unwrap().complement().to_text()
}

#[test]
fn boolean_rank_of_complement_identity() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", &complement_i3());
    let o = regrank(&["rank", "--mode", "boolean", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
    let o = regrank(&["rank", "--mode", "real", s(&m)]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn gadget_discrepancy_line() {
    let o = regrank(&["gadget", "--ell", "1", "--check", "disc"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("1/4"), "{text}");
    assert!(text.contains("bound 2^-2"), "{text}");
    for check in ["unbiased", "lindsey"] {
        let o = regrank(&["gadget", "--ell", "3", "--check", check]);
        assert_eq!(stdout(&o).trim(), "true");
    }
}

#[test]
fn irregular_transform_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "2 2\n10\n10\n");
    let o = regrank(&["transform", s(&m)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "2 2\n1x\n01\n");
    assert_eq!(regrank(&["rank", "--mode", "binary", s(&m)]).status.code(), Some(2));
    assert_eq!(regrank(&["no-such-tool"]).status.code(), Some(2));
    let missing = dir.path().join("absent.txt");
    assert_eq!(regrank(&["rank", "--mode", "real", s(&missing)]).status.code(), Some(2));
}

#[test]
fn rank_certificate_round_trip() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", &complement_i3());
    for mode in ["binary", "boolean"] {
        let cert = dir.path().join(format!("{mode}.json"));
        let o = regrank(&["rank", "--mode", mode, s(&m), "--cert", s(&cert)]);
        assert_eq!(o.status.code(), Some(0));
        let v = regrank(&["verify", "--what", "rectangles", s(&m), s(&cert)]);
        assert_eq!(v.status.code(), Some(0));
        assert!(stdout(&v).ends_with("valid\n"));
    }
    // a certificate for a different matrix must be rejected with exit 1
    let other = write(&dir, "i3.txt", &BoolMatrix::identity(3).unwrap().to_text());
    let v = regrank(&["verify", "--what", "rectangles", s(&other), s(&dir.path().join("binary.json"))]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).ends_with("invalid\n"));
}

#[test]
fn compose_measures_and_lift_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "and.tt", "2\n0001\n");
    let dnf = dir.path().join("dnf.json");
    let o = regrank(&["boolfn", "measures", s(&f), "--dnf", s(&dnf)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "C1 2\nC0 1\nUC1 2\n");
    let m = dir.path().join("m.txt");
    let o = regrank(&["compose", "--f", s(&f), "--gadget", "gl", "--ell", "2", "-o", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
    let cert = dir.path().join("cert.json");
    let o = regrank(&["lift-partition", "--dnf", s(&dnf), "--gadget", "gl", "--ell", "2", "-o", s(&cert)]);
    assert_eq!(o.status.code(), Some(0));
    let v = regrank(&["verify", "--what", "rectangles", s(&m), s(&cert)]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn gen_transform_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m.txt");
    assert_eq!(regrank(&["gen", "--n", "4", "--d", "2", "--seed", "3", "-o", s(&m)]).status.code(), Some(0));
    let first = dir.path().join("t1.json");
    let second = dir.path().join("t2.json");
    assert_eq!(regrank(&["transform", s(&m), "-o", s(&first)]).status.code(), Some(0));
    assert_eq!(regrank(&["transform", s(&m), "-o", s(&second)]).status.code(), Some(0));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    let v = regrank(&["verify", "--what", "transform", s(&m), s(&first)]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(!stdout(&v).contains("FAIL"));
}

#[test]
fn graph_tools_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "k4.json", r#"{"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],"n":4}"#);
    let o = regrank(&["graph", "chi", s(&g)]);
    assert_eq!(stdout(&o).trim(), "4");
    let cert = dir.path().join("bp.json");
    let o = regrank(&["graph", "bp", s(&g), "--cert", s(&cert)]);
    assert_eq!(stdout(&o).trim(), "3");
    let v = regrank(&["verify", "--what", "covering", s(&g), s(&cert)]);
    assert_eq!(v.status.code(), Some(0));
    let bad = write(&dir, "bad.json", r#"{"t":1,"bicliques":[{"A":[0],"B":[1,2,3]}]}"#);
    assert_eq!(regrank(&["verify", "--what", "covering", s(&g), s(&bad)]).status.code(), Some(1));
}

#[test]
fn seeded_outputs_are_byte_identical() {
    let a = regrank(&["gen", "--n", "7", "--d", "3", "--seed", "11"]);
    let b = regrank(&["gen", "--n", "7", "--d", "3", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let m = BoolMatrix::parse(&stdout(&a)).unwrap();
    assert_eq!(m.is_regular().unwrap(), Some(3));
    let a = regrank(&["boolfn", "gap", "--n", "5", "--budget", "200", "--seed", "4"]);
    let b = regrank(&["boolfn", "gap", "--n", "5", "--budget", "200", "--seed", "4", "--parallel"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn entropy_tools() {
    let o = regrank(&["entropy", "fiber", "--ell", "1", "--z", "01"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("support 4\nmax probability 1/4\n"), "{text}");
    let o = regrank(&["entropy", "density", "--ell", "2", "--z", "1", "--delta", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = regrank(&["entropy", "uniformity", "--ell", "2", "--z", "10", "--blocks", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = regrank(&["entropy", "restrict", "--ell", "2", "--z", "10", "--delta", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(regrank(&["entropy", "density", "--ell", "2", "--z", "1", "--delta", "x"]).status.code(), Some(2));
}
