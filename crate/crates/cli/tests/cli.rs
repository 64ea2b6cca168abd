use std::io::Write;
use std::process::{Command, Output, Stdio};

fn kad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kad"))
        .args(args)
        .output()
        .expect("run kad")
}

fn kad_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_kad"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn kad");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn decide_exit_codes() {
    let o = kad(&["decide", "D(a);a", "a"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "valid\n"));
    let o = kad(&["decide", "a;b", "b;a", "--witness"]);
    assert_eq!(
        (code(&o), stdout(&o).as_str()),
        (1, "invalid\n{a:{b:{}!}}\n")
    );
    let o = kad(&["decide", "a*", "1 + a;a*"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "valid\n"));
    let o = kad(&["decide", "a;", "a"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = kad(&["decide", "--fragment", "cd1", "a*", "a"]);
    assert_eq!(code(&o), 2);
    let o = kad(&["decide", "A(a)", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn auto_and_full_agree() {
    let pairs = [
        ("D(a+b)", "D(a)+D(b)"),
        ("a;(b+c)", "a;b + a;c"),
        ("D(a)", "1"),
        ("D(a;b)", "D(a;D(b))"),
        ("a + b;D(a)", "b;D(a) + a + 0"),
        ("D(a);b", "b;D(a)"),
    ];
    for (s, t) in pairs {
        let auto = kad(&["decide", s, t, "--witness"]);
        let full = kad(&["decide", "--fragment", "full", s, t, "--witness"]);
        assert_eq!(code(&auto), code(&full), "{s} = {t}");
        assert_eq!(stdout(&auto), stdout(&full), "{s} = {t}");
    }
}

#[test]
fn metrics_go_to_stderr() {
    let o = kad(&["decide", "--metrics", "a*;a*", "a*"]);
    assert_eq!(stdout(&o), "valid\n");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("sat s-t"), "{err}");
}

#[test]
fn terms_from_stdin() {
    let o = kad_stdin(&["decide"], "D(a);a\n\na\n");
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "valid\n"));
    let o = kad_stdin(&["decide", "a;b"], "b;a\n");
    assert_eq!(code(&o), 1);
    let o = kad_stdin(&["decide"], "a\n");
    assert_eq!(code(&o), 2);
}

#[test]
fn normalize_outputs() {
    assert_eq!(stdout(&kad(&["normalize", "D(a)+1"])), "{}!\n");
    assert_eq!(stdout(&kad(&["normalize", "1"])), "{}!\n");
    let o = kad(&["normalize", "0"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, ""));
    assert_eq!(
        stdout(&kad(&["normalize", "D(a) + D(b)"])),
        "{a:{}}!\n{b:{}}!\n"
    );
    assert_eq!(code(&kad(&["normalize", "a*"])), 2);
    let o = kad(&["normalize", "--cap", "2", "a*"]);
    assert_eq!(stdout(&o), "{}!\n{a:{}!}\n{a:{a:{}!}}\n");
}

#[test]
fn meet_and_member() {
    assert_eq!(stdout(&kad(&["meet", "D(a)", "D(b)"])), "{a:{}, b:{}}!\n");
    assert_eq!(stdout(&kad(&["meet", "a", "b"])), "");
    assert_eq!(code(&kad(&["member", "{}!", "D(a)"])), 1);
    assert_eq!(code(&kad(&["member", "{a:{}}!", "D(a)"])), 0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tree");
    std::fs::write(&path, "{a:{b:{}!}}\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&kad(&["member", p, "a;b"])), 0);
    assert_eq!(code(&kad(&["member", p, "a;b;D(a)"])), 1);
    assert_eq!(code(&kad(&["member", "{a:{}!", "a"])), 2);
}

#[test]
fn refute_output() {
    let o = kad(&["refute", "a;b", "b;a", "--max-n", "2"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "vertices 2\na: 0 0\nb: 0 1\npair 0 1\n");
    let o = kad(&["refute", "D(a);a", "a"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, ""));
}

#[test]
fn dot_rendering() {
    let text = stdout(&kad(&["dot", "D(a;b)"]));
    assert_eq!(text.matches("shape=").count(), 3);
    assert!(text.contains("n0 [label=\"\", shape=doublecircle, style=filled]"));
    assert_eq!(text.matches("->").count(), 2);
    let tree = stdout(&kad(&["dot", "{a:{}!}"]));
    assert!(tree.contains("n1 [label=\"\", shape=circle, style=filled]"));
    let many = stdout(&kad(&["dot", "a + b"]));
    assert_eq!(many.matches("subgraph").count(), 2);
}

#[test]
fn selftest_passes() {
    let o = kad(&["selftest"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}
