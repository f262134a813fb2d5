use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn shex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shex")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn temp_file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_multi_prints_the_maximal_typing() {
    let (s1, g2) = (fixture("s1.shex"), fixture("g2.tsv"));
    let o = shex(&["validate", "--schema", &s1, "--graph", &g2, "--format", "machine", "--emit-typing"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "TYPED\tn0\tt0\nTYPED\tn1\tt1,t2\nTYPED\tn2\tt3\n");
}

#[test]
fn validate_single_brute_rejects_g2() {
    let (s1, g2) = (fixture("s1.shex"), fixture("g2.tsv"));
    let o = shex(&["validate", "--schema", &s1, "--graph", &g2, "--mode", "single", "--algo", "brute"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn flood_needs_pretyping_without_top() {
    let (s1, g2) = (fixture("s1.shex"), fixture("g2.tsv"));
    let o = shex(&["validate", "--schema", &s1, "--graph", &g2, "--algo", "flood"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("pre-typing"));
}

#[test]
fn flood_with_pretyping() {
    let (s, g, p) = (fixture("bugs.shex"), fixture("bugs.tsv"), fixture("bugs.pretyping"));
    let o = shex(&["validate", "--schema", &s, "--graph", &g, "--algo", "flood", "--pretyping", &p]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn check_reports_classes() {
    let o = shex(&["check", "--schema", &fixture("bugs.shex"), "--unambiguity", "--sat"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("TYPE\tUser\tdeterministic=true\tsorbe=true\trbe0=true\tunambiguous=true\tsatisfiable=true"));
    assert!(out.contains("SCHEMA\tdeterministic=true\tsorbe=true"));

    let o = shex(&["check", "--schema", &fixture("bugs_nondet.shex")]);
    assert!(stdout(&o).contains("NONDETERMINISTIC\tBugReport\treportedBy"));

    let dir = tempfile::tempdir().unwrap();
    let bad = temp_file(&dir, "bad.shex", "t -> a::t & b::t\n");
    assert_eq!(code(&shex(&["check", "--schema", &bad])), 2);
}

#[test]
fn find_types() {
    let o = shex(&["find-types", "--schema", &fixture("s1.shex"), "--graph", &fixture("g2.tsv")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("TYPED\t")).count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let stray = temp_file(&dir, "stray.tsv", "x\ta\ty\n");
    let o = shex(&["find-types", "--schema", &fixture("s1.shex"), "--graph", &stray]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("UNTYPED\tx"));

    let empty = temp_file(&dir, "empty.tsv", "");
    let o = shex(&["find-types", "--schema", &fixture("s1.shex"), "--graph", &empty]);
    assert_eq!((code(&o), stdout(&o)), (0, String::new()));
}

#[test]
fn gen_is_deterministic_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let s = fixture("bugs.shex");
    let run = |out: &str, roots: &str| {
        let g = dir.path().join(out).to_string_lossy().into_owned();
        let r = dir.path().join(roots).to_string_lossy().into_owned();
        assert_eq!(code(&shex(&["gen", "--schema", &s, "--nodes", "200", "--seed", "9", "--out", &g, "--roots", &r])), 0);
        (g, r)
    };
    let (g1, r1) = run("a.tsv", "a.roots");
    let (g2, _) = run("b.tsv", "b.roots");
    assert_eq!(std::fs::read(&g1).unwrap(), std::fs::read(&g2).unwrap());
    for algo in ["refine", "s-refine"] {
        assert_eq!(code(&shex(&["validate", "--schema", &s, "--graph", &g1, "--algo", algo])), 0);
    }
    let flood = shex(&["validate", "--schema", &s, "--graph", &g1, "--algo", "flood", "--pretyping", &r1]);
    assert_eq!(code(&flood), 0);

    let bad = shex(&["gen", "--schema", &s, "--nodes", "5", "--seed", "1", "--plus", "0..3"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn bench_emits_csv() {
    let s = fixture("bugs.shex");
    let o = shex(&["bench", "--schema", &s, "--sizes", "100,200", "--algos", "flood,refine", "--repeats", "2", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("algo,n_nodes,n_triples,seed,millis"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn rbe_queries() {
    let o = shex(&["rbe", "member", "--expr", "a[2;3], b?", "--bag", "a,a,b"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("member\ttrue"));
    assert_eq!(code(&shex(&["rbe", "member", "--expr", "a[2;3], b?", "--bag", "a"])), 1);

    assert_eq!(code(&shex(&["rbe", "sat", "--expr", "a & b"])), 1);
    assert_eq!(code(&shex(&["rbe", "sat", "--expr", "(a, a+) & (a, a?, a?)"])), 0);

    for method in ["auto", "flow", "enumerate", "ilp"] {
        let o = shex(&["rbe", "inter1", "--rbe1", "(a | b), (a | c)", "--expr", "a[2;2]", "--method", method]);
        assert_eq!(code(&o), 0, "{method}");
        let o = shex(&["rbe", "inter1", "--rbe1", "(a | b), c", "--expr", "a[2;2]", "--method", method]);
        assert_eq!(code(&o), 1, "{method}");
    }
    assert_eq!(code(&shex(&["rbe", "inter1", "--rbe1", "a*", "--expr", "a"])), 2);

    assert_eq!(code(&shex(&["rbe", "unambiguous", "--expr", "a::t | a::u"])), 1);
    assert_eq!(code(&shex(&["rbe", "unambiguous", "--expr", "a::t | b::u"])), 0);
    assert_eq!(code(&shex(&["rbe", "unambiguous", "--expr", "a | b"])), 2);
}
