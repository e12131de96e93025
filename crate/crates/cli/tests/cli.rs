use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gforum::corpus::cut_proofs;
use gforum::proofs::{check, proof_from_json, proof_to_json};
use gforum::sequent::seq_eq;

fn gforum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gforum"))
        .args(args)
        .env_remove("GFORUM_DEPTH")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const MODUS_PONENS: &str =
    r#"{"psi": [], "gamma": ["a", "a -o b"], "focus": null, "lambda": ["b"]}"#;

#[test]
fn proof_from_prove_is_accepted_by_check() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", MODUS_PONENS);
    let out = dir.path().join("p.json");
    let o = gforum(&["prove", &s, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "proved");
    let o = gforum(&["check", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn corrupted_proof_is_rejected_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", MODUS_PONENS);
    let out = dir.path().join("p.json");
    assert_eq!(
        code(&gforum(&["prove", &s, "--out", out.to_str().unwrap()])),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        &text.replacen(r#""a""#, r#""c""#, 1),
    );
    let o = gforum(&["check", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("at /"), "{}", stdout(&o));
}

#[test]
fn exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let no = write(
        dir.path(),
        "no.json",
        r#"{"gamma": ["a"], "lambda": ["b"]}"#,
    );
    assert_eq!(code(&gforum(&["prove", &no])), 1);
    assert_eq!(code(&gforum(&["oracle", &no])), 1);
    let deep = write(
        dir.path(),
        "deep.json",
        r#"{"gamma": ["a", "a -o b", "b -o c"], "lambda": ["c"]}"#,
    );
    assert_eq!(code(&gforum(&["prove", &deep, "--depth", "1"])), 2);
    assert_eq!(code(&gforum(&["prove", &deep, "--depth", "3"])), 0);
    assert_eq!(code(&gforum(&["oracle", &deep, "--steps", "2"])), 2);
    assert_eq!(code(&gforum(&["oracle", &deep])), 0);
}

#[test]
fn depth_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let deep = write(
        dir.path(),
        "deep.json",
        r#"{"gamma": ["a", "a -o b", "b -o c"], "lambda": ["c"]}"#,
    );
    let run = |depth: &str| {
        Command::new(env!("CARGO_BIN_EXE_gforum"))
            .args(["prove", &deep])
            .env("GFORUM_DEPTH", depth)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1")), 2);
    assert_eq!(code(&run("3")), 0);
    assert_eq!(code(&run("three")), 3);
}

#[test]
fn usage_and_parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&gforum(&["frobnicate"])), 3);
    assert_eq!(code(&gforum(&["prove"])), 3);
    assert_eq!(code(&gforum(&["check", "/nonexistent/proof.json"])), 3);
    let f = write(dir.path(), "f.txt", "a -o (b");
    assert_eq!(code(&gforum(&["normalize", &f])), 3);
    let s = write(dir.path(), "s.json", r#"{"gamma": ["a &"]}"#);
    assert_eq!(code(&gforum(&["prove", &s])), 3);
    assert_eq!(code(&gforum(&["--help"])), 0);
}

#[test]
fn normalize_prints_goal_and_clause() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", "!a -o a");
    let o = gforum(&["normalize", &f]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "((a => bot) -o bot) -o a");
    assert!(String::from_utf8_lossy(&o.stderr).contains("head bot"));
    let o = gforum(&["normalize", &f, "--to", "clause"]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).trim().is_empty());
}

#[test]
fn cutelim_outputs_a_cut_free_proof() {
    let dir = tempfile::tempdir().unwrap();
    for (i, p) in cut_proofs(5, 4).iter().enumerate() {
        let f = write(
            dir.path(),
            &format!("cut{i}.json"),
            &proof_to_json(p).to_string(),
        );
        let o = gforum(&["cutelim", &f, "--log", "steps"]);
        assert_eq!(code(&o), 0);
        let q = proof_from_json(&stdout(&o)).unwrap();
        check(&q).unwrap();
        assert!(q.is_cut_free() && q.is_contraction_free());
        assert!(seq_eq(&q.conclusion, &p.conclusion));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn corpus_and_compare_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(
            code(&gforum(&["corpus", "gen", "--out", d.to_str().unwrap()])),
            0
        );
    }
    let names = |d: &Path| {
        let mut v: Vec<_> = fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        v.sort();
        v
    };
    assert_eq!(names(&a).len(), 200);
    for n in names(&a) {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap());
    }
    let o = gforum(&["compare", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("0 disagreements"));
}
