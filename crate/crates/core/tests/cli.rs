use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use autgroups::presentations::{load_bundle, save_bundle};
use autgroups::relations::{convolve, RelationAutomaton};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autgroups")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn build_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["nat-add", "ep", "hp"] {
        let (a, b) = (tmp.path().join(format!("{name}-a")), tmp.path().join(format!("{name}-b")));
        for d in [&a, &b] {
            let o = run(&["build", name, "--p", "3", "--out", d.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(dir_contents(&a), dir_contents(&b));
        let ea = run(&["export", a.to_str().unwrap(), "Op"]);
        let eb = run(&["export", b.to_str().unwrap(), "Op"]);
        assert_eq!(ea.stdout, eb.stdout);
    }
}

#[test]
fn export_roundtrip_on_every_relation() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("hp");
    assert!(run(&["build", "hp", "--p", "3", "--out", dir.to_str().unwrap()]).status.success());
    let pres = load_bundle(&dir).unwrap();
    for (name, rel) in pres.relations() {
        let file = tmp.path().join(format!("{name}.json"));
        let o = run(&["export", dir.to_str().unwrap(), name, "--out", file.to_str().unwrap()]);
        assert!(o.status.success());
        let back = RelationAutomaton::from_json(&fs::read_to_string(&file).unwrap(), pres.base()).unwrap();
        assert!(back.equivalent(rel).unwrap(), "{name}");
    }
    let dot = run(&["export", dir.to_str().unwrap(), "Op", "--format", "dot"]);
    let text = stdout(&dot);
    let states = pres.op().unwrap().dfa().state_count();
    assert_eq!(text.matches("shape=circle").count() + text.matches("shape=doublecircle").count(), states);
}

#[test]
fn decide_eval_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ep = tmp.path().join("ep");
    let ep = ep.to_str().unwrap();
    assert!(run(&["build", "ep", "--p", "3", "--out", ep]).status.success());
    let o = run(&["decide", ep, "(forall (x y) (exists z (and (Op x y z) (Op y x z))))"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "false"));
    let o = run(&["eval", ep, "001", "01"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "211"));
    assert_eq!(run(&["eval", ep, "010", "0"]).status.code(), Some(2));
    assert_eq!(run(&["decide", ep, "(Op x y z)"]).status.code(), Some(2));
    assert_eq!(run(&["decide", ep, "(Op x y"]).status.code(), Some(2));
    assert_eq!(run(&["build", "ep", "--p", "2", "--out", ep]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = run(&["crosscheck", ep, "--max-len", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("729 pairs"));
    let o = run(&["census", ep, "--max-len", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][4]["cumulative"], "81");
    assert_eq!(v["rows"][4]["demand"], "729");
    let nat = tmp.path().join("nat");
    assert!(run(&["build", "nat-add", "--out", nat.to_str().unwrap()]).status.success());
    let o = run(&["decide", nat.to_str().unwrap(), "(forall (x y) (exists z (and (Op x y z) (Op y x z))))"]);
    assert_eq!(stdout(&o), "true");
    let o = run(&["crosscheck", nat.to_str().unwrap(), "--max-len", "12", "--samples", "2000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn crosscheck_of_mutated_bundle_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("ep");
    assert!(run(&["build", "ep", "--p", "3", "--out", good.to_str().unwrap()]).status.success());
    let pres = load_bundle(&good).unwrap();
    let op = pres.op().unwrap();
    let packed = convolve(3, &[&[0, 1], &[0, 1], &[0, 2]]);
    let mut dfa = op.dfa().clone();
    let q = dfa.run(&packed[..1]);
    let sink = (0..dfa.state_count() as u32)
        .find(|&s| !dfa.is_accepting(s) && (0..dfa.alphabet().size() as u32).all(|a| dfa.next(s, a) == s))
        .unwrap();
    dfa.retarget(q, packed[1], sink).unwrap();
    let broken = pres.clone().with_relation("Op", RelationAutomaton::new(op.base().clone(), 3, dfa).unwrap()).unwrap();
    let bad = tmp.path().join("broken");
    save_bundle(&broken, &bad).unwrap();
    let o = run(&["crosscheck", bad.to_str().unwrap(), "--max-len", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL ep: 01 · 01"), "{}", stdout(&o));
}
