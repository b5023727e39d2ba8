//! End-to-end runs of the `n3ex` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const KNOWS_A_TOM: &str = "{?x :knows :tom}=>{?x :knows _:y. _:y :name \"Tom\"}.\n";

fn n3ex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_n3ex")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn report(o: &Output) -> serde_json::Value {
    let err = stderr(o);
    serde_json::from_str(&err[err.find('{').unwrap()..=err.rfind('}').unwrap()]).unwrap()
}

#[test]
fn translate_worked_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "exq.n3", KNOWS_A_TOM);
    let out = n3ex(&["translate", "--to", "rules", s(&f)]);
    assert!(out.status.success());
    let got = n3ex::parse_rules(&stdout(&out)).unwrap();
    let want = n3ex::parse_rules("tr(?x, :knows, :tom) -> tr(?x, :knows, !y), tr(!y, :name, \"Tom\") .").unwrap();
    assert!(got.equivalent_modulo_renaming(&want), "{got}");
}

#[test]
fn empty_document_gives_no_rules() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "empty.n3", "");
    let out = n3ex(&["translate", "--to", "rules", s(&f)]);
    assert!(out.status.success());
    assert!(n3ex::parse_rules(&stdout(&out)).unwrap().is_empty());
}

#[test]
fn facts_split_for_deep_taxonomy() {
    let dir = TempDir::new().unwrap();
    let dt = n3ex(&["gen", "dt", "--depth", "3"]);
    let f = write(&dir, "dt3.n3", &stdout(&dt));
    let facts = dir.path().join("facts.erl");
    let out = n3ex(&["translate", "--to", "rules", s(&f), "--facts-split", s(&facts)]);
    assert!(out.status.success());
    let rules = n3ex::parse_rules(&stdout(&out)).unwrap();
    let facts = n3ex::parse_rules(&std::fs::read_to_string(facts).unwrap()).unwrap();
    assert_eq!(rules.len(), 9);
    assert_eq!(facts.len(), 1);
    assert!(facts.rules()[0].is_fact());
}

#[test]
fn rules_back_to_n3() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.erl", "Student(?x) -> Person(?x) .\nknows(:lucy, :tom) .\n");
    let out = n3ex(&["translate", "--to", "n3", s(&f)]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("{ ?x a :Student . } => { ?x a :Person . } ."), "{text}");
    assert!(text.contains(":lucy :knows :tom ."), "{text}");
}

#[test]
fn chase_deep_taxonomy_query() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("dt");
    assert!(n3ex(&["gen", "dt", "--depth", "3", "--out-dir", s(&out_dir)])
        .status
        .success());
    let out = n3ex(&[
        "chase",
        s(&out_dir.join("rules.n3")),
        "--facts",
        s(&out_dir.join("facts.n3")),
        "--query",
        ":i",
        "a",
        ":N3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains(":i a :N3 ."));
    let r = report(&out);
    assert_eq!(r["derived"], 9);
    assert_eq!(r["facts"], 1);
    assert_eq!(r["rules"], 9);
}

#[test]
fn chase_without_rules_echoes_facts() {
    let dir = TempDir::new().unwrap();
    let rules = write(&dir, "none.erl", "");
    let facts = write(&dir, "facts.erl", "p(:a) .\nq(:a, :b) .\n");
    let out = n3ex(&["chase", s(&rules), "--facts", s(&facts)]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2, "{text}");
    assert_eq!(report(&out)["derived"], 0);
}

#[test]
fn existential_rule_fires_once_with_shared_null() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "k1.n3", &format!(":lucy :knows :tom.\n{KNOWS_A_TOM}"));
    let out = n3ex(&["chase", s(&f), "--quiet"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains(":lucy :knows _:n0 ."), "{text}");
    assert!(text.contains("_:n0 :name \"Tom\" ."), "{text}");
    assert_eq!(text.matches("_:n").count(), 2, "{text}");
}

#[test]
fn csv_facts_use_the_file_name() {
    let dir = TempDir::new().unwrap();
    let rules = write(&dir, "r.erl", "knows(?x, ?y) -> knows(?y, ?x) .\n");
    let facts = write(&dir, "knows.csv", "lucy,tom\n");
    let tsv = write(&dir, "Person.tsv", "lucy\n");
    let out = n3ex(&[
        "chase",
        s(&rules),
        "--facts",
        s(&facts),
        "--facts",
        s(&tsv),
        "--format",
        "rules",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let ex = |l: &str| format!("<http://www.example.org#{l}>");
    assert!(
        text.contains(&format!("knows({}, {}) .", ex("tom"), ex("lucy"))),
        "{text}"
    );
    assert!(text.contains(&format!("Person({}) .", ex("lucy"))), "{text}");
}

#[test]
fn truncation_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "loop.erl", "p(:a) .\np(?x) -> e(?x, !y), p(!y) .\n");
    let out = n3ex(&["chase", s(&f), "--max-nulls", "10", "--quiet"]);
    assert_eq!(out.status.code(), Some(3));
    let out = n3ex(&["chase", s(&f), "--max-nulls", "10"]);
    assert_eq!(report(&out)["status"], "truncated");
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.n3", ":a :b .\n");
    let out = n3ex(&["parse", s(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("1:7"), "{}", stderr(&out));
    let f = write(&dir, "unsafe.n3", "{:a :b :c} => {?x :b :c}.\n");
    let out = n3ex(&["translate", "--to", "rules", s(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("?x"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(n3ex(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(n3ex(&["gen", "dt", "--depth", "0"]).status.code(), Some(1));
    assert_eq!(n3ex(&["chase", "missing.n3"]).status.code(), Some(1));
    assert_eq!(n3ex(&["--help"]).status.code(), Some(0));
}

#[test]
fn n3_equivalence_verdicts() {
    let dir = TempDir::new().unwrap();
    let fact = write(&dir, "fact.n3", ":lucy :knows :tom.\n");
    let blank = write(&dir, "blank.n3", ":lucy :knows _:x.\n");
    let out = n3ex(&["eq-n3", s(&fact), s(&blank)]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("not equivalent"), "{}", stdout(&out));

    let f = write(
        &dir,
        "f.n3",
        "{_:b :knows ?x}=>{?x :knows :lucy}.\n:a :p _:z. :b :q _:w.\n",
    );
    let pnf = n3ex(&["pnf", s(&f)]);
    let g = write(&dir, "g.n3", &stdout(&pnf));
    let out = n3ex(&["eq-n3", s(&f), s(&g)]);
    assert_eq!(stdout(&out).trim(), "equivalent");

    let out = n3ex(&["eq-n3", s(&f), s(&g), "--method", "enumerate"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).starts_with("inconclusive"));
}

#[test]
fn rule_equivalence_verdicts() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.erl", "p(?x) -> q(?x, !y), r(!y) .\n");
    let dup = write(
        &dir,
        "dup.erl",
        "p(?x) -> q(?x, !y), r(!y) .\np(?z) -> q(?z, !w), r(!w) .\n",
    );
    let weak = write(&dir, "weak.erl", "p(?x) -> q(?x, !y) .\n");
    let verdict = |args: &[&str]| stdout(&n3ex(args)).trim().to_string();
    assert_eq!(verdict(&["eq-rules", s(&a), s(&dup)]), "equivalent");
    assert_eq!(
        verdict(&["eq-rules", s(&a), s(&dup), "--mode", "universal"]),
        "equivalent"
    );
    assert_eq!(verdict(&["eq-rules", s(&a), s(&weak)]), "not equivalent");
    // comparing chase results on one database can miss the difference
    assert_eq!(
        verdict(&["eq-rules", s(&a), s(&weak), "--mode", "universal", "--critical"]),
        "equivalent"
    );
    let db = write(&dir, "db.erl", "p(:a) .\n");
    assert_eq!(
        verdict(&["eq-rules", s(&a), s(&weak), "--mode", "universal", "--database", s(&db)]),
        "not equivalent"
    );
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "k1.n3",
        &format!(":lucy :knows :tom. :bob :knows :tom.\n{KNOWS_A_TOM}"),
    );
    let runs: Vec<Vec<u8>> = (0..3).map(|_| n3ex(&["chase", s(&f), "--quiet"]).stdout).collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let lubm = dir.path().join("lubm");
    for _ in 0..2 {
        assert!(n3ex(&["gen", "lubm", "--facts", "500", "--out-dir", s(&lubm)])
            .status
            .success());
    }
    let rules = std::fs::read_to_string(lubm.join("rules.n3")).unwrap();
    assert!(n3ex::parse_n3(&rules).is_ok());
}

#[test]
fn bench_reports_phases() {
    let out = n3ex(&["bench", "--dataset", "lubm:2000"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["facts"], 2000);
    assert_eq!(r["status"], "complete");
    assert!(r["derived"].as_u64().unwrap() > 0);
    for phase in ["parse", "normalize", "translate", "reason"] {
        assert!(r["seconds"][phase].as_f64().unwrap() >= 0.0);
    }
    let out = n3ex(&["bench", "--dataset", "dt:10"]);
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((r["facts"].as_u64(), r["rules"].as_u64()), (Some(1), Some(31)));
}

#[test]
fn facts_as_rules_keeps_them_in_the_rule_set() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "k.n3",
        ":lucy :knows :tom.\n{:lucy :knows ?x}=>{?x :knows :lucy}.\n",
    );
    let split = report(&n3ex(&["chase", s(&f)]));
    let kept = report(&n3ex(&["chase", s(&f), "--facts-as-rules"]));
    assert_eq!((split["facts"].as_u64(), split["derived"].as_u64()), (Some(1), Some(1)));
    assert_eq!((kept["facts"].as_u64(), kept["derived"].as_u64()), (Some(0), Some(2)));
}
