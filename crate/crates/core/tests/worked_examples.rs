//! The running lucy/tom examples: translation, satisfaction and
//! homomorphisms.

use n3ex::chase::{find_hom, is_satisfied, GroundAtom, GroundTerm, Instance};
use n3ex::pnf::to_pnf;
use n3ex::translate::translate_set;
use n3ex::{parse_n3, parse_rules, Constant, ExRule, RuleSet};

const FACT: &str = ":lucy :knows :tom.";
const BLANK: &str = ":lucy :knows _:x.";
const KNOWN_BY_LUCY: &str = "{:lucy :knows ?x}=>{?x :knows :lucy}.";
const KNOWS_A_TOM: &str = "{?x :knows :tom}=>{?x :knows _:y. _:y :name \"Tom\"}.";
const CAKE: &str = ":lucy :knows _:y. _:y :likes :cake.";

fn rules_of(n3: &str) -> RuleSet {
    translate_set(&to_pnf(&parse_n3(n3).unwrap())).unwrap()
}

fn rule(erl: &str) -> ExRule {
    parse_rules(erl).unwrap().rules()[0].clone()
}

fn assert_translates(n3: &str, expected: &[&str]) {
    let got = rules_of(n3);
    let want = RuleSet::new(expected.iter().map(|e| rule(e)).collect()).unwrap();
    assert!(got.equivalent_modulo_renaming(&want), "{n3}\n got: {got}\nwant: {want}");
}

#[test]
fn fact_becomes_body_less_ground_rule() {
    assert_translates(FACT, &["-> tr(:lucy, :knows, :tom) ."]);
}

#[test]
fn blank_node_becomes_existential() {
    assert_translates(BLANK, &["-> tr(:lucy, :knows, !x) ."]);
}

#[test]
fn universal_rule_is_datalog() {
    assert_translates(KNOWN_BY_LUCY, &["tr(:lucy, :knows, ?x) -> tr(?x, :knows, :lucy) ."]);
}

#[test]
fn head_blank_node_is_existential() {
    assert_translates(
        KNOWS_A_TOM,
        &["tr(?x, :knows, :tom) -> tr(?x, :knows, !y), tr(!y, :name, \"Tom\") ."],
    );
}

#[test]
fn blank_node_labels_are_scoped() {
    // the _:y of the rule head and the top-level _:y are different variables
    let doc = format!("{KNOWS_A_TOM}\n{CAKE}");
    assert_translates(
        &doc,
        &[
            "tr(?x, :knows, :tom) -> tr(?x, :knows, !y), tr(!y, :name, \"Tom\") .",
            "-> tr(:lucy, :knows, !y), tr(!y, :likes, :cake) .",
        ],
    );
}

#[test]
fn body_blank_nodes_become_universals() {
    assert_translates(
        "{_:x :knows :tom}=>{:tom :is :known}.",
        &["tr(?v, :knows, :tom) -> tr(:tom, :is, :known) ."],
    );
}

fn tr(s: GroundTerm, p: &str, o: GroundTerm) -> GroundAtom {
    GroundAtom::new("tr", vec![s, GroundTerm::Constant(Constant::example(p)), o])
}

fn c(l: &str) -> GroundTerm {
    GroundTerm::Constant(Constant::example(l))
}

fn tom_literal() -> GroundTerm {
    GroundTerm::Constant(Constant::literal("Tom"))
}

fn i1() -> Instance {
    Instance::from_ground_atoms(&[tr(c("lucy"), "knows", c("tom")), tr(c("tom"), "knows", c("lucy"))]).unwrap()
}

fn k1() -> Instance {
    Instance::from_ground_atoms(&[tr(c("lucy"), "knows", c("tom"))]).unwrap()
}

fn i2() -> Instance {
    Instance::from_ground_atoms(&[tr(c("lucy"), "knows", c("tom")), tr(c("tom"), "name", tom_literal())]).unwrap()
}

fn i3() -> Instance {
    let mut i = k1();
    let n = GroundTerm::Null(i.fresh_null());
    i.insert(&tr(c("lucy"), "knows", n.clone())).unwrap();
    i.insert(&tr(n, "name", tom_literal())).unwrap();
    i
}

#[test]
fn satisfaction_of_the_datalog_rule() {
    let r = &rules_of(KNOWN_BY_LUCY).rules()[0].clone();
    assert!(is_satisfied(r, &i1()));
    assert!(!is_satisfied(r, &k1()));
}

#[test]
fn satisfaction_of_the_existential_rule() {
    let r = &rules_of(KNOWS_A_TOM).rules()[0].clone();
    assert!(is_satisfied(r, &i3()));
    assert!(is_satisfied(r, &i2()));
    assert!(!is_satisfied(r, &k1()));
}

#[test]
fn null_maps_to_tom() {
    let i3 = i3();
    let h = find_hom(&i3, &i2()).expect("I3 maps into I2");
    let (null, image) = h.nulls().next().unwrap();
    assert_eq!(h.nulls().count(), 1);
    assert_eq!(
        i3.sorted_atoms()
            .iter()
            .filter(|a| a.args.contains(&GroundTerm::Null(*null)))
            .count(),
        2
    );
    assert_eq!(image, &c("tom"));
    assert!(find_hom(&i2(), &i3).is_none());
}
