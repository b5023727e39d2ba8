//! Randomized invariants. Proptest drives the seeds; the generators in
//! `support` build the inputs.

mod support;

use std::collections::BTreeSet;

use n3ex::chase::{
    chase, find_hom, hom_equivalent, is_model, ChaseConfig, GroundAtom, GroundTerm, Instance, NullId, Strategy,
};
use n3ex::model::EXAMPLE_NS;
use n3ex::oracle::{n3_equivalent_in, satisfies, FiniteInterpretation, Method, OracleConfig, Universe};
use n3ex::pnf::{is_normalized, split_pieces, to_pnf, Piece};
use n3ex::translate::{inverse_translate, translate_set};
use n3ex::{parse_n3, parse_rules, serialize_n3, serialize_rules, Constant, Formula, N3Term, Statement, Triple};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Writes a formula the way a person might: varying whitespace, comments,
/// full or prefixed IRIs, optional final dots inside formulae.
fn render(f: &Formula, rng: &mut impl Rng) -> String {
    let mut out = String::new();
    let space = |rng: &mut dyn rand::RngCore, out: &mut String| {
        out.push_str([" ", "\n", " \t ", " # note\n"][rng.random_range(0..4)]);
    };
    let term = |t: &N3Term, rng: &mut dyn rand::RngCore| match t {
        N3Term::Constant(Constant::Iri(iri)) => match iri.strip_prefix(EXAMPLE_NS) {
            Some(local) if rng.random_bool(0.5) => format!(":{local}"),
            _ => format!("<{iri}>"),
        },
        N3Term::Constant(c) => c.to_string(),
        N3Term::Existential(l) => format!("_:{l}"),
        N3Term::Universal(l) => format!("?{l}"),
    };
    let triples = |ts: &[Triple], rng: &mut dyn rand::RngCore, out: &mut String, braces: bool| {
        for (i, t) in ts.iter().enumerate() {
            for x in t.terms() {
                out.push_str(&term(x, rng));
                space(rng, out);
            }
            if !braces || i + 1 < ts.len() || rng.random_bool(0.5) {
                out.push('.');
                space(rng, out);
            }
        }
    };
    for s in f.statements() {
        match s {
            Statement::Atomic(t) => triples(std::slice::from_ref(t), rng, &mut out, false),
            Statement::Implication(r) => {
                out.push('{');
                triples(r.body.triples(), rng, &mut out, true);
                out.push_str("}=>{");
                triples(r.head.triples(), rng, &mut out, true);
                out.push_str("}.");
                space(rng, &mut out);
            }
        }
    }
    out
}

fn components_disjoint(pieces: &[Piece]) -> bool {
    let mut seen = BTreeSet::new();
    for p in pieces {
        if let Piece::Atomic(ts) = p {
            let vars: BTreeSet<&N3Term> = ts
                .iter()
                .flat_map(|t| t.terms())
                .filter(|x| x.is_existential())
                .collect();
            if vars.iter().any(|v| seen.contains(v)) {
                return false;
            }
            seen.extend(vars);
        }
    }
    true
}

fn small_universe() -> Universe {
    Universe::new([ex("a"), Constant::iri("urn:n3ex:spare:0")])
}

fn to_finite(m: &TripleSet, u: &Universe) -> FiniteInterpretation {
    let mut fi = FiniteInterpretation::empty(u.clone());
    for [s, p, o] in m {
        fi.insert(s, p, o).unwrap();
    }
    fi
}

/// Every map of `a`'s nulls into terms of `b`, checked atom by atom.
fn exhaustive_hom(a: &Instance, b: &Instance) -> bool {
    let atoms = a.sorted_atoms();
    let nulls: Vec<NullId> = atoms
        .iter()
        .flat_map(|x| x.args.iter())
        .filter_map(|t| match t {
            GroundTerm::Null(n) => Some(*n),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let targets: Vec<GroundTerm> = b
        .sorted_atoms()
        .iter()
        .flat_map(|x| x.args.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if nulls.is_empty() {
        return atoms.iter().all(|x| b.contains(x));
    }
    if targets.is_empty() {
        return false;
    }
    let mut idx = vec![0usize; nulls.len()];
    loop {
        let image = |t: &GroundTerm| match t {
            GroundTerm::Null(n) => targets[idx[nulls.iter().position(|m| m == n).unwrap()]].clone(),
            c => c.clone(),
        };
        if atoms
            .iter()
            .all(|x| b.contains(&GroundAtom::new(&x.predicate, x.args.iter().map(image).collect())))
        {
            return true;
        }
        let Some(k) = (0..idx.len()).rev().find(|&k| idx[k] + 1 < targets.len()) else {
            return false;
        };
        idx[k] += 1;
        idx[k + 1..].iter_mut().for_each(|i| *i = 0);
    }
}

fn random_instance(rng: &mut impl Rng, atoms: usize, nulls: u32) -> Instance {
    let term = |rng: &mut dyn rand::RngCore| {
        if nulls > 0 && rng.random_bool(0.5) {
            GroundTerm::Null(NullId(rng.random_range(0..nulls)))
        } else {
            GroundTerm::Constant(ex(["k0", "k1"][rng.random_range(0..2)]))
        }
    };
    let list: Vec<GroundAtom> = (0..atoms)
        .map(|_| {
            if rng.random_bool(0.3) {
                GroundAtom::new("p", vec![term(rng)])
            } else {
                GroundAtom::new("q", vec![term(rng), term(rng)])
            }
        })
        .collect();
    Instance::from_ground_atoms(&list).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_sentences_parse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_formula(&mut r, &Shape { max_rules: 3, max_triples: 7, ..Shape::default() });
        let text = render(&f, &mut r);
        let parsed = parse_n3(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(parsed, f);
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &Shape::default());
        prop_assert_eq!(parse_n3(&serialize_n3(&f)).unwrap(), f);
        let rules = random_rules(&mut rng(seed), 4, 3, true);
        prop_assert_eq!(parse_rules(&serialize_rules(&rules)).unwrap(), rules);
    }

    #[test]
    fn pnf_invariants(seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &Shape { max_rules: 3, max_triples: 8, ..Shape::default() });
        let pnf = to_pnf(&f);
        let total: usize = f.triples().count() + f.implications().map(|r| r.body.len() + r.head.len()).sum::<usize>();
        prop_assert_eq!(pnf.triple_count(), total);
        prop_assert_eq!(pnf.iter().filter(|p| p.is_rule()).count(), f.implications().count());
        let well_shaped = pnf.iter().all(|p| match p {
            Piece::Rule(r) => is_normalized(r),
            Piece::Atomic(ts) => split_pieces(&Formula::new(ts.iter().cloned().map(Statement::Atomic).collect())).len() == 1,
        });
        prop_assert!(well_shaped);
        prop_assert!(components_disjoint(pnf.pieces()));
        let again = to_pnf(&pnf.to_formula());
        prop_assert_eq!(again.len(), pnf.len());
        prop_assert!(again.to_formula().structurally_equivalent(&pnf.to_formula()));
    }

    #[test]
    fn inverse_translation_is_identity_up_to_renaming(seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &Shape { max_rules: 3, max_triples: 8, ..Shape::default() });
        let pnf = to_pnf(&f);
        let rules = translate_set(&pnf).unwrap();
        let back = inverse_translate(&rules).unwrap();
        prop_assert!(back.structurally_equivalent(&pnf.to_formula()));
        prop_assert!(translate_set(&to_pnf(&back)).unwrap().equivalent_modulo_renaming(&rules));
    }

    #[test]
    fn datalog_chase_matches_naive_saturation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rules = random_rules(&mut r, 5, 6, false);
        let facts = random_facts(&mut r, 5, 4, 12);
        let (inst, report) = chase(&rules, Instance::from_atoms(&facts).unwrap(), &ChaseConfig::default()).unwrap();
        prop_assert!(report.is_complete());
        let naive = naive_chase(&rules, &facts, 1000).unwrap();
        prop_assert_eq!(inst, naive.to_instance());
    }

    #[test]
    fn existential_chase_is_a_universal_model(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rules = random_rules(&mut r, 4, 4, true);
        let facts = random_facts(&mut r, 4, 3, 6);
        let cfg = ChaseConfig::with_limits(2_000, 500);
        let db = Instance::from_atoms(&facts).unwrap();
        let (restricted, rr) = chase(&rules, db.clone(), &cfg).unwrap();
        let (oblivious, ro) = chase(&rules, db, &ChaseConfig { strategy: Strategy::Oblivious, ..cfg }).unwrap();
        if rr.is_complete() {
            prop_assert!(is_model(&rules, &restricted));
            if let Some(naive) = naive_chase(&rules, &facts, 200) {
                prop_assert!(hom_equivalent(&restricted, &naive.to_instance()));
            }
            if ro.is_complete() {
                prop_assert!(is_model(&rules, &oblivious));
                prop_assert!(hom_equivalent(&restricted, &oblivious));
                prop_assert!(restricted.len() <= oblivious.len());
            }
        }
    }

    #[test]
    fn hom_search_matches_exhaustive_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_instance(&mut r, 4, 3);
        let b = random_instance(&mut r, 6, 2);
        let found = find_hom(&a, &b);
        prop_assert_eq!(found.is_some(), exhaustive_hom(&a, &b));
        if let Some(h) = found {
            for x in a.sorted_atoms() {
                let img = GroundAtom::new(&x.predicate, x.args.iter().map(|t| h.apply(t)).collect());
                prop_assert!(b.contains(&img));
            }
        }
    }

    #[test]
    fn satisfies_matches_reference(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = small_universe();
        let f = random_formula(&mut r, &Shape { constants: 1, ..Shape::default() });
        let m = random_interpretation(&mut r, u.constants(), 0.5);
        prop_assert_eq!(
            satisfies(&to_finite(&m, &u), &f).unwrap(),
            reference_satisfies(&m, u.constants(), &f)
        );
    }

    #[test]
    fn enumeration_and_solver_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = Shape { constants: 1, max_triples: 3, ..Shape::default() };
        let f = random_formula(&mut r, &shape);
        let g = random_formula(&mut r, &shape);
        let u = small_universe();
        let verdict = |method| {
            n3_equivalent_in(&f, &g, &u, &OracleConfig { method, ..OracleConfig::default() })
                .unwrap()
                .is_equivalent()
        };
        prop_assert_eq!(verdict(Method::Enumerate), verdict(Method::Symbolic));
        prop_assert!(n3_equivalent_in(&f, &f, &u, &OracleConfig::default()).unwrap().is_equivalent());
    }
}
