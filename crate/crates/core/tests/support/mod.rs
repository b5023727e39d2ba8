//! Test-only generators and reference implementations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use n3ex::chase::{GroundAtom, GroundTerm, Instance, NullId};
use n3ex::model::{Expression, Implication, Substitute, Substitution};
use n3ex::{Atom, Constant, ExRule, Formula, N3Term, RuleSet, RuleTerm, Statement, Triple, Variable};
use rand::Rng;

pub fn ex(local: &str) -> Constant {
    Constant::example(local)
}

/// Shape limits for random formulae.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub constants: usize,
    pub max_rules: usize,
    pub max_triples: usize,
    /// Allow variables in predicate position.
    pub variable_predicates: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            constants: 3,
            max_rules: 2,
            max_triples: 4,
            variable_predicates: true,
        }
    }
}

const CONSTANT_NAMES: [&str; 4] = ["a", "b", "c", "d"];
const BLANKS: [&str; 3] = ["x", "y", "z"];
const UNIVERSALS: [&str; 3] = ["u", "v", "w"];

fn constant(rng: &mut impl Rng, shape: &Shape) -> N3Term {
    N3Term::Constant(ex(CONSTANT_NAMES[rng.random_range(0..shape.constants)]))
}

fn term(rng: &mut impl Rng, shape: &Shape, blanks: bool, universals: &[N3Term]) -> N3Term {
    loop {
        match rng.random_range(0..3) {
            0 => return constant(rng, shape),
            1 if blanks => return N3Term::existential(BLANKS[rng.random_range(0..BLANKS.len())]),
            2 if !universals.is_empty() => return universals[rng.random_range(0..universals.len())].clone(),
            _ => {}
        }
    }
}

fn triple(rng: &mut impl Rng, shape: &Shape, blanks: bool, universals: &[N3Term]) -> Triple {
    let p = if shape.variable_predicates {
        term(rng, shape, blanks, universals)
    } else {
        constant(rng, shape)
    };
    Triple::new(
        term(rng, shape, blanks, universals),
        p,
        term(rng, shape, blanks, universals),
    )
}

/// A well-formed formula: top-level triples without universals, and
/// rules whose head universals all occur in the body.
pub fn random_formula(rng: &mut impl Rng, shape: &Shape) -> Formula {
    let rules = rng.random_range(0..=shape.max_rules.min(shape.max_triples / 2));
    let mut budget = shape.max_triples - 2 * rules;
    let mut statements = Vec::new();
    let all_universals: Vec<N3Term> = UNIVERSALS.iter().map(N3Term::universal).collect();
    for _ in 0..rules {
        let body_len = 1 + rng.random_range(0..=budget.min(1));
        budget -= body_len - 1;
        let head_len = 1 + rng.random_range(0..=budget.min(1));
        budget -= head_len - 1;
        let body: Vec<Triple> = (0..body_len)
            .map(|_| triple(rng, shape, true, &all_universals))
            .collect();
        let bound: Vec<N3Term> = body
            .iter()
            .flat_map(|t| t.terms())
            .filter(|t| t.is_universal())
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let head: Vec<Triple> = (0..head_len).map(|_| triple(rng, shape, true, &bound)).collect();
        statements.push(Statement::Implication(Implication::new(
            Expression::new(body).unwrap(),
            Expression::new(head).unwrap(),
        )));
    }
    let atomic = if statements.is_empty() {
        1 + rng.random_range(0..budget.max(1))
    } else {
        rng.random_range(0..=budget)
    };
    for _ in 0..atomic {
        statements.push(Statement::Atomic(triple(rng, shape, true, &[])));
    }
    // mix rules and triples
    for i in (1..statements.len()).rev() {
        statements.swap(i, rng.random_range(0..=i));
    }
    Formula::new(statements)
}

/// A finite interpretation as a plain triple set.
pub type TripleSet = BTreeSet<[Constant; 3]>;

pub fn random_interpretation(rng: &mut impl Rng, universe: &[Constant], density: f64) -> TripleSet {
    let mut m = TripleSet::new();
    for s in universe {
        for p in universe {
            for o in universe {
                if rng.random_bool(density) {
                    m.insert([s.clone(), p.clone(), o.clone()]);
                }
            }
        }
    }
    m
}

fn assignments(vars: &[N3Term], universe: &[Constant]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                universe.iter().map(move |c| {
                    let mut s = s.clone();
                    s.insert(v.clone(), N3Term::Constant(c.clone())).unwrap();
                    s
                })
            })
            .collect();
    }
    out
}

fn ground_triple_holds(m: &TripleSet, t: &Triple) -> bool {
    let c = t.terms().map(|x| x.as_constant().expect("ground").clone());
    m.contains(&c)
}

/// Satisfaction written clause by clause: a formula holds when some
/// assignment of its free blank nodes makes the instantiated formula hold;
/// an instantiated triple holds when it is in the interpretation; a
/// conjunction when every conjunct does; an implication when for every
/// assignment of its universals, the instantiated body implies the
/// instantiated head (both read as formulae).
pub fn reference_satisfies(m: &TripleSet, universe: &[Constant], f: &Formula) -> bool {
    let free: Vec<N3Term> = f.free_existentials().into_iter().collect();
    assignments(&free, universe)
        .iter()
        .any(|mu| holds_closed(m, universe, &f.substitute(mu)))
}

fn holds_closed(m: &TripleSet, universe: &[Constant], f: &Formula) -> bool {
    f.statements().iter().all(|s| match s {
        Statement::Atomic(t) => ground_triple_holds(m, t),
        Statement::Implication(r) => {
            let universals: Vec<N3Term> = r.universals().into_iter().collect();
            assignments(&universals, universe).iter().all(|sigma| {
                let as_formula = |e: &Expression| {
                    Formula::new(
                        e.substitute(sigma)
                            .triples()
                            .iter()
                            .cloned()
                            .map(Statement::Atomic)
                            .collect(),
                    )
                };
                !reference_satisfies(m, universe, &as_formula(&r.body))
                    || reference_satisfies(m, universe, &as_formula(&r.head))
            })
        }
    })
}

/// Ground term of the naive chase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gt {
    C(Constant),
    N(u32),
}

pub type NaiveAtom = (String, Vec<Gt>);

#[derive(Debug, Default, Clone)]
pub struct NaiveInstance {
    by_pred: BTreeMap<String, Vec<Vec<Gt>>>,
    all: BTreeSet<NaiveAtom>,
    nulls: u32,
}

impl NaiveInstance {
    pub fn insert(&mut self, a: NaiveAtom) -> bool {
        if self.all.insert(a.clone()) {
            self.by_pred.entry(a.0).or_default().push(a.1);
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn atoms(&self) -> &BTreeSet<NaiveAtom> {
        &self.all
    }

    pub fn count_of(&self, pred: &str) -> usize {
        self.by_pred.get(pred).map_or(0, Vec::len)
    }

    pub fn to_instance(&self) -> Instance {
        let atoms: Vec<GroundAtom> = self
            .all
            .iter()
            .map(|(p, args)| {
                GroundAtom::new(
                    p,
                    args.iter()
                        .map(|t| match t {
                            Gt::C(c) => GroundTerm::Constant(c.clone()),
                            Gt::N(n) => GroundTerm::Null(NullId(*n)),
                        })
                        .collect(),
                )
            })
            .collect();
        Instance::from_ground_atoms(&atoms).unwrap()
    }
}

type Env = BTreeMap<Variable, Gt>;

fn each_match(atoms: &[Atom], inst: &NaiveInstance, env: &mut Env, out: &mut dyn FnMut(&Env) -> bool) -> bool {
    let Some((first, rest)) = atoms.split_first() else {
        return out(env);
    };
    let Some(rows) = inst.by_pred.get(first.predicate.as_ref()) else {
        return true;
    };
    for row in rows {
        if row.len() != first.args.len() {
            continue;
        }
        let mut added = Vec::new();
        let mut ok = true;
        for (arg, val) in first.args.iter().zip(row) {
            match arg {
                RuleTerm::Constant(c) => {
                    if Gt::C(c.clone()) != *val {
                        ok = false;
                    }
                }
                RuleTerm::Variable(v) => match env.get(v) {
                    Some(b) if b != val => ok = false,
                    Some(_) => {}
                    None => {
                        env.insert(v.clone(), val.clone());
                        added.push(v.clone());
                    }
                },
            }
            if !ok {
                break;
            }
        }
        let keep_going = !ok || each_match(rest, inst, env, out);
        for v in added {
            env.remove(&v);
        }
        if !keep_going {
            return false;
        }
    }
    true
}

/// Restricted chase by plain fixpoint iteration: every round re-evaluates
/// every rule on the whole instance. `None` when `max_rounds` is exceeded.
pub fn naive_chase(rules: &RuleSet, facts: &[Atom], max_rounds: usize) -> Option<NaiveInstance> {
    let mut inst = NaiveInstance::default();
    for f in facts {
        let args = f
            .args
            .iter()
            .map(|a| Gt::C(a.as_constant().expect("ground fact").clone()))
            .collect();
        inst.insert((f.predicate.to_string(), args));
    }
    for _ in 0..max_rounds {
        let mut changed = false;
        for rule in rules.rules() {
            let mut envs = Vec::new();
            each_match(rule.body(), &inst, &mut Env::new(), &mut |e| {
                envs.push(e.clone());
                true
            });
            for mut env in envs {
                let satisfied = !each_match(rule.head(), &inst, &mut env, &mut |_| false);
                if satisfied {
                    continue;
                }
                for v in rule.existentials() {
                    env.insert(v.clone(), Gt::N(inst.nulls));
                    inst.nulls += 1;
                }
                for a in rule.head() {
                    let args = a
                        .args
                        .iter()
                        .map(|t| match t {
                            RuleTerm::Constant(c) => Gt::C(c.clone()),
                            RuleTerm::Variable(v) => env[v].clone(),
                        })
                        .collect();
                    changed |= inst.insert((a.predicate.to_string(), args));
                }
            }
        }
        if !changed {
            return Some(inst);
        }
    }
    None
}

/// Random unary/binary rules over predicates `p0..p{preds}`; existential
/// rules only when `existential` is set.
pub fn random_rules(rng: &mut impl Rng, preds: usize, count: usize, existential: bool) -> RuleSet {
    let vars = ["x", "y", "z"];
    let arity = |p: usize| 1 + p % 2;
    let atom = |rng: &mut dyn rand::RngCore, names: &[&str], ex_vars: &[&str]| {
        let p = rng.random_range(0..preds);
        let args = (0..arity(p))
            .map(|_| {
                if !ex_vars.is_empty() && rng.random_bool(0.4) {
                    RuleTerm::Variable(Variable::existential(ex_vars[rng.random_range(0..ex_vars.len())]))
                } else if rng.random_bool(0.15) {
                    RuleTerm::Constant(ex(CONSTANT_NAMES[rng.random_range(0..2)]))
                } else {
                    RuleTerm::Variable(Variable::universal(names[rng.random_range(0..names.len())]))
                }
            })
            .collect();
        Atom::new(format!("p{p}"), args)
    };
    let mut rules = Vec::new();
    while rules.len() < count {
        let body: Vec<Atom> = (0..rng.random_range(1..3)).map(|_| atom(rng, &vars, &[])).collect();
        let bound: Vec<&str> = vars
            .iter()
            .copied()
            .filter(|v| {
                body.iter()
                    .any(|a| a.args.contains(&RuleTerm::Variable(Variable::universal(v))))
            })
            .collect();
        if bound.is_empty() {
            continue;
        }
        let ex_vars: &[&str] = if existential { &["e", "f"] } else { &[] };
        let head: Vec<Atom> = (0..rng.random_range(1..3))
            .map(|_| atom(rng, &bound, ex_vars))
            .collect();
        if let Ok(r) = ExRule::new(body, head) {
            rules.push(r);
        }
    }
    RuleSet::new(rules).unwrap()
}

pub fn random_facts(rng: &mut impl Rng, preds: usize, consts: usize, count: usize) -> Vec<Atom> {
    (0..count)
        .map(|_| {
            let p = rng.random_range(0..preds);
            let args = (0..1 + p % 2)
                .map(|_| RuleTerm::Constant(ex(&format!("k{}", rng.random_range(0..consts)))))
                .collect();
            Atom::new(format!("p{p}"), args)
        })
        .collect()
}
