//! Translation between N3 pieces and existential rules.
//!
//! Forward: every triple becomes a `tr/3` atom, universals become universal
//! rule variables and blank nodes existential ones. An atomic piece turns
//! into a rule with an empty body; an implication into a rule.
//!
//! Backward: `tr(a, b, c)` becomes the triple `a b c`, a binary atom
//! `p(a, b)` the triple `a :p b` and a unary atom `p(a)` the triple
//! `a rdf:type :p`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::chase::{GroundAtom, GroundTerm, Instance};
use crate::model::{Constant, Expression, Formula, Implication, N3Term, Statement, Triple, EXAMPLE_NS};
use crate::parser::is_local_name;
use crate::pnf::{Piece, PieceSet};
use crate::rules::{Atom, ExRule, Quantifier, RuleError, RuleSet, RuleTerm, Variable, TRIPLE_PREDICATE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("predicate `{predicate}` has arity {arity}; only unary, binary and `tr/3` atoms map to triples")]
    UnsupportedArity { predicate: String, arity: usize },
    #[error("ternary predicate `{0}` has no triple reading; only `tr` may have arity 3")]
    TernaryPredicate(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// The term map: `?x` to a universal variable, `_:y` to an existential
/// variable, constants to themselves.
pub fn term_translate(t: &N3Term) -> RuleTerm {
    match t {
        N3Term::Constant(c) => RuleTerm::Constant(c.clone()),
        N3Term::Universal(l) => RuleTerm::Variable(Variable::universal(l)),
        N3Term::Existential(l) => RuleTerm::Variable(Variable::existential(l)),
    }
}

pub fn triple_atom(t: &Triple) -> Atom {
    Atom::tr(
        term_translate(&t.subject),
        term_translate(&t.predicate),
        term_translate(&t.object),
    )
}

/// `-> ∃z. tr(g1) ∧ ... ∧ tr(gl)`; a fact when the piece is ground.
pub fn translate_atomic_piece(triples: &[Triple]) -> Result<ExRule, RuleError> {
    ExRule::new(Vec::new(), triples.iter().map(triple_atom).collect())
}

/// Fails with [`RuleError::ExistentialInBody`] when the body still holds
/// blank nodes, i.e. the implication is not normalized.
pub fn translate_rule_piece(r: &Implication) -> Result<ExRule, RuleError> {
    ExRule::new(
        r.body.triples().iter().map(triple_atom).collect(),
        r.head.triples().iter().map(triple_atom).collect(),
    )
}

pub fn translate_piece(p: &Piece) -> Result<ExRule, RuleError> {
    match p {
        Piece::Atomic(ts) => translate_atomic_piece(ts),
        Piece::Rule(r) => translate_rule_piece(r),
    }
}

/// The union of the translated pieces, in piece order.
pub fn translate_set(pieces: &PieceSet) -> Result<RuleSet, RuleError> {
    RuleSet::new(pieces.iter().map(translate_piece).collect::<Result<_, _>>()?)
}

/// IRI for a rule predicate name: bare names live in the example
/// namespace, anything else is taken to be an IRI already.
pub fn predicate_iri(name: &str) -> Constant {
    if is_local_name(name) && !name.contains(':') {
        Constant::iri(format!("{EXAMPLE_NS}{name}"))
    } else {
        Constant::iri(name)
    }
}

fn triple_of(atom: &Atom, term: &mut impl FnMut(&RuleTerm) -> N3Term) -> Result<Triple, TranslateError> {
    let a = &atom.args;
    match a.len() {
        3 if &*atom.predicate == TRIPLE_PREDICATE => Ok(Triple::new(term(&a[0]), term(&a[1]), term(&a[2]))),
        3 => Err(TranslateError::TernaryPredicate(atom.predicate.to_string())),
        2 => Ok(Triple::new(
            term(&a[0]),
            N3Term::Constant(predicate_iri(&atom.predicate)),
            term(&a[1]),
        )),
        1 => Ok(Triple::new(
            term(&a[0]),
            N3Term::Constant(Constant::rdf_type()),
            N3Term::Constant(predicate_iri(&atom.predicate)),
        )),
        arity => Err(TranslateError::UnsupportedArity {
            predicate: atom.predicate.to_string(),
            arity,
        }),
    }
}

/// The triple reading of a chase atom; nulls become blank nodes `_:n<k>`.
pub fn ground_triple(atom: &GroundAtom) -> Result<Triple, TranslateError> {
    let rule_atom = Atom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| match t {
                GroundTerm::Constant(c) => RuleTerm::Constant(c.clone()),
                GroundTerm::Null(n) => RuleTerm::Variable(Variable::existential(format!("n{}", n.0))),
            })
            .collect(),
    };
    triple_of(&rule_atom, &mut |t: &RuleTerm| match t {
        RuleTerm::Constant(c) => N3Term::Constant(c.clone()),
        RuleTerm::Variable(v) => N3Term::Existential(v.name.clone()),
    })
}

/// A chase result as one N3 document, atoms in sorted order. Nulls are
/// shared blank nodes of the whole document.
pub fn instance_to_n3(inst: &Instance) -> Result<Formula, TranslateError> {
    let statements = inst
        .sorted_atoms()
        .iter()
        .map(|a| ground_triple(a).map(Statement::Atomic))
        .collect::<Result<_, _>>()?;
    Ok(Formula::new(statements))
}

/// Canonical translation of a rule set to N3. Body-less rules become
/// top-level triples; their existential variables become blank nodes that
/// are renamed apart so that different rules never share one.
pub fn inverse_translate(rs: &RuleSet) -> Result<Formula, TranslateError> {
    let mut out = Formula::default();
    let mut taken: BTreeSet<Arc<str>> = BTreeSet::new();
    for r in rs.rules() {
        if r.body().is_empty() {
            let mut rename: BTreeMap<&Variable, N3Term> = BTreeMap::new();
            for v in r.existentials() {
                let mut label: Arc<str> = v.name.clone();
                let mut k = 1;
                while taken.contains(&label) {
                    label = Arc::from(format!("{}_{k}", v.name));
                    k += 1;
                }
                taken.insert(label.clone());
                rename.insert(v, N3Term::Existential(label));
            }
            let mut term = |t: &RuleTerm| match t {
                RuleTerm::Constant(c) => N3Term::Constant(c.clone()),
                RuleTerm::Variable(v) => rename[v].clone(),
            };
            for a in r.head() {
                out.push(triple_of(a, &mut term)?);
            }
        } else {
            let mut term = |t: &RuleTerm| match t {
                RuleTerm::Constant(c) => N3Term::Constant(c.clone()),
                RuleTerm::Variable(v) => match v.quantifier {
                    Quantifier::Universal => N3Term::Universal(v.name.clone()),
                    Quantifier::Existential => N3Term::Existential(v.name.clone()),
                },
            };
            let body = r
                .body()
                .iter()
                .map(|a| triple_of(a, &mut term))
                .collect::<Result<_, _>>()?;
            let head = r
                .head()
                .iter()
                .map(|a| triple_of(a, &mut term))
                .collect::<Result<_, _>>()?;
            out.push(Statement::Implication(Implication::new(
                Expression::new(body).expect("body checked non-empty"),
                Expression::new(head).expect("rule heads are non-empty"),
            )));
        }
    }
    Ok(out)
}

/// Rewrites unary and binary atoms into `tr` atoms, the same way
/// [`inverse_translate`] followed by the forward translation would.
pub fn tr_encode(rs: &RuleSet) -> Result<RuleSet, TranslateError> {
    let rules = rs
        .rules()
        .iter()
        .map(|r| {
            let body = r.body().iter().map(tr_encode_atom).collect::<Result<_, _>>()?;
            let head = r.head().iter().map(tr_encode_atom).collect::<Result<_, _>>()?;
            Ok(ExRule::new(body, head)?)
        })
        .collect::<Result<_, TranslateError>>()?;
    Ok(RuleSet::new(rules)?)
}

pub fn tr_encode_atom(a: &Atom) -> Result<Atom, TranslateError> {
    let t = triple_of(a, &mut |t: &RuleTerm| match t {
        RuleTerm::Constant(c) => N3Term::Constant(c.clone()),
        RuleTerm::Variable(v) => match v.quantifier {
            Quantifier::Universal => N3Term::Universal(v.name.clone()),
            Quantifier::Existential => N3Term::Existential(v.name.clone()),
        },
    })?;
    Ok(triple_atom(&t))
}
