//! Existential rules: `∀x⃗,y⃗. body[x⃗,y⃗] → ∃z⃗. head[y⃗,z⃗]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::iso;
use crate::model::Constant;

/// Name of the ternary predicate that carries N3 triples.
pub const TRIPLE_PREDICATE: &str = "tr";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("existential variable !{0} may not occur in a rule body")]
    ExistentialInBody(String),
    #[error("head variable ?{0} does not occur in the body")]
    UnsafeHeadVariable(String),
    #[error("rule head must contain at least one atom")]
    EmptyHead,
    #[error("predicate `{predicate}` used with arity {found}, expected {expected}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Universal,
    Existential,
}

/// A rule variable. The quantifier is part of its identity, so `?x` and
/// `!x` are different variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: Arc<str>,
    pub quantifier: Quantifier,
}

impl Variable {
    pub fn universal(name: impl AsRef<str>) -> Self {
        Variable {
            name: Arc::from(name.as_ref()),
            quantifier: Quantifier::Universal,
        }
    }

    pub fn existential(name: impl AsRef<str>) -> Self {
        Variable {
            name: Arc::from(name.as_ref()),
            quantifier: Quantifier::Existential,
        }
    }

    pub fn is_existential(&self) -> bool {
        self.quantifier == Quantifier::Existential
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.quantifier {
            Quantifier::Universal => write!(f, "?{}", self.name),
            Quantifier::Existential => write!(f, "!{}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleTerm {
    Constant(Constant),
    Variable(Variable),
}

impl RuleTerm {
    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            RuleTerm::Variable(v) => Some(v),
            RuleTerm::Constant(_) => None,
        }
    }

    pub fn as_constant(&self) -> Option<&Constant> {
        match self {
            RuleTerm::Constant(c) => Some(c),
            RuleTerm::Variable(_) => None,
        }
    }
}

impl From<Constant> for RuleTerm {
    fn from(c: Constant) -> Self {
        RuleTerm::Constant(c)
    }
}

impl From<Variable> for RuleTerm {
    fn from(v: Variable) -> Self {
        RuleTerm::Variable(v)
    }
}

impl fmt::Display for RuleTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTerm::Constant(c) => c.fmt(f),
            RuleTerm::Variable(v) => v.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Arc<str>,
    pub args: Vec<RuleTerm>,
}

impl Atom {
    pub fn new(predicate: impl AsRef<str>, args: Vec<RuleTerm>) -> Self {
        Atom {
            predicate: Arc::from(predicate.as_ref()),
            args,
        }
    }

    pub fn tr(s: impl Into<RuleTerm>, p: impl Into<RuleTerm>, o: impl Into<RuleTerm>) -> Self {
        Atom::new(TRIPLE_PREDICATE, vec![s.into(), p.into(), o.into()])
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.args.iter().filter_map(RuleTerm::as_variable)
    }

    pub fn is_ground(&self) -> bool {
        self.variables().next().is_none()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A validated existential rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExRule {
    body: Vec<Atom>,
    head: Vec<Atom>,
    frontier: BTreeSet<Variable>,
    existentials: BTreeSet<Variable>,
}

impl ExRule {
    pub fn new(body: Vec<Atom>, head: Vec<Atom>) -> Result<Self, RuleError> {
        if head.is_empty() {
            return Err(RuleError::EmptyHead);
        }
        for atom in body.iter().chain(&head) {
            check_tr_arity(atom)?;
        }
        if let Some(v) = body.iter().flat_map(Atom::variables).find(|v| v.is_existential()) {
            return Err(RuleError::ExistentialInBody(v.name.to_string()));
        }
        let body_vars: BTreeSet<&Variable> = body.iter().flat_map(Atom::variables).collect();
        let mut frontier = BTreeSet::new();
        let mut existentials = BTreeSet::new();
        for v in head.iter().flat_map(Atom::variables) {
            if v.is_existential() {
                existentials.insert(v.clone());
            } else if body_vars.contains(v) {
                frontier.insert(v.clone());
            } else {
                return Err(RuleError::UnsafeHeadVariable(v.name.to_string()));
            }
        }
        Ok(ExRule {
            body,
            head,
            frontier,
            existentials,
        })
    }

    /// A body-less, variable-free rule.
    pub fn fact(atom: Atom) -> Result<Self, RuleError> {
        ExRule::new(Vec::new(), vec![atom])
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn head(&self) -> &[Atom] {
        &self.head
    }

    pub fn frontier(&self) -> &BTreeSet<Variable> {
        &self.frontier
    }

    pub fn existentials(&self) -> &BTreeSet<Variable> {
        &self.existentials
    }

    /// Universal variables of the body.
    pub fn universals(&self) -> BTreeSet<&Variable> {
        self.body.iter().flat_map(Atom::variables).collect()
    }

    /// Empty body and no variables at all.
    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.existentials.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().chain(&self.head)
    }

    /// Same rule up to renaming of variables and reordering of body and
    /// head atoms.
    pub fn isomorphic(&self, other: &ExRule) -> bool {
        self.body.len() == other.body.len()
            && self.head.len() == other.head.len()
            && iso::rows_isomorphic(&rule_rows(self), &rule_rows(other), &rule_term_class)
    }
}

fn check_tr_arity(atom: &Atom) -> Result<(), RuleError> {
    if &*atom.predicate == TRIPLE_PREDICATE && atom.arity() != 3 {
        return Err(RuleError::ArityMismatch {
            predicate: TRIPLE_PREDICATE.into(),
            expected: 3,
            found: atom.arity(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum RowItem {
    Tag(u8, Arc<str>),
    Term(RuleTerm),
}

fn rule_term_class(item: &RowItem) -> Option<u8> {
    match item {
        RowItem::Term(RuleTerm::Variable(v)) => Some(v.quantifier as u8),
        _ => None,
    }
}

fn rule_rows(rule: &ExRule) -> Vec<Vec<RowItem>> {
    let rows = |tag: u8, atoms: &[Atom]| -> Vec<Vec<RowItem>> {
        atoms
            .iter()
            .map(|a| {
                std::iter::once(RowItem::Tag(tag, a.predicate.clone()))
                    .chain(a.args.iter().cloned().map(RowItem::Term))
                    .collect()
            })
            .collect()
    };
    let mut out = rows(0, &rule.body);
    out.extend(rows(1, &rule.head));
    out
}

impl fmt::Display for ExRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, atoms: &[Atom]| -> fmt::Result {
            for (i, a) in atoms.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            Ok(())
        };
        if self.is_fact() {
            list(f, &self.head)?;
        } else {
            list(f, &self.body)?;
            if !self.body.is_empty() {
                write!(f, " ")?;
            }
            write!(f, "-> ")?;
            list(f, &self.head)?;
        }
        write!(f, " .")
    }
}

/// An ordered list of rules with consistent predicate arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<ExRule>,
}

impl RuleSet {
    pub fn new(rules: Vec<ExRule>) -> Result<Self, RuleError> {
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for atom in rules.iter().flat_map(ExRule::atoms) {
            let expected = *arities.entry(&atom.predicate).or_insert(atom.arity());
            if expected != atom.arity() {
                return Err(RuleError::ArityMismatch {
                    predicate: atom.predicate.to_string(),
                    expected,
                    found: atom.arity(),
                });
            }
        }
        Ok(RuleSet { rules })
    }

    pub fn empty() -> Self {
        RuleSet::default()
    }

    pub fn rules(&self) -> &[ExRule] {
        &self.rules
    }

    pub fn into_rules(self) -> Vec<ExRule> {
        self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Predicate arities, in name order.
    pub fn signature(&self) -> BTreeMap<Arc<str>, usize> {
        self.rules
            .iter()
            .flat_map(ExRule::atoms)
            .map(|a| (a.predicate.clone(), a.arity()))
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<Constant> {
        self.rules
            .iter()
            .flat_map(ExRule::atoms)
            .flat_map(|a| a.args.iter().filter_map(RuleTerm::as_constant).cloned())
            .collect()
    }

    /// Moves variable-free, body-less rules out as database atoms.
    pub fn split_facts(self) -> (RuleSet, Vec<Atom>) {
        let mut rules = Vec::new();
        let mut facts = Vec::new();
        for r in self.rules {
            if r.is_fact() {
                facts.extend(r.head);
            } else {
                rules.push(r);
            }
        }
        (RuleSet { rules }, facts)
    }

    /// Equal as multisets of rules, each rule taken up to variable renaming.
    pub fn equivalent_modulo_renaming(&self, other: &RuleSet) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut unused: Vec<&ExRule> = other.rules.iter().collect();
        for r in &self.rules {
            match unused.iter().position(|c| r.isomorphic(c)) {
                Some(i) => {
                    unused.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
