//! Terms, triples and formulae of existential N3.
//!
//! A document is a conjunction of top-level statements. Conjunction is kept
//! as a flat, order-preserving list; two formulae are considered the same
//! "structurally" when they agree up to conjunct order and an injective
//! renaming of variables (see [`Formula::structurally_equivalent`]).
//!
//! Blank nodes are scoped by position: a blank node in a top-level triple is
//! quantified over the whole document, a blank node inside a rule body or
//! head is quantified inside that rule part only. Nothing in this crate ever
//! relates a blank-node label inside a rule to one outside of it, so surface
//! labels can be kept as they were written.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::iso;

/// Namespace used for the empty prefix and for IRIs minted from bare names.
pub const EXAMPLE_NS: &str = "http://www.example.org#";
pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("expressions must contain at least one triple")]
    EmptyExpression,
    #[error("universal variable ?{0} may not occur in a top-level triple")]
    UniversalInAtomic(String),
    #[error("implication head introduces universal variable ?{0} not bound in its body")]
    NotWellFormed(String),
    #[error("substitution domain must be a variable, got {0}")]
    NonVariableDomain(String),
}

/// A literal keeps its lexical form; tags and datatypes are carried along
/// but never interpreted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub value: Arc<str>,
    pub language: Option<Arc<str>>,
    pub datatype: Option<Arc<str>>,
}

/// IRIs and literals. The logic treats every constant the same way; the
/// distinction only matters when writing text back out.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Iri(Arc<str>),
    Literal(Literal),
}

impl Constant {
    pub fn iri(iri: impl AsRef<str>) -> Self {
        Constant::Iri(Arc::from(iri.as_ref()))
    }

    /// `:name` in the example namespace.
    pub fn example(local: impl AsRef<str>) -> Self {
        Constant::Iri(Arc::from(format!("{EXAMPLE_NS}{}", local.as_ref())))
    }

    pub fn literal(value: impl AsRef<str>) -> Self {
        Constant::Literal(Literal {
            value: Arc::from(value.as_ref()),
            language: None,
            datatype: None,
        })
    }

    pub fn rdf_type() -> Self {
        Constant::iri(RDF_TYPE)
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Constant::Iri(iri) => Some(iri),
            Constant::Literal(_) => None,
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Iri(iri) => write!(f, "<{iri}>"),
            Constant::Literal(lit) => {
                write!(f, "\"{}\"", escape_literal(&lit.value))?;
                if let Some(lang) = &lit.language {
                    write!(f, "@{lang}")?;
                }
                if let Some(dt) = &lit.datatype {
                    write!(f, "^^<{dt}>")?;
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// A term of the N3 alphabet: constant, blank node or universal variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum N3Term {
    Constant(Constant),
    /// `_:label`
    Existential(Arc<str>),
    /// `?label`
    Universal(Arc<str>),
}

impl N3Term {
    pub fn existential(label: impl AsRef<str>) -> Self {
        let label = label.as_ref();
        assert!(!label.is_empty(), "blank node labels are non-empty");
        N3Term::Existential(Arc::from(label))
    }

    pub fn universal(label: impl AsRef<str>) -> Self {
        let label = label.as_ref();
        assert!(!label.is_empty(), "variable names are non-empty");
        N3Term::Universal(Arc::from(label))
    }

    pub fn iri(iri: impl AsRef<str>) -> Self {
        N3Term::Constant(Constant::iri(iri))
    }

    pub fn example(local: impl AsRef<str>) -> Self {
        N3Term::Constant(Constant::example(local))
    }

    pub fn literal(value: impl AsRef<str>) -> Self {
        N3Term::Constant(Constant::literal(value))
    }

    pub fn is_variable(&self) -> bool {
        !matches!(self, N3Term::Constant(_))
    }

    pub fn is_existential(&self) -> bool {
        matches!(self, N3Term::Existential(_))
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, N3Term::Universal(_))
    }

    pub fn as_constant(&self) -> Option<&Constant> {
        match self {
            N3Term::Constant(c) => Some(c),
            _ => None,
        }
    }
}

impl From<Constant> for N3Term {
    fn from(c: Constant) -> Self {
        N3Term::Constant(c)
    }
}

impl fmt::Display for N3Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            N3Term::Constant(c) => c.fmt(f),
            N3Term::Existential(l) => write!(f, "_:{l}"),
            N3Term::Universal(l) => write!(f, "?{l}"),
        }
    }
}

/// `s p o.` Any term may sit in any position, predicates included.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: N3Term,
    pub predicate: N3Term,
    pub object: N3Term,
}

impl Triple {
    pub fn new(subject: N3Term, predicate: N3Term, object: N3Term) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }

    pub fn terms(&self) -> [&N3Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn map_terms(&self, mut f: impl FnMut(&N3Term) -> N3Term) -> Triple {
        Triple::new(f(&self.subject), f(&self.predicate), f(&self.object))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// The inside of a pair of braces: a non-empty conjunction of triples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expression(Vec<Triple>);

impl Expression {
    pub fn new(triples: Vec<Triple>) -> Result<Self, ModelError> {
        if triples.is_empty() {
            return Err(ModelError::EmptyExpression);
        }
        Ok(Expression(triples))
    }

    pub fn triples(&self) -> &[Triple] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &N3Term> {
        self.0.iter().flat_map(|t| t.terms())
    }

    pub fn existentials(&self) -> BTreeSet<N3Term> {
        self.terms().filter(|t| t.is_existential()).cloned().collect()
    }

    pub fn universals(&self) -> BTreeSet<N3Term> {
        self.terms().filter(|t| t.is_universal()).cloned().collect()
    }

    pub fn components(&self) -> BTreeSet<Component<'_>> {
        self.terms().map(Component::Term).collect()
    }
}

/// `{body} => {head}.`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Implication {
    pub body: Expression,
    pub head: Expression,
}

impl Implication {
    pub fn new(body: Expression, head: Expression) -> Self {
        Implication { body, head }
    }

    /// Checked constructor: rejects heads that introduce universals.
    pub fn well_formed(body: Expression, head: Expression) -> Result<Self, ModelError> {
        let rule = Implication { body, head };
        match rule.unbound_head_universals().into_iter().next() {
            Some(N3Term::Universal(name)) => Err(ModelError::NotWellFormed(name.to_string())),
            _ => Ok(rule),
        }
    }

    /// Universals of the head that do not occur in the body.
    pub fn unbound_head_universals(&self) -> BTreeSet<N3Term> {
        let bound = self.body.universals();
        self.head
            .universals()
            .into_iter()
            .filter(|u| !bound.contains(u))
            .collect()
    }

    pub fn is_well_formed(&self) -> bool {
        self.unbound_head_universals().is_empty()
    }

    /// Every universal quantified over this implication.
    pub fn universals(&self) -> BTreeSet<N3Term> {
        let mut out = self.body.universals();
        out.extend(self.head.universals());
        out
    }
}

/// A top-level conjunct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Atomic(Triple),
    Implication(Implication),
}

impl Statement {
    pub fn components(&self) -> BTreeSet<Component<'_>> {
        match self {
            Statement::Atomic(t) => t.terms().into_iter().map(Component::Term).collect(),
            Statement::Implication(r) => [Component::Expression(&r.body), Component::Expression(&r.head)]
                .into_iter()
                .collect(),
        }
    }

    pub fn as_atomic(&self) -> Option<&Triple> {
        match self {
            Statement::Atomic(t) => Some(t),
            Statement::Implication(_) => None,
        }
    }

    pub fn as_implication(&self) -> Option<&Implication> {
        match self {
            Statement::Implication(r) => Some(r),
            Statement::Atomic(_) => None,
        }
    }

    /// Blank nodes that are components of this statement. Blank nodes
    /// inside an implication are local to it and never count.
    pub fn free_existentials(&self) -> impl Iterator<Item = &N3Term> {
        self.as_atomic()
            .into_iter()
            .flat_map(|t| t.terms())
            .filter(|t| t.is_existential())
    }
}

impl From<Triple> for Statement {
    fn from(t: Triple) -> Self {
        Statement::Atomic(t)
    }
}

impl From<Implication> for Statement {
    fn from(r: Implication) -> Self {
        Statement::Implication(r)
    }
}

/// An item of `comp(f)`: a term, or a whole rule part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component<'a> {
    Term(&'a N3Term),
    Expression(&'a Expression),
}

/// A conjunction of statements. The empty conjunction is the empty
/// document and is trivially true.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Formula {
    statements: Vec<Statement>,
}

impl Formula {
    pub fn new(statements: Vec<Statement>) -> Self {
        Formula { statements }
    }

    pub fn atomic(triple: Triple) -> Result<Self, ModelError> {
        let f = Formula::new(vec![Statement::Atomic(triple)]);
        f.validate()?;
        Ok(f)
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn into_statements(self) -> Vec<Statement> {
        self.statements
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn push(&mut self, statement: impl Into<Statement>) {
        self.statements.push(statement.into());
    }

    /// `f g`, flattened.
    pub fn conjoin(mut self, other: Formula) -> Formula {
        self.statements.extend(other.statements);
        self
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.statements.iter().filter_map(Statement::as_atomic)
    }

    pub fn implications(&self) -> impl Iterator<Item = &Implication> {
        self.statements.iter().filter_map(Statement::as_implication)
    }

    pub fn components(&self) -> BTreeSet<Component<'_>> {
        self.statements.iter().flat_map(|s| s.components()).collect()
    }

    /// `comp(f) ∩ E`
    pub fn free_existentials(&self) -> BTreeSet<N3Term> {
        self.statements
            .iter()
            .flat_map(|s| s.free_existentials())
            .cloned()
            .collect()
    }

    /// Universal variables of the formula. Top-level triples cannot hold
    /// universals, so these are the variables quantified over its
    /// implications.
    pub fn universals(&self) -> BTreeSet<N3Term> {
        self.implications().flat_map(|r| r.universals()).collect()
    }

    /// Constants occurring anywhere, rule parts included.
    pub fn constants(&self) -> BTreeSet<Constant> {
        let mut out = BTreeSet::new();
        for s in &self.statements {
            match s {
                Statement::Atomic(t) => collect_constants(t.terms(), &mut out),
                Statement::Implication(r) => {
                    collect_constants(r.body.terms(), &mut out);
                    collect_constants(r.head.terms(), &mut out);
                }
            }
        }
        out
    }

    /// Checks the statement-level invariants: no universals in top-level
    /// triples and well-formed implications.
    pub fn validate(&self) -> Result<(), ModelError> {
        for s in &self.statements {
            match s {
                Statement::Atomic(t) => {
                    if let Some(N3Term::Universal(name)) = t.terms().into_iter().find(|t| t.is_universal()) {
                        return Err(ModelError::UniversalInAtomic(name.to_string()));
                    }
                }
                Statement::Implication(r) => {
                    if let Some(N3Term::Universal(name)) = r.unbound_head_universals().into_iter().next() {
                        return Err(ModelError::NotWellFormed(name.to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Equality up to conjunct order and injective renaming of variables
    /// inside each quantifier scope.
    pub fn structurally_equivalent(&self, other: &Formula) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let rows = |f: &Formula| -> Vec<Vec<ScopedTerm>> {
            f.triples()
                .map(|t| t.terms().iter().map(|x| ScopedTerm(0, (*x).clone())).collect())
                .collect()
        };
        if !iso::rows_isomorphic(&rows(self), &rows(other), &scoped_class) {
            return false;
        }
        let mut unused: Vec<&Implication> = other.implications().collect();
        for r in self.implications() {
            match unused.iter().position(|cand| implications_isomorphic(r, cand)) {
                Some(i) => {
                    unused.swap_remove(i);
                }
                None => return false,
            }
        }
        unused.is_empty()
    }
}

fn collect_constants<'a>(terms: impl IntoIterator<Item = &'a N3Term>, out: &mut BTreeSet<Constant>) {
    out.extend(terms.into_iter().filter_map(|t| t.as_constant().cloned()));
}

/// A term tagged with the scope it is quantified in: 0 for the document or
/// the whole implication, 1 for a rule body, 2 for a rule head.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ScopedTerm(u8, N3Term);

fn scoped_class(t: &ScopedTerm) -> Option<u8> {
    match &t.1 {
        N3Term::Constant(_) => None,
        N3Term::Universal(_) => Some(0),
        N3Term::Existential(_) => Some(1 + t.0),
    }
}

fn implications_isomorphic(a: &Implication, b: &Implication) -> bool {
    let rows = |r: &Implication| -> Vec<Vec<ScopedTerm>> {
        let part = |tag: u8, scope: u8, e: &Expression| -> Vec<Vec<ScopedTerm>> {
            e.triples()
                .iter()
                .map(|t| {
                    let mut row = vec![ScopedTerm(0, N3Term::literal(tag.to_string()))];
                    row.extend(t.terms().iter().map(|x| {
                        let s = if x.is_existential() { scope } else { 0 };
                        ScopedTerm(s, (*x).clone())
                    }));
                    row
                })
                .collect()
        };
        let mut out = part(0, 1, &r.body);
        out.extend(part(1, 2, &r.head));
        out
    };
    a.body.len() == b.body.len()
        && a.head.len() == b.head.len()
        && iso::rows_isomorphic(&rows(a), &rows(b), &scoped_class)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.statements.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match s {
                Statement::Atomic(t) => write!(f, "{t}")?,
                Statement::Implication(r) => {
                    write!(f, "{{")?;
                    for t in r.body.triples() {
                        write!(f, " {t}")?;
                    }
                    write!(f, " }} => {{")?;
                    for t in r.head.triples() {
                        write!(f, " {t}")?;
                    }
                    write!(f, " }} .")?;
                }
            }
        }
        Ok(())
    }
}

/// A finite map from variables to N3 terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    mapping: BTreeMap<N3Term, N3Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: N3Term, value: N3Term) -> Result<(), ModelError> {
        if !var.is_variable() {
            return Err(ModelError::NonVariableDomain(var.to_string()));
        }
        self.mapping.insert(var, value);
        Ok(())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (N3Term, N3Term)>) -> Result<Self, ModelError> {
        let mut sigma = Substitution::new();
        for (k, v) in pairs {
            sigma.insert(k, v)?;
        }
        Ok(sigma)
    }

    pub fn get(&self, var: &N3Term) -> Option<&N3Term> {
        self.mapping.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &N3Term> {
        self.mapping.keys()
    }

    pub fn range(&self) -> impl Iterator<Item = &N3Term> {
        self.mapping.values()
    }

    pub fn apply<T: Substitute>(&self, target: &T) -> T {
        target.substitute(self)
    }
}

/// Application of a substitution at component level.
pub trait Substitute: Sized {
    fn substitute(&self, sigma: &Substitution) -> Self;
}

impl Substitute for N3Term {
    fn substitute(&self, sigma: &Substitution) -> Self {
        sigma.get(self).cloned().unwrap_or_else(|| self.clone())
    }
}

impl Substitute for Triple {
    fn substitute(&self, sigma: &Substitution) -> Self {
        self.map_terms(|t| t.substitute(sigma))
    }
}

impl Substitute for Expression {
    fn substitute(&self, sigma: &Substitution) -> Self {
        Expression(self.0.iter().map(|t| t.substitute(sigma)).collect())
    }
}

impl Substitute for Statement {
    fn substitute(&self, sigma: &Substitution) -> Self {
        match self {
            Statement::Atomic(t) => Statement::Atomic(t.substitute(sigma)),
            // rule parts are not components
            Statement::Implication(_) => self.clone(),
        }
    }
}

impl Substitute for Formula {
    fn substitute(&self, sigma: &Substitution) -> Self {
        Formula::new(self.statements.iter().map(|s| s.substitute(sigma)).collect())
    }
}
