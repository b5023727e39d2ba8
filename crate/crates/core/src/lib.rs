//! Existential N3: a parser and serializer for the existential fragment of
//! Notation3, Piece Normal Form, translation to existential rules and back,
//! a restricted chase, and a finite-universe satisfaction oracle.

pub mod chase;
pub mod gen;
mod iso;
pub mod load;
pub mod model;
pub mod oracle;
pub mod parser;
pub mod pnf;
pub mod rules;
pub mod translate;

pub use model::{
    Constant, Expression, Formula, Implication, Literal, ModelError, N3Term, Statement, Substitution, Triple,
};
pub use parser::{parse_n3, parse_rules, serialize_n3, serialize_rules, ParseError, ParseErrorKind};
pub use rules::{Atom, ExRule, Quantifier, RuleError, RuleSet, RuleTerm, Variable};
