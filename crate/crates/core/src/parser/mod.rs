//! Text syntax for existential N3 (`.n3`) and for the rule language
//! (`.erl`).
//!
//! The N3 surface covers `@prefix` directives, prefixed names, `<IRI>`s,
//! double-quoted literals, the `a` keyword, `?var`, `_:label` and one level
//! of `{ ... } => { ... } .` rules.
//!
//! Rule files look like
//!
//! ```text
//! % comment
//! tr(?x, :knows, :tom) -> tr(?x, :knows, !y), tr(!y, :name, "Tom") .
//!  -> tr(:lucy, :knows, !x) .
//! tr(:a, :b, :c) .
//! ```
//!
//! `?name` is universal, `!name` existential. Bare identifiers in argument
//! position are constants in the example namespace.

mod erl;
mod lexer;
mod n3;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{EXAMPLE_NS, RDFS_NS, RDF_NS, XSD_NS};

pub use erl::{parse_rules, parse_rules_document, serialize_rules, serialize_rules_with, RulesDocument};
pub use n3::{parse_n3, parse_n3_document, serialize_n3, serialize_n3_with, N3Document};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    /// Byte offsets into the input.
    pub start: usize,
    pub end: usize,
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Lexical,
    Syntactic,
    WellFormedness,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Lexical => "lexical",
            ParseErrorKind::Syntactic => "syntax",
            ParseErrorKind::WellFormedness => "well-formedness",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind} error: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub kind: ParseErrorKind,
}

/// Prefix declarations. Starts out with the empty prefix bound to the
/// example namespace and the usual `rdf`, `rdfs` and `xsd` prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    map: BTreeMap<String, String>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        let map = [("", EXAMPLE_NS), ("rdf", RDF_NS), ("rdfs", RDFS_NS), ("xsd", XSD_NS)]
            .into_iter()
            .map(|(p, ns)| (p.to_string(), ns.to_string()))
            .collect();
        PrefixMap { map }
    }
}

impl PrefixMap {
    pub fn empty() -> Self {
        PrefixMap { map: BTreeMap::new() }
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(prefix.into(), namespace.into());
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }

    /// `(prefix, local)` for the longest matching namespace whose remainder
    /// is a legal local name.
    pub fn compact<'a>(&'a self, iri: &'a str) -> Option<(&'a str, &'a str)> {
        self.map
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && iri.starts_with(ns.as_str()))
            .map(|(p, ns)| (p.as_str(), &iri[ns.len()..]))
            .filter(|(_, local)| is_local_name(local))
            .min_by_key(|(p, local)| (local.len(), *p))
    }
}

/// Local names the lexer reads back unchanged.
pub fn is_local_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| lexer::is_name_char(c) || c == '.')
        && !s.ends_with('.')
        && !s.starts_with('.')
        && !s.contains("..")
}
