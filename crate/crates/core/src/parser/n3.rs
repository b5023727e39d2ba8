use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::lexer::{self, tokenize, Dialect, Spanned, Tok};
use super::{ParseError, ParseErrorKind, PrefixMap};
use crate::model::{Constant, Expression, Formula, Implication, Literal, N3Term, Statement, Triple, RDF_TYPE};

/// A parsed document together with the prefixes it declared.
#[derive(Debug, Clone)]
pub struct N3Document {
    pub formula: Formula,
    pub prefixes: PrefixMap,
}

pub fn parse_n3(src: &str) -> Result<Formula, ParseError> {
    parse_n3_document(src).map(|d| d.formula)
}

pub fn parse_n3_document(src: &str) -> Result<N3Document, ParseError> {
    let toks = tokenize(src, Dialect::N3)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        prefixes: PrefixMap::default(),
    };
    let formula = p.document()?;
    Ok(N3Document {
        formula,
        prefixes: p.prefixes,
    })
}

struct Located {
    term: N3Term,
    start: usize,
    end: usize,
}

pub(super) struct Parser<'a> {
    pub(super) src: &'a str,
    pub(super) toks: Vec<Spanned>,
    pub(super) pos: usize,
    pub(super) prefixes: PrefixMap,
}

impl Parser<'_> {
    pub(super) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub(super) fn next(&mut self) -> Result<Spanned, ParseError> {
        match self.toks.get(self.pos) {
            Some(s) => {
                self.pos += 1;
                Ok(s.clone())
            }
            None => Err(self.eof_error()),
        }
    }

    fn eof_error(&self) -> ParseError {
        let end = self.src.len();
        lexer::error(self.src, end, end, ParseErrorKind::Syntactic, "unexpected end of input")
    }

    pub(super) fn error_at(&self, s: &Spanned, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        lexer::error(self.src, s.start, s.end, kind, message)
    }

    pub(super) fn expect(&mut self, want: &Tok, what: &str) -> Result<Spanned, ParseError> {
        let s = self.next()?;
        if &s.tok == want {
            Ok(s)
        } else {
            Err(self.error_at(
                &s,
                ParseErrorKind::Syntactic,
                format!("expected {what}, found {}", s.tok.describe()),
            ))
        }
    }

    pub(super) fn prefix_directive(&mut self) -> Result<(), ParseError> {
        self.next()?;
        let name = self.next()?;
        let Tok::PName { prefix, local } = &name.tok else {
            return Err(self.error_at(&name, ParseErrorKind::Syntactic, "expected a prefix name like `ex:`"));
        };
        if !local.is_empty() {
            return Err(self.error_at(&name, ParseErrorKind::Syntactic, "prefix name must end with `:`"));
        }
        let iri = self.next()?;
        let Tok::IriRef(ns) = &iri.tok else {
            return Err(self.error_at(&iri, ParseErrorKind::Syntactic, "expected `<namespace IRI>`"));
        };
        self.prefixes.insert(prefix.clone(), ns.clone());
        self.expect(&Tok::Dot, "`.` after prefix directive")?;
        Ok(())
    }

    pub(super) fn resolve(&self, s: &Spanned, prefix: &str, local: &str) -> Result<Constant, ParseError> {
        match self.prefixes.namespace(prefix) {
            Some(ns) => Ok(Constant::iri(format!("{ns}{local}"))),
            None => Err(self.error_at(s, ParseErrorKind::Syntactic, format!("undefined prefix `{prefix}:`"))),
        }
    }

    /// A literal token, plus an optional `^^datatype`.
    pub(super) fn literal(&mut self, value: String, language: Option<String>) -> Result<Constant, ParseError> {
        let datatype = if self.peek() == Some(&Tok::DatatypeMark) {
            self.next()?;
            let dt = self.next()?;
            match &dt.tok {
                Tok::IriRef(i) => Some(i.clone()),
                Tok::PName { prefix, local } => match self.resolve(&dt, prefix, local)? {
                    Constant::Iri(i) => Some(i.to_string()),
                    Constant::Literal(_) => unreachable!(),
                },
                _ => return Err(self.error_at(&dt, ParseErrorKind::Syntactic, "expected a datatype IRI")),
            }
        } else {
            None
        };
        Ok(Constant::Literal(Literal {
            value: value.into(),
            language: language.map(Into::into),
            datatype: datatype.map(Into::into),
        }))
    }

    fn document(&mut self) -> Result<Formula, ParseError> {
        let mut formula = Formula::default();
        while let Some(tok) = self.peek() {
            match tok {
                Tok::PrefixKw => self.prefix_directive()?,
                Tok::LBrace => {
                    let rule = self.implication()?;
                    formula.push(rule);
                }
                _ => {
                    let (triple, located) = self.triple()?;
                    if let Some(u) = located.iter().find(|l| l.term.is_universal()) {
                        return Err(lexer::error(
                            self.src,
                            u.start,
                            u.end,
                            ParseErrorKind::WellFormedness,
                            format!("universal variable {} outside of a rule", u.term),
                        ));
                    }
                    self.expect(&Tok::Dot, "`.` after triple")?;
                    formula.push(triple);
                }
            }
        }
        Ok(formula)
    }

    fn implication(&mut self) -> Result<Implication, ParseError> {
        let (body, _) = self.expression()?;
        self.expect(&Tok::Implies, "`=>`")?;
        let (head, head_terms) = self.expression()?;
        self.expect(&Tok::Dot, "`.` after rule")?;
        let bound: BTreeSet<&N3Term> = body.universals_iter().collect();
        if let Some(u) = head_terms
            .iter()
            .find(|l| l.term.is_universal() && !bound.contains(&l.term))
        {
            return Err(lexer::error(
                self.src,
                u.start,
                u.end,
                ParseErrorKind::WellFormedness,
                format!(
                    "rule head introduces universal variable {} that does not occur in the body",
                    u.term
                ),
            ));
        }
        Ok(Implication::new(body, head))
    }

    fn expression(&mut self) -> Result<(Expression, Vec<Located>), ParseError> {
        let open = self.expect(&Tok::LBrace, "`{`")?;
        let mut triples = Vec::new();
        let mut located = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    let close = self.next()?;
                    if triples.is_empty() {
                        return Err(lexer::error(
                            self.src,
                            open.start,
                            close.end,
                            ParseErrorKind::Syntactic,
                            "empty formula `{}` is not allowed",
                        ));
                    }
                    break;
                }
                Some(Tok::LBrace) => {
                    let s = self.next()?;
                    return Err(self.error_at(&s, ParseErrorKind::Syntactic, "nested formulae are not supported"));
                }
                None => return Err(self.eof_error()),
                _ => {
                    let (t, l) = self.triple()?;
                    triples.push(t);
                    located.extend(l);
                    match self.peek() {
                        Some(Tok::Dot) => {
                            self.next()?;
                        }
                        Some(Tok::RBrace) => {}
                        _ => {
                            let s = self.next()?;
                            return Err(self.error_at(
                                &s,
                                ParseErrorKind::Syntactic,
                                format!("expected `.` or `}}`, found {}", s.tok.describe()),
                            ));
                        }
                    }
                }
            }
        }
        let expr = Expression::new(triples).expect("checked non-empty");
        Ok((expr, located))
    }

    fn triple(&mut self) -> Result<(Triple, Vec<Located>), ParseError> {
        let s = self.term(false)?;
        let p = self.term(true)?;
        let o = self.term(false)?;
        let triple = Triple::new(s.term.clone(), p.term.clone(), o.term.clone());
        Ok((triple, vec![s, p, o]))
    }

    fn term(&mut self, predicate_position: bool) -> Result<Located, ParseError> {
        let s = self.next()?;
        let term = match &s.tok {
            Tok::IriRef(i) => N3Term::iri(i),
            Tok::PName { prefix, local } => N3Term::Constant(self.resolve(&s, prefix, local)?),
            Tok::Literal { value, language } => {
                let (v, l) = (value.clone(), language.clone());
                N3Term::Constant(self.literal(v, l)?)
            }
            Tok::Universal(n) => N3Term::universal(n),
            Tok::Blank(n) => N3Term::existential(n),
            Tok::Ident(w) if w == "a" && predicate_position => N3Term::iri(RDF_TYPE),
            Tok::LBrace => {
                return Err(self.error_at(&s, ParseErrorKind::Syntactic, "formulae cannot be used as terms"))
            }
            other => {
                return Err(self.error_at(
                    &s,
                    ParseErrorKind::Syntactic,
                    format!("expected a term, found {}", other.describe()),
                ))
            }
        };
        let end = self.toks[self.pos - 1].end;
        Ok(Located {
            term,
            start: s.start,
            end,
        })
    }
}

trait ExpressionExt {
    fn universals_iter(&self) -> Box<dyn Iterator<Item = &N3Term> + '_>;
}

impl ExpressionExt for Expression {
    fn universals_iter(&self) -> Box<dyn Iterator<Item = &N3Term> + '_> {
        Box::new(self.terms().filter(|t| t.is_universal()))
    }
}

/// Writes `f` with the default prefixes.
pub fn serialize_n3(f: &Formula) -> String {
    serialize_n3_with(f, &PrefixMap::default())
}

/// Writes `f` in the supported N3 surface syntax, compacting IRIs against
/// `prefixes`. Only prefixes that are actually used get declared.
pub fn serialize_n3_with(f: &Formula, prefixes: &PrefixMap) -> String {
    let mut used = BTreeSet::new();
    let mut body = String::new();
    let mut w = TermWriter {
        prefixes,
        used: &mut used,
    };
    for s in f.statements() {
        match s {
            Statement::Atomic(t) => {
                w.triple(&mut body, t);
                body.push_str(" .\n");
            }
            Statement::Implication(r) => {
                body.push_str("{ ");
                for t in r.body.triples() {
                    w.triple(&mut body, t);
                    body.push_str(" . ");
                }
                body.push_str("} => { ");
                for t in r.head.triples() {
                    w.triple(&mut body, t);
                    body.push_str(" . ");
                }
                body.push_str("} .\n");
            }
        }
    }
    let mut out = String::new();
    for p in &used {
        let ns = prefixes.namespace(p).expect("used prefixes are declared");
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    if !used.is_empty() && !body.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}

pub(super) struct TermWriter<'a> {
    pub(super) prefixes: &'a PrefixMap,
    pub(super) used: &'a mut BTreeSet<String>,
}

impl TermWriter<'_> {
    pub(super) fn iri(&mut self, out: &mut String, iri: &str) {
        match self.prefixes.compact(iri) {
            Some((p, local)) => {
                self.used.insert(p.to_string());
                let _ = write!(out, "{p}:{local}");
            }
            None => {
                let _ = write!(out, "<{iri}>");
            }
        }
    }

    pub(super) fn constant(&mut self, out: &mut String, c: &Constant) {
        match c {
            Constant::Iri(i) => self.iri(out, i),
            Constant::Literal(l) => {
                let _ = write!(out, "\"{}\"", crate::model::escape_literal(&l.value));
                if let Some(lang) = &l.language {
                    let _ = write!(out, "@{lang}");
                }
                if let Some(dt) = &l.datatype {
                    out.push_str("^^");
                    self.iri(out, dt);
                }
            }
        }
    }

    fn term(&mut self, out: &mut String, t: &N3Term) {
        match t {
            N3Term::Constant(c) => self.constant(out, c),
            N3Term::Existential(l) => {
                let _ = write!(out, "_:{l}");
            }
            N3Term::Universal(l) => {
                let _ = write!(out, "?{l}");
            }
        }
    }

    fn triple(&mut self, out: &mut String, t: &Triple) {
        self.term(out, &t.subject);
        out.push(' ');
        match &t.predicate {
            N3Term::Constant(Constant::Iri(i)) if &**i == RDF_TYPE => out.push('a'),
            p => self.term(out, p),
        }
        out.push(' ');
        self.term(out, &t.object);
    }
}
