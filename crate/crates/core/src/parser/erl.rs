use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::lexer::{self, tokenize, Dialect, Spanned, Tok};
use super::n3::{Parser, TermWriter};
use super::{is_local_name, ParseError, ParseErrorKind, PrefixMap};
use crate::model::Constant;
use crate::rules::{Atom, ExRule, RuleError, RuleSet, RuleTerm, Variable};

/// A parsed rule file together with the prefixes it declared.
#[derive(Debug, Clone)]
pub struct RulesDocument {
    pub rules: RuleSet,
    pub prefixes: PrefixMap,
}

pub fn parse_rules(src: &str) -> Result<RuleSet, ParseError> {
    parse_rules_document(src).map(|d| d.rules)
}

/// Parses a rule file. Each statement is `body -> head .`, `-> head .` or
/// a comma-separated list of atoms ended by `.`, which is read as a rule
/// with an empty body.
pub fn parse_rules_document(src: &str) -> Result<RulesDocument, ParseError> {
    let toks = tokenize(src, Dialect::Rules)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        prefixes: PrefixMap::default(),
    };
    let mut rules = Vec::new();
    let mut atom_spans = Vec::new();
    while let Some(tok) = p.peek() {
        if tok == &Tok::PrefixKw {
            p.prefix_directive()?;
            continue;
        }
        let mut body = Vec::new();
        let mut vars = Vec::new();
        if tok != &Tok::Arrow {
            body = atom_list(&mut p, &mut vars, &mut atom_spans)?;
        }
        let head = if p.peek() == Some(&Tok::Arrow) {
            p.next()?;
            let split = vars.len();
            let head = atom_list(&mut p, &mut vars, &mut atom_spans)?;
            // positions of head variables start at `split`
            vars[..split].iter_mut().for_each(|v| v.2 = false);
            vars[split..].iter_mut().for_each(|v| v.2 = true);
            head
        } else {
            vars.iter_mut().for_each(|v| v.2 = true);
            std::mem::take(&mut body)
        };
        let end = p.expect(&Tok::Dot, "`.` at the end of the rule")?;
        match ExRule::new(body, head) {
            Ok(r) => rules.push(r),
            Err(e) => return Err(rule_error(&p, &e, &vars, end.end)),
        }
    }
    match RuleSet::new(rules) {
        Ok(rules) => Ok(RulesDocument {
            rules,
            prefixes: p.prefixes,
        }),
        Err(e) => {
            let RuleError::ArityMismatch { predicate, .. } = &e else {
                unreachable!("rule sets only check arities")
            };
            let mut first = BTreeMap::new();
            let (_, _, s) = atom_spans
                .iter()
                .find(|(name, arity, _)| *first.entry(name.clone()).or_insert(*arity) != *arity && name == predicate)
                .expect("mismatching atom was parsed");
            Err(p.error_at(s, ParseErrorKind::WellFormedness, e.to_string()))
        }
    }
}

/// `(variable, token, in head)`
type VarOccurrence = (Variable, Spanned, bool);

fn rule_error(p: &Parser<'_>, e: &RuleError, vars: &[VarOccurrence], end: usize) -> ParseError {
    let find = |name: &str, existential: bool, in_head: bool| {
        vars.iter()
            .find(|(v, _, h)| &*v.name == name && v.is_existential() == existential && *h == in_head)
            .map(|(_, s, _)| s)
    };
    let at = match e {
        RuleError::ExistentialInBody(n) => find(n, true, false),
        RuleError::UnsafeHeadVariable(n) => find(n, false, true),
        _ => None,
    };
    match at {
        Some(s) => p.error_at(s, ParseErrorKind::WellFormedness, e.to_string()),
        None => lexer::error(
            p.src,
            end.saturating_sub(1),
            end,
            ParseErrorKind::WellFormedness,
            e.to_string(),
        ),
    }
}

fn atom_list(
    p: &mut Parser<'_>,
    vars: &mut Vec<VarOccurrence>,
    spans: &mut Vec<(String, usize, Spanned)>,
) -> Result<Vec<Atom>, ParseError> {
    let mut atoms = vec![atom(p, vars, spans)?];
    while p.peek() == Some(&Tok::Comma) {
        p.next()?;
        atoms.push(atom(p, vars, spans)?);
    }
    Ok(atoms)
}

fn atom(
    p: &mut Parser<'_>,
    vars: &mut Vec<VarOccurrence>,
    spans: &mut Vec<(String, usize, Spanned)>,
) -> Result<Atom, ParseError> {
    let name = p.next()?;
    let predicate = match &name.tok {
        Tok::Ident(n) => n.clone(),
        Tok::PName { prefix, local } => match p.resolve(&name, prefix, local)? {
            Constant::Iri(i) => i.to_string(),
            Constant::Literal(_) => unreachable!(),
        },
        Tok::IriRef(i) => i.clone(),
        other => {
            return Err(p.error_at(
                &name,
                ParseErrorKind::Syntactic,
                format!("expected a predicate name, found {}", other.describe()),
            ))
        }
    };
    p.expect(&Tok::LParen, "`(`")?;
    let mut args = Vec::new();
    if p.peek() == Some(&Tok::RParen) {
        p.next()?;
    } else {
        loop {
            args.push(argument(p, vars)?);
            let s = p.next()?;
            match &s.tok {
                Tok::Comma => {}
                Tok::RParen => break,
                other => {
                    return Err(p.error_at(
                        &s,
                        ParseErrorKind::Syntactic,
                        format!("expected `,` or `)`, found {}", other.describe()),
                    ))
                }
            }
        }
    }
    let end = p.toks[p.pos - 1].end;
    spans.push((
        predicate.clone(),
        args.len(),
        Spanned {
            tok: name.tok.clone(),
            start: name.start,
            end,
        },
    ));
    Ok(Atom::new(predicate, args))
}

fn argument(p: &mut Parser<'_>, vars: &mut Vec<VarOccurrence>) -> Result<RuleTerm, ParseError> {
    let s = p.next()?;
    let term = match &s.tok {
        Tok::Universal(n) => {
            let v = Variable::universal(n);
            vars.push((v.clone(), s.clone(), false));
            RuleTerm::Variable(v)
        }
        Tok::Bang(n) => {
            let v = Variable::existential(n);
            vars.push((v.clone(), s.clone(), false));
            RuleTerm::Variable(v)
        }
        Tok::Ident(n) => RuleTerm::Constant(Constant::example(n)),
        Tok::PName { prefix, local } => RuleTerm::Constant(p.resolve(&s, prefix, local)?),
        Tok::IriRef(i) => RuleTerm::Constant(Constant::iri(i)),
        Tok::Literal { value, language } => {
            let (v, l) = (value.clone(), language.clone());
            RuleTerm::Constant(p.literal(v, l)?)
        }
        other => {
            return Err(p.error_at(
                &s,
                ParseErrorKind::Syntactic,
                format!("expected a term, found {}", other.describe()),
            ))
        }
    };
    Ok(term)
}

pub fn serialize_rules(rules: &RuleSet) -> String {
    serialize_rules_with(rules, &PrefixMap::default())
}

/// Writes one rule per line. Facts are written without an arrow,
/// body-less rules with existentials as `-> head .`.
pub fn serialize_rules_with(rules: &RuleSet, prefixes: &PrefixMap) -> String {
    let mut used = BTreeSet::new();
    let mut body = String::new();
    let mut w = TermWriter {
        prefixes,
        used: &mut used,
    };
    for r in rules.rules() {
        if r.is_fact() {
            atoms(&mut w, &mut body, r.head());
        } else {
            if !r.body().is_empty() {
                atoms(&mut w, &mut body, r.body());
                body.push(' ');
            }
            body.push_str("-> ");
            atoms(&mut w, &mut body, r.head());
        }
        body.push_str(" .\n");
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

fn atoms(w: &mut TermWriter<'_>, out: &mut String, list: &[Atom]) {
    for (i, a) in list.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        if is_local_name(&a.predicate) && !a.predicate.contains('.') {
            out.push_str(&a.predicate);
        } else {
            w.iri(out, &a.predicate);
        }
        out.push('(');
        for (k, t) in a.args.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            match t {
                RuleTerm::Constant(c) => w.constant(out, c),
                RuleTerm::Variable(v) => {
                    let _ = write!(out, "{v}");
                }
            }
        }
        out.push(')');
    }
}
