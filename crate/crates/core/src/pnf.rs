//! Piece Normal Form.
//!
//! A formula is split into pieces: maximal groups of top-level conjuncts
//! connected through shared blank nodes. Implications never share blank
//! nodes with anything (their blank nodes are local), so each implication
//! is a piece of its own. Blank nodes in rule bodies are then replaced by
//! fresh universal variables, which leaves the meaning unchanged.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::model::{Expression, Formula, Implication, N3Term, Statement, Substitute, Substitution, Triple};

/// Fresh universals are named `?v0`, `?v1`, ... skipping names already used
/// in the rule.
pub const FRESH_PREFIX: &str = "v";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Piece {
    /// Top-level triples connected by blank nodes, or a single triple.
    Atomic(Vec<Triple>),
    /// A single implication without blank nodes in its body.
    Rule(Implication),
}

impl Piece {
    pub fn is_rule(&self) -> bool {
        matches!(self, Piece::Rule(_))
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Piece::Atomic(ts) => Formula::new(ts.iter().cloned().map(Statement::Atomic).collect()),
            Piece::Rule(r) => Formula::new(vec![Statement::Implication(r.clone())]),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PieceSet {
    pieces: Vec<Piece>,
}

impl PieceSet {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Piece> {
        self.pieces.iter()
    }

    /// The conjunction of all pieces.
    pub fn to_formula(&self) -> Formula {
        self.pieces
            .iter()
            .fold(Formula::default(), |acc, p| acc.conjoin(p.to_formula()))
    }

    /// Total number of triples, a size measure used to check that
    /// normalization stays linear.
    pub fn triple_count(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| match p {
                Piece::Atomic(ts) => ts.len(),
                Piece::Rule(r) => r.body.len() + r.head.len(),
            })
            .sum()
    }
}

impl<'a> IntoIterator for &'a PieceSet {
    type Item = &'a Piece;
    type IntoIter = std::slice::Iter<'a, Piece>;

    fn into_iter(self) -> Self::IntoIter {
        self.pieces.iter()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so piece order is stable
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// The finest partition of the conjuncts of `f` in which conjuncts sharing
/// a blank node stay together. Pieces appear in order of their first
/// conjunct; conjuncts keep their relative order.
pub fn split_pieces(f: &Formula) -> Vec<Formula> {
    group(f)
        .into_iter()
        .map(|idx| Formula::new(idx.into_iter().map(|i| f.statements()[i].clone()).collect()))
        .collect()
}

fn group(f: &Formula) -> Vec<Vec<usize>> {
    let stmts = f.statements();
    let mut uf = UnionFind::new(stmts.len());
    let mut owner: BTreeMap<&N3Term, usize> = BTreeMap::new();
    for (i, s) in stmts.iter().enumerate() {
        for b in s.free_existentials() {
            match owner.get(b) {
                Some(&j) => uf.union(i, j),
                None => {
                    owner.insert(b, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..stmts.len() {
        let root = uf.find(i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Replaces every blank node of the body by a fresh universal variable
/// (one per label, in order of first occurrence). The head is untouched: a
/// head blank node with the same label as a body blank node is a different
/// variable.
pub fn eliminate_body_existentials(r: &Implication) -> Implication {
    let mut body_blanks = Vec::new();
    for t in r.body.terms() {
        if t.is_existential() && !body_blanks.contains(&t) {
            body_blanks.push(t);
        }
    }
    if body_blanks.is_empty() {
        return r.clone();
    }
    let used: BTreeSet<Arc<str>> = r
        .body
        .terms()
        .chain(r.head.terms())
        .filter_map(|t| match t {
            N3Term::Universal(l) => Some(l.clone()),
            _ => None,
        })
        .collect();
    let mut next = 0usize;
    let mut sigma = Substitution::new();
    for b in body_blanks {
        let fresh = loop {
            let name = format!("{FRESH_PREFIX}{next}");
            next += 1;
            if !used.contains(name.as_str()) {
                break name;
            }
        };
        sigma
            .insert(b.clone(), N3Term::universal(fresh))
            .expect("blank nodes are variables");
    }
    let body: Vec<Triple> = r.body.triples().iter().map(|t| t.substitute(&sigma)).collect();
    Implication::new(Expression::new(body).expect("non-empty"), r.head.clone())
}

/// True when no blank node occurs in the body.
pub fn is_normalized(r: &Implication) -> bool {
    r.body.terms().all(|t| !t.is_existential())
}

pub fn to_pnf(f: &Formula) -> PieceSet {
    let stmts = f.statements();
    let pieces = group(f)
        .into_iter()
        .map(|idx| match &stmts[idx[0]] {
            Statement::Implication(r) => {
                debug_assert_eq!(idx.len(), 1);
                Piece::Rule(eliminate_body_existentials(r))
            }
            Statement::Atomic(_) => Piece::Atomic(
                idx.iter()
                    .map(|&i| {
                        stmts[i]
                            .as_atomic()
                            .expect("only atomic statements share blank nodes")
                            .clone()
                    })
                    .collect(),
            ),
        })
        .collect();
    PieceSet { pieces }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_n3;

    fn pnf(src: &str) -> PieceSet {
        to_pnf(&parse_n3(src).unwrap())
    }

    #[test]
    fn connected_triples_form_one_piece() {
        let p = pnf(":lucy :knows _:y. _:y :likes :cake.");
        assert_eq!(p.len(), 1);
        assert!(matches!(&p.pieces()[0], Piece::Atomic(ts) if ts.len() == 2));
    }

    #[test]
    fn disjoint_blanks_split() {
        assert_eq!(pnf(":a :p _:x. :b :q _:y.").len(), 2);
        assert_eq!(pnf(":a :p :b. :a :p :c. :a :p :d.").len(), 3);
        assert_eq!(pnf(":a :p _:x. :b :q :c. _:x :q :d.").len(), 2);
    }

    #[test]
    fn transitive_sharing() {
        let p = pnf(":a :p _:x. _:y :q :c. _:x :r _:y.");
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn rule_blank_with_same_label_is_separate() {
        let p = pnf(":lucy :knows _:y. {?x :knows :tom}=>{?x :knows _:y}.");
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn body_blanks_become_fresh_universals() {
        let p = pnf("{_:x :likes :cake}=>{:cake :is :good}.");
        let expected = parse_n3("{?v0 :likes :cake}=>{:cake :is :good}.").unwrap();
        assert_eq!(p.to_formula(), expected);

        let p = pnf("{_:x :p _:x}=>{:a :b :c}.");
        assert_eq!(p.to_formula(), parse_n3("{?v0 :p ?v0}=>{:a :b :c}.").unwrap());

        // existing names are skipped, head blanks are kept
        let p = pnf("{_:x :p ?v0. _:y :q ?v0}=>{?v0 :r _:x}.");
        assert_eq!(
            p.to_formula(),
            parse_n3("{?v1 :p ?v0. ?v2 :q ?v0}=>{?v0 :r _:x}.").unwrap()
        );
    }

    #[test]
    fn already_normalized_rule_is_unchanged() {
        let src = "{?x :knows :tom}=>{?x :knows _:y. _:y :name \"Tom\"}.";
        assert_eq!(pnf(src).to_formula(), parse_n3(src).unwrap());
    }

    #[test]
    fn empty_formula() {
        assert!(pnf("").is_empty());
    }
}
