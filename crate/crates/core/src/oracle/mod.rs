//! Finite-universe semantics of existential N3.
//!
//! Interpretations are Herbrand-style: the domain is a finite set of
//! constants, every constant names itself, and an interpretation is just a
//! set of triples over the domain. Quantifiers range over the domain.
//!
//! Two formulae are compared over every interpretation of a universe,
//! either by enumerating all `2^(n³)` triple sets or symbolically with a
//! SAT solver that searches for a distinguishing interpretation.

mod sat;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Constant, Formula, N3Term, Statement, Triple};

/// Spare constants are minted in this namespace.
pub const SPARE_NS: &str = "urn:n3ex:spare:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("constant {0} is not in the universe")]
    ConstantOutsideUniverse(String),
    #[error("enumerating interpretations needs 2^{required} cases, budget is 2^{budget}")]
    EnumerationBudget { required: usize, budget: usize },
    #[error("symbolic check needs about {required} clauses, budget is {budget}")]
    ClauseBudget { required: usize, budget: usize },
}

/// A finite, sorted set of constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    constants: Vec<Constant>,
}

impl Universe {
    pub fn new(constants: impl IntoIterator<Item = Constant>) -> Self {
        let set: BTreeSet<Constant> = constants.into_iter().collect();
        Universe {
            constants: set.into_iter().collect(),
        }
    }

    /// The constants of all formulae plus `spares` constants none of them
    /// mentions.
    pub fn for_formulas(formulas: &[&Formula], spares: usize) -> Self {
        let mut set: BTreeSet<Constant> = formulas.iter().flat_map(|f| f.constants()).collect();
        let mut k = 0;
        let mut added = 0;
        while added < spares {
            let c = Constant::iri(format!("{SPARE_NS}{k}"));
            k += 1;
            if set.insert(c) {
                added += 1;
            }
        }
        Universe {
            constants: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }

    pub fn constants(&self) -> &[Constant] {
        &self.constants
    }

    pub fn index_of(&self, c: &Constant) -> Option<usize> {
        self.constants.binary_search(c).ok()
    }
}

/// A set of triples over a universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInterpretation {
    universe: Universe,
    bits: Vec<bool>,
}

impl FiniteInterpretation {
    pub fn empty(universe: Universe) -> Self {
        let n = universe.len();
        FiniteInterpretation {
            universe,
            bits: vec![false; n * n * n],
        }
    }

    /// Interpretation number `mask` in the enumeration order: bit
    /// `s·n² + p·n + o` says whether `(s, p, o)` holds.
    pub fn from_mask(universe: Universe, mask: u64) -> Self {
        let mut m = FiniteInterpretation::empty(universe);
        for (i, b) in m.bits.iter_mut().enumerate() {
            *b = i < 64 && mask >> i & 1 == 1;
        }
        m
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn insert(&mut self, s: &Constant, p: &Constant, o: &Constant) -> Result<bool, OracleError> {
        let i = self.slot(s, p, o)?;
        Ok(!std::mem::replace(&mut self.bits[i], true))
    }

    pub fn contains(&self, s: &Constant, p: &Constant, o: &Constant) -> bool {
        self.slot(s, p, o).is_ok_and(|i| self.bits[i])
    }

    fn slot(&self, s: &Constant, p: &Constant, o: &Constant) -> Result<usize, OracleError> {
        let idx = |c: &Constant| {
            self.universe
                .index_of(c)
                .ok_or_else(|| OracleError::ConstantOutsideUniverse(c.to_string()))
        };
        let n = self.universe.len();
        Ok(idx(s)? * n * n + idx(p)? * n + idx(o)?)
    }

    pub(crate) fn holds(&self, s: usize, p: usize, o: usize) -> bool {
        let n = self.universe.len();
        self.bits[s * n * n + p * n + o]
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triples(&self) -> impl Iterator<Item = (&Constant, &Constant, &Constant)> {
        let n = self.universe.len();
        let c = &self.universe.constants;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (&c[i / (n * n)], &c[i / n % n], &c[i % n]))
    }

    /// The interpretation as a ground N3 document.
    pub fn to_formula(&self) -> Formula {
        Formula::new(
            self.triples()
                .map(|(s, p, o)| {
                    Statement::Atomic(Triple::new(
                        N3Term::Constant(s.clone()),
                        N3Term::Constant(p.clone()),
                        N3Term::Constant(o.clone()),
                    ))
                })
                .collect(),
        )
    }
}

impl fmt::Display for FiniteInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, p, o)) in self.triples().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " ({s}, {p}, {o})")?;
        }
        write!(f, " }}")
    }
}

/// Term of a compiled formula: a universe index or a variable slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum T {
    C(usize),
    V(usize),
}

pub(crate) type ITriple = [T; 3];

/// An implication with its own variable numbering: universals first, then
/// body blank nodes, then head blank nodes.
#[derive(Debug, Clone)]
pub(crate) struct IRule {
    pub(crate) body: Vec<ITriple>,
    pub(crate) head: Vec<ITriple>,
    pub(crate) universals: usize,
    pub(crate) body_blanks: usize,
    pub(crate) head_blanks: usize,
}

impl IRule {
    fn nvars(&self) -> usize {
        self.universals + self.body_blanks + self.head_blanks
    }
}

/// Top-level triples over the free blank nodes `0..free`, and rules.
#[derive(Debug, Clone)]
pub(crate) struct IFormula {
    pub(crate) atoms: Vec<ITriple>,
    pub(crate) free: usize,
    pub(crate) rules: Vec<IRule>,
}

struct Numbering {
    labels: Vec<N3Term>,
    offset: usize,
}

impl Numbering {
    fn new(offset: usize) -> Self {
        Numbering {
            labels: Vec::new(),
            offset,
        }
    }

    fn id(&mut self, t: &N3Term) -> usize {
        let i = match self.labels.iter().position(|l| l == t) {
            Some(i) => i,
            None => {
                self.labels.push(t.clone());
                self.labels.len() - 1
            }
        };
        i + self.offset
    }
}

pub(crate) fn compile(f: &Formula, u: &Universe) -> Result<IFormula, OracleError> {
    let constant = |c: &Constant| {
        u.index_of(c)
            .map(T::C)
            .ok_or_else(|| OracleError::ConstantOutsideUniverse(c.to_string()))
    };
    let mut free = Numbering::new(0);
    let mut atoms = Vec::new();
    for t in f.triples() {
        let mut it = [T::C(0); 3];
        for (k, x) in t.terms().into_iter().enumerate() {
            it[k] = match x {
                N3Term::Constant(c) => constant(c)?,
                // top-level universals do not occur in valid formulae; treat
                // them like the document-level variables they would have to be
                N3Term::Existential(_) | N3Term::Universal(_) => T::V(free.id(x)),
            };
        }
        atoms.push(it);
    }
    let mut rules = Vec::new();
    for r in f.implications() {
        let mut univ = Numbering::new(0);
        for t in r.body.terms().chain(r.head.terms()).filter(|t| t.is_universal()) {
            univ.id(t);
        }
        let nu = univ.labels.len();
        let mut bb = Numbering::new(nu);
        for t in r.body.terms().filter(|t| t.is_existential()) {
            bb.id(t);
        }
        let nb = bb.labels.len();
        let mut hb = Numbering::new(nu + nb);
        let mut part = |ts: &[Triple], blanks: &mut Numbering| -> Result<Vec<ITriple>, OracleError> {
            ts.iter()
                .map(|t| {
                    let mut it = [T::C(0); 3];
                    for (k, x) in t.terms().into_iter().enumerate() {
                        it[k] = match x {
                            N3Term::Constant(c) => constant(c)?,
                            N3Term::Universal(_) => T::V(univ.id(x)),
                            N3Term::Existential(_) => T::V(blanks.id(x)),
                        };
                    }
                    Ok(it)
                })
                .collect()
        };
        let body = part(r.body.triples(), &mut bb)?;
        let head = part(r.head.triples(), &mut hb)?;
        rules.push(IRule {
            body,
            head,
            universals: nu,
            body_blanks: nb,
            head_blanks: hb.labels.len(),
        });
    }
    Ok(IFormula {
        atoms,
        free: free.labels.len(),
        rules,
    })
}

/// Calls `f` on every assignment (extending `asg`) under which all
/// `triples` hold in `m`; stops when `f` returns false. Returns false if
/// stopped.
fn for_each_solution(
    m: &FiniteInterpretation,
    triples: &[ITriple],
    asg: &mut [Option<usize>],
    f: &mut dyn FnMut(&mut [Option<usize>]) -> bool,
) -> bool {
    let Some((first, rest)) = triples.split_first() else {
        return f(asg);
    };
    let n = m.universe.len();
    let mut open: Vec<usize> = Vec::new();
    for t in first {
        if let T::V(v) = *t {
            if asg[v].is_none() && !open.contains(&v) {
                open.push(v);
            }
        }
    }
    let value = |t: T, asg: &[Option<usize>]| match t {
        T::C(c) => c,
        T::V(v) => asg[v].expect("assigned"),
    };
    let mut digits = vec![0usize; open.len()];
    let mut keep_going = true;
    'outer: loop {
        for (v, d) in open.iter().zip(&digits) {
            asg[*v] = Some(*d);
        }
        if m.holds(value(first[0], asg), value(first[1], asg), value(first[2], asg))
            && !for_each_solution(m, rest, asg, f)
        {
            keep_going = false;
            break 'outer;
        }
        // next combination
        let mut k = digits.len();
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < n {
                break;
            }
            digits[k] = 0;
        }
    }
    for v in &open {
        asg[*v] = None;
    }
    keep_going
}

fn exists(m: &FiniteInterpretation, triples: &[ITriple], asg: &mut [Option<usize>]) -> bool {
    !for_each_solution(m, triples, asg, &mut |_| false)
}

fn rule_holds(m: &FiniteInterpretation, r: &IRule) -> bool {
    let n = m.universe.len();
    let mut asg = vec![None; r.nvars()];
    for_each_solution(m, &r.body, &mut asg, &mut |asg| {
        // universals that only occur in the head range over everything
        let open: Vec<usize> = (0..r.universals).filter(|&v| asg[v].is_none()).collect();
        let mut digits = vec![0usize; open.len()];
        let ok = loop {
            for (v, d) in open.iter().zip(&digits) {
                asg[*v] = Some(*d);
            }
            if !exists(m, &r.head, asg) {
                break false;
            }
            let mut k = digits.len();
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < n {
                    break false;
                }
                digits[k] = 0;
            };
            if done {
                break true;
            }
        };
        for v in &open {
            asg[*v] = None;
        }
        ok
    })
}

pub(crate) fn eval(m: &FiniteInterpretation, f: &IFormula) -> bool {
    f.rules.iter().all(|r| rule_holds(m, r)) && exists(m, &f.atoms, &mut vec![None; f.free])
}

/// `M ⊨ f`: some assignment of the document's blank nodes makes every
/// top-level triple true, and every implication holds for all assignments
/// of its universals.
pub fn satisfies(m: &FiniteInterpretation, f: &Formula) -> Result<bool, OracleError> {
    Ok(eval(m, &compile(f, &m.universe)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Enumerate when the universe is tiny, otherwise symbolic.
    #[default]
    Auto,
    Enumerate,
    Symbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Constants added beyond the mentioned ones.
    pub spares: usize,
    pub method: Method,
    /// Largest `n³` the enumeration accepts.
    pub max_enumeration_bits: usize,
    pub max_clauses: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            spares: 2,
            method: Method::Auto,
            max_enumeration_bits: 27,
            max_clauses: 20_000_000,
        }
    }
}

/// Auto switches to the solver above this many triple slots.
const AUTO_ENUMERATION_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// An interpretation satisfying exactly one of the two formulae.
    Different(FiniteInterpretation),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

/// Compares `f` and `g` over the constants they mention plus
/// `cfg.spares` fresh ones.
pub fn n3_equivalent(f: &Formula, g: &Formula, cfg: &OracleConfig) -> Result<Equivalence, OracleError> {
    let u = Universe::for_formulas(&[f, g], cfg.spares);
    n3_equivalent_in(f, g, &u, cfg)
}

/// Compares `f` and `g` over every interpretation of `universe`.
pub fn n3_equivalent_in(
    f: &Formula,
    g: &Formula,
    universe: &Universe,
    cfg: &OracleConfig,
) -> Result<Equivalence, OracleError> {
    let cf = compile(f, universe)?;
    let cg = compile(g, universe)?;
    let bits = universe.len().pow(3);
    let method = match cfg.method {
        Method::Auto if bits <= AUTO_ENUMERATION_BITS => Method::Enumerate,
        Method::Auto => Method::Symbolic,
        m => m,
    };
    match method {
        Method::Enumerate => enumerate(&cf, &cg, universe, bits, cfg.max_enumeration_bits),
        _ => sat::equivalent(&cf, &cg, universe, cfg.max_clauses),
    }
}

fn enumerate(
    f: &IFormula,
    g: &IFormula,
    universe: &Universe,
    bits: usize,
    budget: usize,
) -> Result<Equivalence, OracleError> {
    if bits > budget.min(63) {
        return Err(OracleError::EnumerationBudget { required: bits, budget });
    }
    let mut m = FiniteInterpretation::empty(universe.clone());
    for mask in 0u64..1 << bits {
        for (i, b) in m.bits.iter_mut().enumerate() {
            *b = mask >> i & 1 == 1;
        }
        if eval(&m, f) != eval(&m, g) {
            return Ok(Equivalence::Different(m));
        }
    }
    Ok(Equivalence::Equivalent)
}
