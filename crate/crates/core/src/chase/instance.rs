use std::fmt;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::ChaseError;
use crate::model::Constant;
use crate::rules::{Atom, RuleTerm};

/// A labeled null, `_:n<k>` when written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NullId(pub u32);

impl fmt::Display for NullId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:n{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundTerm {
    Constant(Constant),
    Null(NullId),
}

impl GroundTerm {
    pub fn as_constant(&self) -> Option<&Constant> {
        match self {
            GroundTerm::Constant(c) => Some(c),
            GroundTerm::Null(_) => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, GroundTerm::Null(_))
    }
}

impl From<Constant> for GroundTerm {
    fn from(c: Constant) -> Self {
        GroundTerm::Constant(c)
    }
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTerm::Constant(c) => c.fmt(f),
            GroundTerm::Null(n) => n.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: Arc<str>,
    pub args: Vec<GroundTerm>,
}

impl GroundAtom {
    pub fn new(predicate: impl AsRef<str>, args: Vec<GroundTerm>) -> Self {
        GroundAtom {
            predicate: Arc::from(predicate.as_ref()),
            args,
        }
    }

    /// `None` if the atom has variables.
    pub fn from_atom(atom: &Atom) -> Option<Self> {
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                RuleTerm::Constant(c) => Some(GroundTerm::Constant(c.clone())),
                RuleTerm::Variable(_) => None,
            })
            .collect::<Option<_>>()?;
        Some(GroundAtom {
            predicate: atom.predicate.clone(),
            args,
        })
    }

    pub fn has_nulls(&self) -> bool {
        self.args.iter().any(GroundTerm::is_null)
    }
}

impl fmt::Display for GroundAtom {
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

/// Interned term: constants count up from 0, nulls carry the high bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Tid(u32);

const NULL_BIT: u32 = 1 << 31;

impl Tid {
    fn null(n: NullId) -> Tid {
        Tid(n.0 | NULL_BIT)
    }

    pub(crate) fn as_null(self) -> Option<NullId> {
        (self.0 & NULL_BIT != 0).then_some(NullId(self.0 & !NULL_BIT))
    }
}

/// Rows of one predicate, stored flat, with a hash set for membership and
/// one term index per argument position.
#[derive(Debug, Clone)]
pub(crate) struct Relation {
    pub(crate) arity: usize,
    data: Vec<Tid>,
    rows: usize,
    set: FxHashSet<Box<[Tid]>>,
    index: Vec<FxHashMap<Tid, Vec<u32>>>,
}

impl Relation {
    fn new(arity: usize) -> Self {
        Relation {
            arity,
            data: Vec::new(),
            rows: 0,
            set: FxHashSet::default(),
            index: vec![FxHashMap::default(); arity],
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.rows
    }

    pub(crate) fn row(&self, i: usize) -> &[Tid] {
        &self.data[i * self.arity..(i + 1) * self.arity]
    }

    pub(crate) fn contains(&self, row: &[Tid]) -> bool {
        self.set.contains(row)
    }

    /// Row numbers holding `t` at `pos`, ascending.
    pub(crate) fn with_term(&self, pos: usize, t: Tid) -> &[u32] {
        self.index[pos].get(&t).map_or(&[], Vec::as_slice)
    }

    fn insert(&mut self, row: &[Tid]) -> bool {
        debug_assert_eq!(row.len(), self.arity);
        if self.set.contains(row) {
            return false;
        }
        self.set.insert(row.into());
        let id = u32::try_from(self.rows).expect("relation too large");
        for (pos, t) in row.iter().enumerate() {
            self.index[pos].entry(*t).or_default().push(id);
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        true
    }
}

/// A finite set of ground atoms over constants and labeled nulls. Atoms
/// keep their insertion order, which makes every traversal deterministic.
#[derive(Debug, Clone, Default)]
pub struct Instance {
    consts: Vec<Constant>,
    const_ids: FxHashMap<Constant, u32>,
    preds: Vec<Arc<str>>,
    pred_ids: FxHashMap<Arc<str>, usize>,
    rels: Vec<Relation>,
    next_null: u32,
    len: usize,
}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    /// A database from ground rule atoms (facts).
    pub fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Result<Self, ChaseError> {
        let mut inst = Instance::new();
        for a in atoms {
            let g = GroundAtom::from_atom(a).ok_or_else(|| ChaseError::NonGroundFact(a.to_string()))?;
            inst.insert(&g)?;
        }
        Ok(inst)
    }

    pub fn from_ground_atoms<'a>(atoms: impl IntoIterator<Item = &'a GroundAtom>) -> Result<Self, ChaseError> {
        let mut inst = Instance::new();
        for a in atoms {
            inst.insert(a)?;
        }
        Ok(inst)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of nulls handed out so far; every null in the instance has a
    /// smaller id.
    pub fn null_count(&self) -> u32 {
        self.next_null
    }

    pub fn fresh_null(&mut self) -> NullId {
        let n = NullId(self.next_null);
        assert!(self.next_null < NULL_BIT - 1, "null space exhausted");
        self.next_null += 1;
        n
    }

    pub fn insert(&mut self, atom: &GroundAtom) -> Result<bool, ChaseError> {
        let rel = self.relation_id(&atom.predicate, atom.args.len())?;
        let row: Vec<Tid> = atom.args.iter().map(|t| self.intern(t)).collect();
        Ok(self.insert_row(rel, &row))
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        let Some(&rel) = self.pred_ids.get(&atom.predicate) else {
            return false;
        };
        if self.rels[rel].arity != atom.args.len() {
            return false;
        }
        let row: Option<Vec<Tid>> = atom.args.iter().map(|t| self.lookup(t)).collect();
        row.is_some_and(|r| self.rels[rel].contains(&r))
    }

    /// Predicates with their arities, in first-seen order.
    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.preds.iter().zip(&self.rels).map(|(p, r)| (&**p, r.arity))
    }

    /// All atoms, grouped by predicate in first-seen order.
    pub fn atoms(&self) -> impl Iterator<Item = GroundAtom> + '_ {
        (0..self.rels.len()).flat_map(move |r| self.rel_atoms(r))
    }

    pub fn atoms_of<'a>(&'a self, predicate: &str) -> impl Iterator<Item = GroundAtom> + 'a {
        self.pred_ids
            .get(predicate)
            .into_iter()
            .flat_map(move |&r| self.rel_atoms(r))
    }

    pub fn count_of(&self, predicate: &str) -> usize {
        self.pred_ids.get(predicate).map_or(0, |&r| self.rels[r].len())
    }

    /// Atoms in sorted order, for stable output and comparisons.
    pub fn sorted_atoms(&self) -> Vec<GroundAtom> {
        let mut v: Vec<_> = self.atoms().collect();
        v.sort();
        v
    }

    fn rel_atoms(&self, r: usize) -> impl Iterator<Item = GroundAtom> + '_ {
        let rel = &self.rels[r];
        (0..rel.len()).map(move |i| GroundAtom {
            predicate: self.preds[r].clone(),
            args: rel.row(i).iter().map(|&t| self.term(t)).collect(),
        })
    }

    pub(crate) fn term(&self, t: Tid) -> GroundTerm {
        match t.as_null() {
            Some(n) => GroundTerm::Null(n),
            None => GroundTerm::Constant(self.consts[t.0 as usize].clone()),
        }
    }

    pub(crate) fn intern(&mut self, t: &GroundTerm) -> Tid {
        match t {
            GroundTerm::Constant(c) => self.intern_constant(c),
            GroundTerm::Null(n) => {
                self.next_null = self.next_null.max(n.0 + 1);
                Tid::null(*n)
            }
        }
    }

    pub(crate) fn intern_constant(&mut self, c: &Constant) -> Tid {
        if let Some(&id) = self.const_ids.get(c) {
            return Tid(id);
        }
        let id = u32::try_from(self.consts.len())
            .ok()
            .filter(|&i| i < NULL_BIT)
            .expect("too many constants");
        self.consts.push(c.clone());
        self.const_ids.insert(c.clone(), id);
        Tid(id)
    }

    pub(crate) fn null_tid(n: NullId) -> Tid {
        Tid::null(n)
    }

    pub(crate) fn lookup(&self, t: &GroundTerm) -> Option<Tid> {
        match t {
            GroundTerm::Constant(c) => self.lookup_constant(c),
            GroundTerm::Null(n) => Some(Tid::null(*n)),
        }
    }

    pub(crate) fn lookup_constant(&self, c: &Constant) -> Option<Tid> {
        self.const_ids.get(c).map(|&i| Tid(i))
    }

    pub(crate) fn relation_id(&mut self, predicate: &Arc<str>, arity: usize) -> Result<usize, ChaseError> {
        if let Some(&r) = self.pred_ids.get(predicate) {
            let expected = self.rels[r].arity;
            if expected != arity {
                return Err(ChaseError::ArityMismatch {
                    predicate: predicate.to_string(),
                    expected,
                    found: arity,
                });
            }
            return Ok(r);
        }
        let r = self.rels.len();
        self.preds.push(predicate.clone());
        self.pred_ids.insert(predicate.clone(), r);
        self.rels.push(Relation::new(arity));
        Ok(r)
    }

    pub(crate) fn find_relation(&self, predicate: &str, arity: usize) -> Option<usize> {
        self.pred_ids
            .get(predicate)
            .copied()
            .filter(|&r| self.rels[r].arity == arity)
    }

    pub(crate) fn relation(&self, r: usize) -> &Relation {
        &self.rels[r]
    }

    pub(crate) fn relation_count(&self) -> usize {
        self.rels.len()
    }

    pub(crate) fn insert_row(&mut self, rel: usize, row: &[Tid]) -> bool {
        let added = self.rels[rel].insert(row);
        if added {
            self.len += 1;
        }
        added
    }
}

impl PartialEq for Instance {
    /// Same set of atoms.
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.atoms().all(|a| other.contains(&a))
    }
}

impl Eq for Instance {}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.sorted_atoms() {
            writeln!(f, "{a} .")?;
        }
        Ok(())
    }
}
