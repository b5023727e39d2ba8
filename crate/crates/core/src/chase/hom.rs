//! Backtracking search for homomorphisms from atom patterns into an
//! instance, and the public homomorphism API built on it.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::instance::{GroundTerm, Instance, NullId, Tid};
use crate::rules::{Atom, RuleTerm, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Const(Tid),
    Var(usize),
}

/// One atom to be matched. `rel` is `None` when the predicate or one of
/// the constants does not occur in the target, so nothing can match.
#[derive(Debug, Clone)]
pub(crate) struct Pattern {
    pub(crate) rel: Option<usize>,
    pub(crate) slots: Vec<Slot>,
}

pub(crate) type Binding = Vec<Option<Tid>>;

/// Enumerates extensions of a binding that map every pattern into the
/// instance. `ranges` optionally restricts the rows each pattern may use
/// (semi-naive evaluation). Patterns are picked dynamically, most
/// selective first.
pub(crate) struct Search<'a> {
    pub(crate) inst: &'a Instance,
    pub(crate) pats: &'a [Pattern],
    pub(crate) ranges: Option<&'a [(usize, usize)]>,
}

enum Candidates<'a> {
    Rows(std::ops::Range<usize>),
    Index(&'a [u32]),
}

impl<'a> Search<'a> {
    /// Calls `f` on every solution; stops early when `f` breaks. After a
    /// break, `binding` holds the solution that caused it.
    pub(crate) fn run(&self, binding: &mut Binding, f: &mut dyn FnMut(&Binding) -> ControlFlow<()>) -> ControlFlow<()> {
        if self.pats.iter().any(|p| p.rel.is_none()) {
            return ControlFlow::Continue(());
        }
        let mut done = vec![false; self.pats.len()];
        self.step(&mut done, self.pats.len(), binding, f)
    }

    fn range(&self, i: usize) -> (usize, usize) {
        match self.ranges {
            Some(r) => r[i],
            None => (0, self.inst.relation(self.pats[i].rel.unwrap()).len()),
        }
    }

    fn candidates(&self, i: usize, binding: &Binding) -> (usize, Candidates<'a>) {
        let rel = self.inst.relation(self.pats[i].rel.unwrap());
        let (lo, hi) = self.range(i);
        let mut best = (hi.saturating_sub(lo), Candidates::Rows(lo..hi.max(lo)));
        for (pos, slot) in self.pats[i].slots.iter().enumerate() {
            let t = match *slot {
                Slot::Const(t) => Some(t),
                Slot::Var(v) => binding[v],
            };
            if let Some(t) = t {
                let all = rel.with_term(pos, t);
                let a = all.partition_point(|&r| (r as usize) < lo);
                let b = all.partition_point(|&r| (r as usize) < hi);
                if b - a < best.0 {
                    best = (b - a, Candidates::Index(&all[a..b]));
                    if b == a {
                        break;
                    }
                }
            }
        }
        best
    }

    fn step(
        &self,
        done: &mut [bool],
        remaining: usize,
        binding: &mut Binding,
        f: &mut dyn FnMut(&Binding) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if remaining == 0 {
            return f(binding);
        }
        let mut pick: Option<(usize, usize, Candidates<'a>)> = None;
        for i in (0..self.pats.len()).filter(|&i| !done[i]) {
            let (n, c) = self.candidates(i, binding);
            if pick.as_ref().is_none_or(|p| n < p.1) {
                pick = Some((i, n, c));
                if n == 0 {
                    break;
                }
            }
        }
        let (i, n, cands) = pick.expect("remaining > 0");
        if n == 0 {
            return ControlFlow::Continue(());
        }
        done[i] = true;
        let rel = self.inst.relation(self.pats[i].rel.unwrap());
        let mut bound = Vec::with_capacity(self.pats[i].slots.len());
        let mut visit = |row_id: usize, binding: &mut Binding| -> ControlFlow<()> {
            bound.clear();
            let row = rel.row(row_id);
            let ok = self.pats[i].slots.iter().zip(row).all(|(slot, &t)| match *slot {
                Slot::Const(c) => c == t,
                Slot::Var(v) => match binding[v] {
                    Some(b) => b == t,
                    None => {
                        binding[v] = Some(t);
                        bound.push(v);
                        true
                    }
                },
            });
            if ok && self.step(done, remaining - 1, binding, f).is_break() {
                return ControlFlow::Break(());
            }
            for &v in &bound {
                binding[v] = None;
            }
            ControlFlow::Continue(())
        };
        let flow = match cands {
            Candidates::Rows(r) => r.into_iter().try_for_each(|id| visit(id, binding)),
            Candidates::Index(ids) => ids.iter().try_for_each(|&id| visit(id as usize, binding)),
        };
        if flow.is_continue() {
            done[i] = false;
        }
        flow
    }
}

/// Extends `binding` to one solution if there is any. Patterns that share
/// no unbound variable are solved independently, which keeps the search
/// linear in the number of independent parts.
pub(crate) fn find_first(inst: &Instance, pats: &[Pattern], binding: &mut Binding) -> bool {
    if pats.iter().any(|p| p.rel.is_none()) {
        return false;
    }
    let n = pats.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, p) in pats.iter().enumerate() {
        for s in &p.slots {
            if let Slot::Var(v) = *s {
                if binding[v].is_none() {
                    match owner.get(&v) {
                        Some(&j) => {
                            let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                            parent[a.max(b)] = a.min(b);
                        }
                        None => {
                            owner.insert(v, i);
                        }
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Pattern>> = BTreeMap::new();
    for (i, p) in pats.iter().enumerate() {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(p.clone());
    }
    groups.values().all(|g| {
        let search = Search {
            inst,
            pats: g,
            ranges: None,
        };
        search.run(binding, &mut |_| ControlFlow::Break(())).is_break()
    })
}

/// Numbers rule variables in order of first occurrence.
#[derive(Debug, Default, Clone)]
pub(crate) struct VarTable {
    pub(crate) vars: Vec<Variable>,
    ids: BTreeMap<Variable, usize>,
}

impl VarTable {
    pub(crate) fn id(&mut self, v: &Variable) -> usize {
        if let Some(&i) = self.ids.get(v) {
            return i;
        }
        self.vars.push(v.clone());
        self.ids.insert(v.clone(), self.vars.len() - 1);
        self.vars.len() - 1
    }

    pub(crate) fn get(&self, v: &Variable) -> Option<usize> {
        self.ids.get(v).copied()
    }

    pub(crate) fn len(&self) -> usize {
        self.vars.len()
    }
}

/// Compiles rule atoms against an instance without changing it.
pub(crate) fn lookup_patterns(atoms: &[Atom], inst: &Instance, vars: &mut VarTable) -> Vec<Pattern> {
    atoms
        .iter()
        .map(|a| {
            let mut rel = inst.find_relation(&a.predicate, a.arity());
            let slots = a
                .args
                .iter()
                .map(|t| match t {
                    RuleTerm::Variable(v) => Slot::Var(vars.id(v)),
                    RuleTerm::Constant(c) => match inst.lookup_constant(c) {
                        Some(t) => Slot::Const(t),
                        None => {
                            rel = None;
                            Slot::Var(usize::MAX)
                        }
                    },
                })
                .collect();
            Pattern { rel, slots }
        })
        .collect()
}

/// A homomorphism: variables and nulls of the source mapped to ground
/// terms. Constants always map to themselves and are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hom {
    vars: BTreeMap<Variable, GroundTerm>,
    nulls: BTreeMap<NullId, GroundTerm>,
}

impl Hom {
    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.nulls.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vars.len() + self.nulls.len()
    }

    pub fn variable(&self, v: &Variable) -> Option<&GroundTerm> {
        self.vars.get(v)
    }

    pub fn null(&self, n: NullId) -> Option<&GroundTerm> {
        self.nulls.get(&n)
    }

    pub fn variables(&self) -> impl Iterator<Item = (&Variable, &GroundTerm)> {
        self.vars.iter()
    }

    pub fn nulls(&self) -> impl Iterator<Item = (&NullId, &GroundTerm)> {
        self.nulls.iter()
    }

    /// Image of a ground term: constants are fixed, unmapped nulls too.
    pub fn apply(&self, t: &GroundTerm) -> GroundTerm {
        match t {
            GroundTerm::Null(n) => self.nulls.get(n).cloned().unwrap_or_else(|| t.clone()),
            GroundTerm::Constant(_) => t.clone(),
        }
    }

    pub(crate) fn from_binding(inst: &Instance, vars: &VarTable, binding: &Binding) -> Hom {
        Hom {
            vars: vars
                .vars
                .iter()
                .zip(binding)
                .filter_map(|(v, t)| t.map(|t| (v.clone(), inst.term(t))))
                .collect(),
            nulls: BTreeMap::new(),
        }
    }
}

/// A homomorphism from the atoms `a` (constants and rule variables) into
/// `target`, if one exists.
pub fn find_hom_atoms(a: &[Atom], target: &Instance) -> Option<Hom> {
    let mut vars = VarTable::default();
    let pats = lookup_patterns(a, target, &mut vars);
    let mut binding = vec![None; vars.len()];
    find_first(target, &pats, &mut binding).then(|| Hom::from_binding(target, &vars, &binding))
}

/// A homomorphism from instance `a` to instance `b`: constants fixed,
/// nulls of `a` mapped to any term of `b`.
pub fn find_hom(a: &Instance, b: &Instance) -> Option<Hom> {
    let mut null_ids: BTreeMap<NullId, usize> = BTreeMap::new();
    let mut pats = Vec::with_capacity(a.len());
    for atom in a.atoms() {
        let rel = b.find_relation(&atom.predicate, atom.args.len())?;
        let mut slots = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            slots.push(match t {
                GroundTerm::Constant(c) => Slot::Const(b.lookup_constant(c)?),
                GroundTerm::Null(n) => {
                    let next = null_ids.len();
                    Slot::Var(*null_ids.entry(*n).or_insert(next))
                }
            });
        }
        pats.push(Pattern { rel: Some(rel), slots });
    }
    let mut binding = vec![None; null_ids.len()];
    if !find_first(b, &pats, &mut binding) {
        return None;
    }
    Some(Hom {
        vars: BTreeMap::new(),
        nulls: null_ids
            .into_iter()
            .map(|(n, i)| (n, b.term(binding[i].expect("all nulls bound"))))
            .collect(),
    })
}

/// Homomorphisms in both directions.
pub fn hom_equivalent(a: &Instance, b: &Instance) -> bool {
    find_hom(a, b).is_some() && find_hom(b, a).is_some()
}
