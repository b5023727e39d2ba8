//! The chase over existential rules.
//!
//! Evaluation is semi-naive: in every round each rule is matched only
//! against combinations that use at least one atom derived in the previous
//! round. Rules are processed in input order and matches in index order,
//! so runs are reproducible. The restricted strategy fires a match only if
//! it cannot already be extended to the head; the oblivious strategy fires
//! every match once.

mod equiv;
mod hom;
mod instance;

use std::ops::ControlFlow;

use thiserror::Error;

pub use equiv::{critical_instance, entails_rule, rules_equivalent, universal_models_equivalent, Verdict};
pub use hom::{find_hom, find_hom_atoms, hom_equivalent, Hom};
pub use instance::{GroundAtom, GroundTerm, Instance, NullId};

use crate::rules::{ExRule, RuleSet, RuleTerm};
use hom::{find_first, lookup_patterns, Binding, Pattern, Search, Slot, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChaseError {
    #[error("predicate `{predicate}` used with arity {found}, expected {expected}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("fact {0} contains variables")]
    NonGroundFact(String),
    #[error("chase limits must be positive")]
    InvalidLimits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Fire a match only when its head is not yet satisfied.
    #[default]
    Restricted,
    /// Fire every match exactly once.
    Oblivious,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaseConfig {
    pub max_steps: u64,
    pub max_nulls: u64,
    pub strategy: Strategy,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            max_steps: 10_000_000,
            max_nulls: 1_000_000,
            strategy: Strategy::Restricted,
        }
    }
}

impl ChaseConfig {
    pub fn with_limits(max_steps: u64, max_nulls: u64) -> Self {
        ChaseConfig {
            max_steps,
            max_nulls,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Steps,
    Nulls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChaseStatus {
    /// A fixpoint was reached; the result is a model.
    Complete,
    Truncated(Limit),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChaseReport {
    pub status: ChaseStatus,
    /// Rule applications that changed the instance.
    pub steps: u64,
    pub rounds: u64,
    pub nulls: u64,
    /// Atoms in the result.
    pub atoms: usize,
    /// Atoms added to the input.
    pub derived: usize,
    /// Applications per rule, in rule order.
    pub firings: Vec<u64>,
}

impl ChaseReport {
    pub fn is_complete(&self) -> bool {
        self.status == ChaseStatus::Complete
    }
}

/// A rule compiled against an instance. Variables are numbered body
/// universals first, then head existentials.
struct Compiled {
    body: Vec<Pattern>,
    head: Vec<Pattern>,
    nvars: usize,
    existentials: Vec<usize>,
}

fn compile(rule: &ExRule, inst: &mut Instance) -> Result<Compiled, ChaseError> {
    let mut vars = VarTable::default();
    let mut pats = |atoms: &[crate::rules::Atom], inst: &mut Instance| -> Result<Vec<Pattern>, ChaseError> {
        atoms
            .iter()
            .map(|a| {
                let rel = inst.relation_id(&a.predicate, a.arity())?;
                let slots = a
                    .args
                    .iter()
                    .map(|t| match t {
                        RuleTerm::Constant(c) => Slot::Const(inst.intern_constant(c)),
                        RuleTerm::Variable(v) => Slot::Var(vars.id(v)),
                    })
                    .collect();
                Ok(Pattern { rel: Some(rel), slots })
            })
            .collect()
    };
    let body = pats(rule.body(), inst)?;
    let head = pats(rule.head(), inst)?;
    let existentials = rule
        .existentials()
        .iter()
        .map(|v| vars.get(v).expect("head variables are numbered"))
        .collect();
    Ok(Compiled {
        body,
        head,
        nvars: vars.len(),
        existentials,
    })
}

/// Runs the chase of `rules` on `db` until a fixpoint or a limit.
/// Truncation is reported in the status, not as an error.
pub fn chase(rules: &RuleSet, db: Instance, cfg: &ChaseConfig) -> Result<(Instance, ChaseReport), ChaseError> {
    if cfg.max_steps == 0 || cfg.max_nulls == 0 {
        return Err(ChaseError::InvalidLimits);
    }
    let mut inst = db;
    let compiled = rules
        .rules()
        .iter()
        .map(|r| compile(r, &mut inst))
        .collect::<Result<Vec<_>, _>>()?;
    let start_len = inst.len();
    let start_nulls = inst.null_count();
    let mut report = ChaseReport {
        status: ChaseStatus::Complete,
        steps: 0,
        rounds: 0,
        nulls: 0,
        atoms: 0,
        derived: 0,
        firings: vec![0; compiled.len()],
    };
    let rel_len = |inst: &Instance| {
        (0..inst.relation_count())
            .map(|r| inst.relation(r).len())
            .collect::<Vec<_>>()
    };
    let mut prev_end = vec![0; inst.relation_count()];
    'rounds: loop {
        let end = rel_len(&inst);
        for (ri, rule) in compiled.iter().enumerate() {
            for binding in delta_matches(&inst, rule, report.rounds == 0, &prev_end, &end) {
                if report.steps >= cfg.max_steps {
                    report.status = ChaseStatus::Truncated(Limit::Steps);
                    break 'rounds;
                }
                let nulls = u64::from(inst.null_count() - start_nulls);
                if nulls + rule.existentials.len() as u64 > cfg.max_nulls {
                    report.status = ChaseStatus::Truncated(Limit::Nulls);
                    break 'rounds;
                }
                if fire(&mut inst, rule, binding, cfg.strategy) {
                    report.steps += 1;
                    report.firings[ri] += 1;
                }
            }
        }
        report.rounds += 1;
        if rel_len(&inst) == end {
            break;
        }
        prev_end = end;
    }
    report.nulls = u64::from(inst.null_count() - start_nulls);
    report.atoms = inst.len();
    report.derived = inst.len() - start_len;
    Ok((inst, report))
}

/// Matches using at least one row in `[prev_end, end)`; rows before the
/// delta atom are limited to old rows so no match is produced twice.
fn delta_matches(inst: &Instance, rule: &Compiled, first: bool, prev_end: &[usize], end: &[usize]) -> Vec<Binding> {
    let mut found = Vec::new();
    if rule.body.is_empty() {
        if first {
            found.push(vec![None; rule.nvars]);
        }
        return found;
    }
    let mut binding = vec![None; rule.nvars];
    let mut ranges = vec![(0, 0); rule.body.len()];
    for i in 0..rule.body.len() {
        let ri = rule.body[i].rel.expect("compiled patterns have relations");
        if prev_end[ri] == end[ri] {
            continue;
        }
        for (j, p) in rule.body.iter().enumerate() {
            let r = p.rel.expect("compiled");
            ranges[j] = match j.cmp(&i) {
                std::cmp::Ordering::Less => (0, prev_end[r]),
                std::cmp::Ordering::Equal => (prev_end[r], end[r]),
                std::cmp::Ordering::Greater => (0, end[r]),
            };
        }
        let search = Search {
            inst,
            pats: &rule.body,
            ranges: Some(&ranges),
        };
        let _ = search.run(&mut binding, &mut |b| {
            found.push(b.clone());
            ControlFlow::Continue(())
        });
    }
    found
}

/// Applies one match; true if the instance changed (restricted) or the
/// trigger was applied (oblivious).
fn fire(inst: &mut Instance, rule: &Compiled, mut binding: Binding, strategy: Strategy) -> bool {
    if strategy == Strategy::Restricted && !rule.existentials.is_empty() {
        let mut probe = binding.clone();
        if find_first(inst, &rule.head, &mut probe) {
            return false;
        }
    }
    for &e in &rule.existentials {
        binding[e] = Some(Instance::null_tid(inst.fresh_null()));
    }
    let mut changed = false;
    let mut row = Vec::new();
    for p in &rule.head {
        row.clear();
        row.extend(p.slots.iter().map(|s| match *s {
            Slot::Const(t) => t,
            Slot::Var(v) => binding[v].expect("head variables are bound"),
        }));
        changed |= inst.insert_row(p.rel.expect("compiled"), &row);
    }
    changed || strategy == Strategy::Oblivious
}

/// All matches of the rule body in `inst`. A rule with an empty body has
/// exactly one, empty, match.
pub fn matches(rule: &ExRule, inst: &Instance) -> Vec<Hom> {
    let mut vars = VarTable::default();
    let body = lookup_patterns(rule.body(), inst, &mut vars);
    let mut binding = vec![None; vars.len()];
    let mut out = Vec::new();
    let _ = Search {
        inst,
        pats: &body,
        ranges: None,
    }
    .run(&mut binding, &mut |b| {
        out.push(Hom::from_binding(inst, &vars, b));
        ControlFlow::Continue(())
    });
    out
}

/// Every match extends to the head.
pub fn is_satisfied(rule: &ExRule, inst: &Instance) -> bool {
    let mut vars = VarTable::default();
    let body = lookup_patterns(rule.body(), inst, &mut vars);
    let head = lookup_patterns(rule.head(), inst, &mut vars);
    let mut binding = vec![None; vars.len()];
    let violated = Search {
        inst,
        pats: &body,
        ranges: None,
    }
    .run(&mut binding, &mut |b| {
        let mut probe = b.clone();
        if find_first(inst, &head, &mut probe) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    });
    violated.is_continue()
}

pub fn is_model(rules: &RuleSet, inst: &Instance) -> bool {
    rules.rules().iter().all(|r| is_satisfied(r, inst))
}
