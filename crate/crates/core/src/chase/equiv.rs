//! Comparing rule sets through their universal models.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{chase, find_hom_atoms, hom_equivalent, ChaseConfig, ChaseError, GroundAtom, GroundTerm, Instance};
use crate::model::Constant;
use crate::rules::{Atom, ExRule, Quantifier, RuleSet, RuleTerm};

/// Namespace for the constants that stand in for frozen rule variables.
const FROZEN_NS: &str = "urn:n3ex:frozen:";
/// The extra constant of the critical instance.
const STAR: &str = "urn:n3ex:star";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    /// A chase hit its limits before the question was settled.
    Inconclusive,
}

/// Does every model of `rules` satisfy `rule`?
///
/// The body of `rule` is frozen into a database (each universal becomes a
/// fresh constant) and chased with `rules`. The rule is entailed exactly
/// when the frozen head, existentials left free, maps into the result.
/// `None` means the chase was truncated before the head showed up.
pub fn entails_rule(rules: &RuleSet, rule: &ExRule, cfg: &ChaseConfig) -> Result<Option<bool>, ChaseError> {
    let freeze = |t: &RuleTerm| match t {
        RuleTerm::Variable(v) if v.quantifier == Quantifier::Universal => {
            RuleTerm::Constant(Constant::iri(format!("{FROZEN_NS}{}", v.name)))
        }
        t => t.clone(),
    };
    let frozen = |atoms: &[Atom]| -> Vec<Atom> {
        atoms
            .iter()
            .map(|a| Atom {
                predicate: a.predicate.clone(),
                args: a.args.iter().map(freeze).collect(),
            })
            .collect()
    };
    let db = Instance::from_atoms(&frozen(rule.body()))?;
    let head = frozen(rule.head());
    let (out, report) = chase(rules, db, cfg)?;
    if find_hom_atoms(&head, &out).is_some() {
        Ok(Some(true))
    } else if report.is_complete() {
        Ok(Some(false))
    } else {
        Ok(None)
    }
}

/// Whether `a` and `b` have the same models.
///
/// Each side must entail every rule of the other; entailment is decided by
/// chasing the frozen rule body, which compares the universal models of
/// both sets on that database. Exact whenever the chases terminate.
pub fn rules_equivalent(a: &RuleSet, b: &RuleSet, cfg: &ChaseConfig) -> Result<Verdict, ChaseError> {
    let mut inconclusive = false;
    for (from, to) in [(a, b), (b, a)] {
        for rule in to.rules() {
            match entails_rule(from, rule, cfg)? {
                Some(true) => {}
                Some(false) => return Ok(Verdict::NotEquivalent),
                None => inconclusive = true,
            }
        }
    }
    Ok(if inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::Equivalent
    })
}

/// Chases both rule sets on `db` and compares the results up to
/// homomorphism. This only speaks about the given database.
pub fn universal_models_equivalent(
    a: &RuleSet,
    b: &RuleSet,
    db: &Instance,
    cfg: &ChaseConfig,
) -> Result<Verdict, ChaseError> {
    let (ia, ra) = chase(a, db.clone(), cfg)?;
    let (ib, rb) = chase(b, db.clone(), cfg)?;
    if !ra.is_complete() || !rb.is_complete() {
        return Ok(Verdict::Inconclusive);
    }
    Ok(if hom_equivalent(&ia, &ib) {
        Verdict::Equivalent
    } else {
        Verdict::NotEquivalent
    })
}

/// Every atom over the predicates of the given rule sets whose arguments
/// are constants of the rules or one extra constant. The size is
/// `(constants + 1) ^ arity` per predicate.
pub fn critical_instance(sets: &[&RuleSet]) -> Result<Instance, ChaseError> {
    let mut consts: Vec<Constant> = sets.iter().flat_map(|s| s.constants()).collect();
    consts.push(Constant::iri(STAR));
    consts.sort();
    consts.dedup();
    let mut sig: BTreeMap<Arc<str>, usize> = BTreeMap::new();
    for s in sets {
        sig.extend(s.signature());
    }
    let mut inst = Instance::new();
    for (p, arity) in sig {
        let mut idx = vec![0usize; arity];
        loop {
            let args = idx.iter().map(|&i| GroundTerm::Constant(consts[i].clone())).collect();
            inst.insert(&GroundAtom::new(&p, args))?;
            let Some(k) = (0..arity).rev().find(|&k| idx[k] + 1 < consts.len()) else {
                break;
            };
            idx[k] += 1;
            idx[k + 1..].iter_mut().for_each(|i| *i = 0);
        }
    }
    Ok(inst)
}
