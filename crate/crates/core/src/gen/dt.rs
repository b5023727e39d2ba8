//! Deep Taxonomy: one membership fact and a chain of subclass rules.
//!
//! Level `k` has class `N_k` with three subclass rules to `N_{k+1}`,
//! `I_{k+1}` and `J_{k+1}`; only the `N` chain continues.

use super::GenError;
use crate::model::{Constant, Expression, Formula, Implication, N3Term, Statement, Triple};

pub fn dt_individual() -> Constant {
    Constant::example("i")
}

/// Class `<kind><level>`, for example `N3` or `J12`.
pub fn dt_class(kind: char, level: usize) -> Constant {
    Constant::example(format!("{kind}{level}"))
}

fn member(x: N3Term, class: Constant) -> Triple {
    Triple::new(x, N3Term::Constant(Constant::rdf_type()), N3Term::Constant(class))
}

/// The fact and the `3·depth` rules as separate documents.
pub fn deep_taxonomy_split(depth: usize) -> Result<(Formula, Formula), GenError> {
    if depth == 0 {
        return Err(GenError::Depth(depth));
    }
    let facts = Formula::new(vec![Statement::Atomic(member(
        N3Term::Constant(dt_individual()),
        dt_class('N', 0),
    ))]);
    let x = N3Term::universal("x");
    let mut rules = Vec::with_capacity(3 * depth);
    for k in 0..depth {
        for kind in ['N', 'I', 'J'] {
            let body = Expression::new(vec![member(x.clone(), dt_class('N', k))]).expect("nonempty");
            let head = Expression::new(vec![member(x.clone(), dt_class(kind, k + 1))]).expect("nonempty");
            rules.push(Statement::Implication(Implication::new(body, head)));
        }
    }
    Ok((facts, Formula::new(rules)))
}

/// Fact and rules in one document: `3·depth + 1` statements.
pub fn deep_taxonomy(depth: usize) -> Result<Formula, GenError> {
    let (facts, rules) = deep_taxonomy_split(depth)?;
    Ok(facts.conjoin(rules))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statement_counts() {
        assert_eq!(deep_taxonomy(1).unwrap().len(), 4);
        let (f, r) = deep_taxonomy_split(1000).unwrap();
        assert_eq!((f.len(), r.len()), (1, 3000));
        assert_eq!(deep_taxonomy(0), Err(GenError::Depth(0)));
    }

    #[test]
    fn rules_are_well_formed() {
        let f = deep_taxonomy(3).unwrap();
        assert!(f.validate().is_ok());
        assert!(f.implications().all(|r| r.is_well_formed()));
    }
}
