//! Isomorphism of row multisets under an injective variable renaming.
//!
//! Used to compare formulae and rule sets "up to renaming of bound
//! variables". Rows are term lists; `class` says whether a term is renamable
//! and which sort it belongs to (renaming never crosses sorts).

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Slot<T> {
    Fixed(T),
    /// (sort, index of the first occurrence of this variable in the row)
    Var(u8, usize),
}

fn signature<T: Ord + Clone>(row: &[T], class: &dyn Fn(&T) -> Option<u8>) -> Vec<Slot<T>> {
    row.iter()
        .enumerate()
        .map(|(i, t)| match class(t) {
            None => Slot::Fixed(t.clone()),
            Some(c) => {
                let first = row[..i].iter().position(|u| u == t).unwrap_or(i);
                Slot::Var(c, first)
            }
        })
        .collect()
}

struct Search<'a, T> {
    a: &'a [Vec<T>],
    b: &'a [Vec<T>],
    class: &'a dyn Fn(&T) -> Option<u8>,
    candidates: Vec<Vec<usize>>,
    order: Vec<usize>,
    used: Vec<bool>,
    fwd: BTreeMap<T, T>,
    bwd: BTreeMap<T, T>,
}

impl<T: Ord + Clone> Search<'_, T> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let i = self.order[depth];
        for k in 0..self.candidates[i].len() {
            let j = self.candidates[i][k];
            if self.used[j] {
                continue;
            }
            let mut added = Vec::new();
            if self.unify(i, j, &mut added) {
                self.used[j] = true;
                if self.run(depth + 1) {
                    return true;
                }
                self.used[j] = false;
            }
            for key in added {
                if let Some(v) = self.fwd.remove(&key) {
                    self.bwd.remove(&v);
                }
            }
        }
        false
    }

    fn unify(&mut self, i: usize, j: usize, added: &mut Vec<T>) -> bool {
        for (x, y) in self.a[i].iter().zip(&self.b[j]) {
            if (self.class)(x).is_none() {
                // signatures already agree on fixed positions
                continue;
            }
            match (self.fwd.get(x), self.bwd.get(y)) {
                (Some(img), _) if img != y => return false,
                (None, Some(_)) => return false,
                (Some(_), _) => {}
                (None, None) => {
                    self.fwd.insert(x.clone(), y.clone());
                    self.bwd.insert(y.clone(), x.clone());
                    added.push(x.clone());
                }
            }
        }
        true
    }
}

/// True iff there is a bijection between the rows of `a` and `b` together
/// with an injective, sort-preserving renaming of variables that maps every
/// row of `a` onto its partner in `b`.
pub(crate) fn rows_isomorphic<T: Ord + Clone>(a: &[Vec<T>], b: &[Vec<T>], class: &dyn Fn(&T) -> Option<u8>) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let sig_a: Vec<_> = a.iter().map(|r| signature(r, class)).collect();
    let sig_b: Vec<_> = b.iter().map(|r| signature(r, class)).collect();
    let mut by_sig: BTreeMap<&Vec<Slot<T>>, Vec<usize>> = BTreeMap::new();
    for (j, s) in sig_b.iter().enumerate() {
        by_sig.entry(s).or_default().push(j);
    }
    let mut candidates = Vec::with_capacity(a.len());
    let mut demand: BTreeMap<&Vec<Slot<T>>, usize> = BTreeMap::new();
    for s in &sig_a {
        let cands = by_sig.get(s).cloned().unwrap_or_default();
        if cands.is_empty() {
            return false;
        }
        *demand.entry(s).or_default() += 1;
        candidates.push(cands);
    }
    if demand.iter().any(|(s, n)| by_sig.get(*s).map_or(0, Vec::len) != *n) {
        return false;
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by_key(|&i| candidates[i].len());
    let mut search = Search {
        a,
        b,
        class,
        candidates,
        order,
        used: vec![false; b.len()],
        fwd: BTreeMap::new(),
        bwd: BTreeMap::new(),
    };
    search.run(0)
}
