//! Searching for a distinguishing interpretation with a SAT solver.
//!
//! One propositional variable per triple slot `(s, p, o)`; quantifiers are
//! expanded over the universe and the resulting and/or circuit is Tseitin
//! encoded. The solver then looks for an interpretation satisfying exactly
//! one of the two formulae.

use varisat::{ExtendFormula, Lit, Solver};

use super::{eval, Equivalence, FiniteInterpretation, IFormula, IRule, ITriple, OracleError, Universe, T};

struct Encoder {
    solver: Solver<'static>,
    n: usize,
    slots: Vec<Lit>,
    truth: Lit,
}

impl Encoder {
    fn new(n: usize) -> Self {
        let mut solver = Solver::new();
        let slots = (0..n * n * n).map(|_| solver.new_lit()).collect();
        let truth = solver.new_lit();
        solver.add_clause(&[truth]);
        Encoder {
            solver,
            n,
            slots,
            truth,
        }
    }

    fn and(&mut self, mut lits: Vec<Lit>) -> Lit {
        lits.sort();
        lits.dedup();
        lits.retain(|l| *l != self.truth);
        if lits.contains(&!self.truth) {
            return !self.truth;
        }
        match lits.len() {
            0 => self.truth,
            1 => lits[0],
            _ => {
                let a = self.solver.new_lit();
                for &l in &lits {
                    self.solver.add_clause(&[!a, l]);
                }
                let mut big: Vec<Lit> = lits.iter().map(|l| !*l).collect();
                big.push(a);
                self.solver.add_clause(&big);
                a
            }
        }
    }

    fn or(&mut self, lits: Vec<Lit>) -> Lit {
        !self.and(lits.into_iter().map(|l| !l).collect())
    }

    fn slot(&self, t: &ITriple, asg: &[usize]) -> Lit {
        let v = |x: T| match x {
            T::C(c) => c,
            T::V(i) => asg[i],
        };
        self.slots[v(t[0]) * self.n * self.n + v(t[1]) * self.n + v(t[2])]
    }

    /// Disjunction over all values of `vars` of the conjunction of `triples`.
    fn exists(&mut self, triples: &[ITriple], asg: &mut [usize], vars: std::ops::Range<usize>) -> Lit {
        let mut alts = Vec::new();
        for_all(self.n, asg, vars, &mut |asg| {
            let conj = triples.iter().map(|t| self.slot(t, asg)).collect();
            alts.push(conj);
        });
        let alts = alts.into_iter().map(|c| self.and(c)).collect();
        self.or(alts)
    }

    fn rule(&mut self, r: &IRule) -> Lit {
        let mut asg = vec![0; r.universals + r.body_blanks + r.head_blanks];
        let mut sigmas = Vec::new();
        for_all(self.n, &mut asg, 0..r.universals, &mut |asg| sigmas.push(asg.to_vec()));
        let mut conj = Vec::with_capacity(sigmas.len());
        for mut sigma in sigmas {
            let nu = r.universals;
            let body = self.exists(&r.body, &mut sigma, nu..nu + r.body_blanks);
            let head = self.exists(
                &r.head,
                &mut sigma,
                nu + r.body_blanks..nu + r.body_blanks + r.head_blanks,
            );
            conj.push(self.or(vec![!body, head]));
        }
        self.and(conj)
    }

    fn formula(&mut self, f: &IFormula) -> Lit {
        let mut parts: Vec<Lit> = f.rules.iter().map(|r| self.rule(r)).collect();
        let mut asg = vec![0; f.free];
        parts.push(self.exists(&f.atoms, &mut asg, 0..f.free));
        self.and(parts)
    }
}

/// Runs `f` for every assignment of universe values to `vars`.
fn for_all(n: usize, asg: &mut [usize], vars: std::ops::Range<usize>, f: &mut dyn FnMut(&[usize])) {
    if n == 0 && !vars.is_empty() {
        return;
    }
    for v in vars.clone() {
        asg[v] = 0;
    }
    loop {
        f(asg);
        let mut k = vars.end;
        loop {
            if k == vars.start {
                return;
            }
            k -= 1;
            asg[k] += 1;
            if asg[k] < n {
                break;
            }
            asg[k] = 0;
        }
    }
}

fn estimate(f: &IFormula, n: usize) -> usize {
    let pow = |k: usize| n.saturating_pow(k as u32);
    let mut total = pow(f.free).saturating_mul(f.atoms.len() + 1);
    for r in &f.rules {
        let inner = pow(r.body_blanks)
            .saturating_mul(r.body.len() + 1)
            .saturating_add(pow(r.head_blanks).saturating_mul(r.head.len() + 1))
            .saturating_add(3);
        total = total.saturating_add(pow(r.universals).saturating_mul(inner));
    }
    total
}

pub(super) fn equivalent(
    f: &IFormula,
    g: &IFormula,
    universe: &Universe,
    budget: usize,
) -> Result<Equivalence, OracleError> {
    let n = universe.len();
    let required = estimate(f, n).saturating_add(estimate(g, n));
    if required > budget {
        return Err(OracleError::ClauseBudget { required, budget });
    }
    let mut enc = Encoder::new(n);
    let lf = enc.formula(f);
    let lg = enc.formula(g);
    enc.solver.add_clause(&[lf, lg]);
    enc.solver.add_clause(&[!lf, !lg]);
    let sat = enc.solver.solve().expect("solver without proof output cannot fail");
    if !sat {
        return Ok(Equivalence::Equivalent);
    }
    let model = enc.solver.model().expect("satisfiable");
    let mut m = FiniteInterpretation::empty(universe.clone());
    for lit in model {
        let i = lit.var().index();
        if i < m.bits.len() {
            m.bits[i] = lit.is_positive();
        }
    }
    assert_ne!(eval(&m, f), eval(&m, g), "solver witness must separate the formulae");
    Ok(Equivalence::Different(m))
}
