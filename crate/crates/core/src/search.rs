//! Bounded refutation search.
//!
//! Iterative deepening on proof size. `prove(ctx, goal, k)` explores every
//! proof of size at most `k` in a fixed search space (goal-directed
//! introductions, focused eliminations from hypotheses, case splits on
//! disjunctive and existential hypotheses, classical reductio), so a failure
//! at `k` is a failure at every smaller size and the failure memo is sound.
//! No step counters: the outcome depends only on the theory, `n` and
//! `max_nodes`, and `Exhausted` at one budget stays `Exhausted` below it.

use crate::classify::rho;
use crate::proof::{bdef_partner, Proof};
use crate::subst::{alpha_eq, match_instance, substitute};
use crate::syntax::{Conn, Formula, Quant, Term, Var};
use crate::theory::TheorySpec;
use num_bigint::BigUint;
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest proof size (node count) tried.
    pub max_nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 7 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A proof of `bot` from axioms of code `<= n`, passing the restricted check at `n`.
    Refutation(Proof),
    /// Nothing found up to `max_nodes`. Not a consistency proof.
    Exhausted { max_nodes: usize },
}

impl SearchOutcome {
    pub fn is_exhausted(&self) -> bool {
        matches!(self, SearchOutcome::Exhausted { .. })
    }
}

struct Searcher {
    axioms: Vec<Formula>,
    n: BigUint,
    arithmetic: bool,
    failed: HashMap<(Vec<Formula>, Formula), usize>,
    base_max_var: u32,
}

fn skeleton_eq(a: &Formula, b: &Formula) -> bool {
    match (a, b) {
        (Formula::Bot, Formula::Bot) => true,
        (Formula::Atom(r, _), Formula::Atom(s, _)) => r == s,
        (Formula::Not(x), Formula::Not(y)) => skeleton_eq(x, y),
        (Formula::Bin(c, a1, a2), Formula::Bin(d, b1, b2)) => c == d && skeleton_eq(a1, b1) && skeleton_eq(a2, b2),
        (Formula::Quant { q, bound: b1, body: x, .. }, Formula::Quant { q: r, bound: b2, body: y, .. }) => {
            q == r && b1.is_some() == b2.is_some() && skeleton_eq(x, y)
        }
        _ => false,
    }
}

/// Whether eliminations starting at `h` can end in `goal`.
fn reaches(h: &Formula, goal: &Formula) -> bool {
    if skeleton_eq(h, goal) || *h == Formula::Bot {
        return true;
    }
    match h {
        Formula::Not(_) => *goal == Formula::Bot,
        Formula::Bin(Conn::And, a, b) => reaches(a, goal) || reaches(b, goal),
        Formula::Bin(Conn::Imp, _, b) => reaches(b, goal),
        Formula::Quant { q: Quant::Forall, bound: None, body, .. } => reaches(body, goal),
        Formula::Quant { bound: Some(_), .. } => bdef_partner(h).is_some_and(|p| reaches(&p, goal)),
        _ => false,
    }
}

impl Searcher {
    fn label(depth: usize) -> String {
        format!("h{depth}")
    }

    fn ok_rho(&self, f: &Formula) -> bool {
        BigUint::from(rho(f)) <= self.n
    }

    fn fresh(&self, ctx: &[Formula], goal: &Formula) -> Var {
        let m = ctx.iter().chain(std::iter::once(goal)).filter_map(Formula::max_var).max();
        Var(m.map_or(self.base_max_var, |m| m.max(self.base_max_var)) + 1)
    }

    fn candidates(&self, ctx: &[Formula], goal: &Formula) -> Vec<Term> {
        let mut vs = BTreeSet::new();
        for f in ctx.iter().chain(std::iter::once(goal)) {
            vs.extend(f.free_vars());
        }
        let mut out: Vec<Term> = vs.into_iter().map(Term::Var).collect();
        if self.arithmetic {
            out.push(Term::zero());
        }
        if out.is_empty() {
            out.push(Term::Var(self.fresh(ctx, goal)));
        }
        out
    }

    fn hyps(&self, ctx: &[Formula]) -> Vec<Proof> {
        let mut out: Vec<Proof> =
            ctx.iter().enumerate().map(|(i, f)| Proof::assume(&Self::label(i), f.clone())).collect();
        out.extend(self.axioms.iter().map(|a| Proof::axiom(a.clone())));
        out
    }

    fn prove_min(&mut self, ctx: &[Formula], goal: &Formula, max: usize) -> Option<Proof> {
        (1..=max).find_map(|k| self.prove(ctx, goal, k))
    }

    fn prove(&mut self, ctx: &[Formula], goal: &Formula, k: usize) -> Option<Proof> {
        if k == 0 || !self.ok_rho(goal) {
            return None;
        }
        let key = (ctx.to_vec(), goal.clone());
        if self.failed.get(&key).is_some_and(|&f| f >= k) {
            return None;
        }
        let r = self.prove_uncached(ctx, goal, k);
        if r.is_none() {
            let e = self.failed.entry(key).or_insert(0);
            *e = (*e).max(k);
        }
        r
    }

    fn prove_uncached(&mut self, ctx: &[Formula], goal: &Formula, k: usize) -> Option<Proof> {
        // leaves
        if let Some(i) = ctx.iter().position(|f| alpha_eq(f, goal)) {
            return Some(Proof::assume(&Self::label(i), ctx[i].clone()));
        }
        if let Some(a) = self.axioms.iter().find(|a| alpha_eq(a, goal)) {
            return Some(Proof::axiom(a.clone()));
        }
        if let Formula::Atom(r, args) = goal {
            if r == crate::syntax::EQ && args[0] == args[1] {
                return Some(Proof::refl(args[0].clone()));
            }
        }
        if k == 1 {
            return None;
        }
        // eliminations
        for h in self.hyps(ctx) {
            if reaches(&h.conclusion, goal) {
                if let Some(p) = self.elim(ctx, h, goal, k) {
                    return Some(p);
                }
            }
        }
        // introductions
        let depth = ctx.len();
        let l = Self::label(depth);
        let extended = |f: &Formula| {
            let mut c = ctx.to_vec();
            c.push(f.clone());
            c
        };
        match goal {
            Formula::Bin(Conn::And, a, b) => {
                if let Some(pa) = self.prove_min(ctx, a, k - 2) {
                    if let Some(pb) = self.prove(ctx, b, k - 1 - pa.size()) {
                        return Some(Proof::and_i(pa, pb));
                    }
                }
            }
            Formula::Bin(Conn::Imp, a, b) if self.ok_rho(a) => {
                if let Some(p) = self.prove(&extended(a), b, k - 1) {
                    return Some(Proof::imp_i(&l, (**a).clone(), p));
                }
            }
            Formula::Not(a) if self.ok_rho(a) => {
                if let Some(p) = self.prove(&extended(a), &Formula::Bot, k - 1) {
                    return Some(Proof::not_i(&l, (**a).clone(), p));
                }
            }
            Formula::Bin(Conn::Or, a, b) => {
                if let Some(p) = self.prove(ctx, a, k - 1) {
                    return Some(Proof::or_il(p, (**b).clone()));
                }
                if let Some(p) = self.prove(ctx, b, k - 1) {
                    return Some(Proof::or_ir((**a).clone(), p));
                }
            }
            Formula::Quant { q: Quant::Forall, var, bound: None, body } => {
                let a = self.fresh(ctx, goal);
                let inst = substitute(body, *var, &Term::Var(a));
                if let Some(p) = self.prove(ctx, &inst, k - 1) {
                    return Some(Proof::node(crate::proof::Rule::ForallI(a), goal.clone(), vec![p]));
                }
            }
            Formula::Quant { q: Quant::Exists, var, bound: None, body } => {
                for t in self.candidates(ctx, goal) {
                    let inst = substitute(body, *var, &t);
                    if let Some(p) = self.prove(ctx, &inst, k - 1) {
                        return Some(Proof::exists_i(goal.clone(), t, p));
                    }
                }
            }
            Formula::Quant { bound: Some(_), .. } => {
                let partner = bdef_partner(goal).expect("bounded");
                if let Some(p) = self.prove(ctx, &partner, k - 1) {
                    return Some(Proof::node(crate::proof::Rule::BDef, goal.clone(), vec![p]));
                }
            }
            _ => {}
        }
        // case splits on hypotheses
        for h in self.hyps(ctx) {
            let hs = h.size();
            if hs + 2 > k {
                continue;
            }
            match h.conclusion.clone() {
                Formula::Quant { q: Quant::Exists, var, bound: None, body } => {
                    let opened = ctx.iter().any(|c| {
                        matches!(match_instance(&body, var, c), Some(Some(Term::Var(_))))
                    });
                    if opened {
                        continue;
                    }
                    let a = self.fresh(ctx, goal);
                    let inst = substitute(&body, var, &Term::Var(a));
                    if !self.ok_rho(&inst) {
                        continue;
                    }
                    if let Some(p) = self.prove(&extended(&inst), goal, k - 1 - hs) {
                        return Some(Proof::exists_e(a, &l, h, p));
                    }
                }
                Formula::Bin(Conn::Or, a, b) => {
                    if ctx.iter().any(|c| alpha_eq(c, &a) || alpha_eq(c, &b)) {
                        continue;
                    }
                    let (ca, cb) = (extended(&a), extended(&b));
                    if let Some(pa) = self.prove_min(&ca, goal, k - 2 - hs) {
                        if let Some(pb) = self.prove(&cb, goal, k - 1 - hs - pa.size()) {
                            return Some(Proof::or_e(&l, h, pa, pb));
                        }
                    }
                }
                _ => {}
            }
        }
        // classical and explosion
        if *goal != Formula::Bot {
            if let Some(p) = self.prove(ctx, &Formula::Bot, k - 1) {
                return Some(Proof::bot_e(p, goal.clone()));
            }
            let neg = Formula::not(goal.clone());
            if !matches!(goal, Formula::Not(_)) && self.ok_rho(&neg) && !ctx.iter().any(|c| alpha_eq(c, &neg)) {
                if let Some(p) = self.prove(&extended(&neg), &Formula::Bot, k - 1) {
                    return Some(Proof::raa(&l, goal.clone(), p));
                }
            }
        }
        None
    }

    /// Extends `h` by eliminations until it concludes `goal`, within total size `k`.
    fn elim(&mut self, ctx: &[Formula], h: Proof, goal: &Formula, k: usize) -> Option<Proof> {
        let hs = h.size();
        if hs > k || !self.ok_rho(&h.conclusion) {
            return None;
        }
        if alpha_eq(&h.conclusion, goal) {
            return Some(h);
        }
        if hs == k {
            return None;
        }
        match h.conclusion.clone() {
            Formula::Bot => Some(Proof::bot_e(h, goal.clone())),
            Formula::Bin(Conn::And, a, b) => {
                if reaches(&a, goal) {
                    if let Some(p) = self.elim(ctx, Proof::and_el(h.clone()), goal, k) {
                        return Some(p);
                    }
                }
                if reaches(&b, goal) {
                    return self.elim(ctx, Proof::and_er(h), goal, k);
                }
                None
            }
            Formula::Bin(Conn::Imp, a, b) => {
                if !reaches(&b, goal) || hs + 2 > k {
                    return None;
                }
                let pa = self.prove_min(ctx, &a, k - hs - 1)?;
                self.elim(ctx, Proof::imp_e(h, pa), goal, k)
            }
            Formula::Not(a) => {
                if *goal != Formula::Bot || hs + 2 > k {
                    return None;
                }
                let pa = self.prove_min(ctx, &a, k - hs - 1)?;
                Some(Proof::not_e(h, pa))
            }
            Formula::Quant { q: Quant::Forall, var, bound: None, body } => {
                let mut terms = Vec::new();
                if let Some(Some(t)) = match_instance(&body, var, goal) {
                    terms.push(t);
                }
                for t in self.candidates(ctx, goal) {
                    if !terms.contains(&t) {
                        terms.push(t);
                    }
                }
                for t in terms {
                    if let Some(p) = self.elim(ctx, Proof::forall_e(h.clone(), t), goal, k) {
                        return Some(p);
                    }
                }
                None
            }
            Formula::Quant { q: Quant::Forall, bound: Some(_), .. } => self.elim(ctx, Proof::bdef(h), goal, k),
            _ => None,
        }
    }
}

/// Searches for a proof of `bot` from the axioms of `theory` with code at
/// most `n`, every formula having `rho <= n`.
pub fn search_refutation(theory: &TheorySpec, n: &BigUint, budget: &SearchBudget) -> SearchOutcome {
    let axioms: Vec<Formula> = theory
        .axioms_upto(n)
        .filter(|(_, a)| BigUint::from(rho(a)) <= *n)
        .map(|(_, a)| a.clone())
        .collect();
    let base_max_var = axioms.iter().filter_map(Formula::max_var).max().unwrap_or(0);
    let mut s = Searcher {
        axioms,
        n: n.clone(),
        arithmetic: theory.signature.is_arithmetic(),
        failed: HashMap::new(),
        base_max_var,
    };
    match s.prove_min(&[], &Formula::Bot, budget.max_nodes) {
        Some(p) => SearchOutcome::Refutation(p),
        None => SearchOutcome::Exhausted { max_nodes: budget.max_nodes },
    }
}

/// Goal-directed search for a proof of `goal` from all axioms of `theory`.
pub fn search_proof(theory: &TheorySpec, goal: &Formula, budget: &SearchBudget) -> Option<Proof> {
    let axioms = theory.axiom_list();
    let base_max_var = axioms.iter().chain(std::iter::once(goal)).filter_map(Formula::max_var).max().unwrap_or(0);
    let mut s = Searcher {
        axioms,
        n: BigUint::from(usize::MAX),
        arithmetic: theory.signature.is_arithmetic(),
        failed: HashMap::new(),
        base_max_var,
    };
    s.prove_min(&[], goal, budget.max_nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{check_closed, check_restricted};

    fn th(src: &str) -> TheorySpec {
        TheorySpec::parse(src).unwrap()
    }

    fn big() -> BigUint {
        BigUint::from(10u32).pow(400)
    }

    #[test]
    fn contradiction_is_refuted() {
        let t = th("(theory T (signature (P 0)) (axiom P) (axiom (not P)))");
        match search_refutation(&t, &big(), &SearchBudget::default()) {
            SearchOutcome::Refutation(p) => {
                assert_eq!(check_closed(&p, &t).unwrap(), Formula::Bot);
                assert!(check_restricted(&p, &big()).ok);
                assert_eq!(p.size(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn consistent_theory_is_exhausted() {
        let t = th("(theory T (signature (P 0)) (axiom P))");
        assert!(search_refutation(&t, &big(), &SearchBudget { max_nodes: 9 }).is_exhausted());
    }

    #[test]
    fn literal_bot_axiom() {
        let t = th("(theory T (signature) (axiom bot))");
        match search_refutation(&t, &big(), &SearchBudget { max_nodes: 1 }) {
            SearchOutcome::Refutation(p) => assert_eq!(p.size(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quantified_refutation() {
        let t = th("(theory T (signature (P 1)) (axiom (forall x (P x))) (axiom (exists x (not (P x)))))");
        match search_refutation(&t, &big(), &SearchBudget { max_nodes: 8 }) {
            SearchOutcome::Refutation(p) => {
                assert_eq!(check_closed(&p, &t).unwrap(), Formula::Bot);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn code_bound_hides_later_axioms() {
        let t = th("(theory T (signature (P 0)) (axiom P) (axiom (not P)))");
        let first = t.axioms().next().unwrap().0.clone();
        assert!(search_refutation(&t, &first, &SearchBudget::default()).is_exhausted());
    }

    #[test]
    fn proves_simple_goals() {
        let t = th("(theory T (signature (P 1) (Q 1)) (axiom (forall x (-> (P x) (Q x)))) (axiom (forall x (P x))))");
        let goal = crate::sexp::parse_formula("(forall y (Q y))").unwrap();
        let p = search_proof(&t, &goal, &SearchBudget { max_nodes: 8 }).unwrap();
        assert!(alpha_eq(&check_closed(&p, &t).unwrap(), &goal));
    }
}
