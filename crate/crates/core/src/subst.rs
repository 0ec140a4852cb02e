//! Capture-avoiding substitution and alpha-equivalence.

use crate::syntax::{Bound, Formula, Term, Var};
use std::collections::{BTreeMap, BTreeSet};

/// `phi[x := t]`, renaming bound variables when they would capture a
/// variable of `t`.
pub fn substitute(phi: &Formula, x: Var, t: &Term) -> Formula {
    let mut map = BTreeMap::new();
    map.insert(x, t.clone());
    substitute_map(phi, &map)
}

/// Simultaneous capture-avoiding substitution.
pub fn substitute_map(phi: &Formula, map: &BTreeMap<Var, Term>) -> Formula {
    if map.is_empty() {
        return phi.clone();
    }
    let mut next = fresh_floor(phi, map.values());
    subst_rec(phi, map, &mut next)
}

/// Smallest index above every variable occurring in `phi` or in `terms`.
fn fresh_floor<'a>(phi: &Formula, terms: impl Iterator<Item = &'a Term>) -> u32 {
    let m = terms.filter_map(Term::max_var).max();
    phi.max_var().max(m).map_or(0, |m| m + 1)
}

fn subst_rec(phi: &Formula, map: &BTreeMap<Var, Term>, next: &mut u32) -> Formula {
    match phi {
        Formula::Bot => Formula::Bot,
        Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(|a| a.subst_map(map)).collect()),
        Formula::Not(f) => Formula::not(subst_rec(f, map, next)),
        Formula::Bin(c, a, b) => {
            Formula::Bin(*c, Box::new(subst_rec(a, map, next)), Box::new(subst_rec(b, map, next)))
        }
        Formula::Quant { q, var, bound, body } => {
            let bound = bound.as_ref().map(|b| Bound { kind: b.kind, term: b.term.subst_map(map) });
            let fv = body.free_vars();
            let inner: BTreeMap<Var, Term> = map
                .iter()
                .filter(|(v, _)| **v != *var && fv.contains(v))
                .map(|(v, t)| (*v, t.clone()))
                .collect();
            if inner.is_empty() {
                return Formula::Quant { q: *q, var: *var, bound, body: body.clone() };
            }
            let captures = inner.values().any(|t| t.contains_var(*var));
            if captures {
                let fresh = Var(*next);
                *next += 1;
                let mut inner = inner;
                inner.insert(*var, Term::Var(fresh));
                let body = subst_rec(body, &inner, next);
                Formula::Quant { q: *q, var: fresh, bound, body: Box::new(body) }
            } else {
                let body = subst_rec(body, &inner, next);
                Formula::Quant { q: *q, var: *var, bound, body: Box::new(body) }
            }
        }
    }
}

/// Rename free occurrences of variables according to `map`.
pub fn rename(phi: &Formula, map: &BTreeMap<Var, Var>) -> Formula {
    let tmap: BTreeMap<Var, Term> = map.iter().map(|(a, b)| (*a, Term::Var(*b))).collect();
    substitute_map(phi, &tmap)
}

/// Alpha-equivalence: equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_rec(a, b, &mut Vec::new(), &mut Vec::new())
}

fn var_eq(x: Var, y: Var, env_a: &[Var], env_b: &[Var]) -> bool {
    let ia = env_a.iter().rposition(|v| *v == x);
    let ib = env_b.iter().rposition(|v| *v == y);
    match (ia, ib) {
        (Some(i), Some(j)) => i == j,
        (None, None) => x == y,
        _ => false,
    }
}

fn term_alpha(a: &Term, b: &Term, env_a: &[Var], env_b: &[Var]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => var_eq(*x, *y, env_a, env_b),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_alpha(x, y, env_a, env_b))
        }
        _ => false,
    }
}

fn alpha_rec(a: &Formula, b: &Formula, env_a: &mut Vec<Var>, env_b: &mut Vec<Var>) -> bool {
    match (a, b) {
        (Formula::Bot, Formula::Bot) => true,
        (Formula::Atom(r, xs), Formula::Atom(s, ys)) => {
            r == s && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_alpha(x, y, env_a, env_b))
        }
        (Formula::Not(f), Formula::Not(g)) => alpha_rec(f, g, env_a, env_b),
        (Formula::Bin(c, a1, a2), Formula::Bin(d, b1, b2)) => {
            c == d && alpha_rec(a1, b1, env_a, env_b) && alpha_rec(a2, b2, env_a, env_b)
        }
        (
            Formula::Quant { q: q1, var: v1, bound: bd1, body: f1 },
            Formula::Quant { q: q2, var: v2, bound: bd2, body: f2 },
        ) => {
            if q1 != q2 {
                return false;
            }
            match (bd1, bd2) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    if x.kind != y.kind || !term_alpha(&x.term, &y.term, env_a, env_b) {
                        return false;
                    }
                }
                _ => return false,
            }
            env_a.push(*v1);
            env_b.push(*v2);
            let r = alpha_rec(f1, f2, env_a, env_b);
            env_a.pop();
            env_b.pop();
            r
        }
        _ => false,
    }
}

/// Given `body` (with binder `x`) and `inst`, finds a term `t` with
/// `body[x := t]` alpha-equal to `inst`. Returns `Some(None)` when `x` does not
/// occur free in `body` and the two already agree.
pub fn match_instance(body: &Formula, x: Var, inst: &Formula) -> Option<Option<Term>> {
    let mut found: Option<Term> = None;
    if match_rec(body, inst, x, &mut found, &mut Vec::new(), &mut Vec::new()) {
        // Confirm with real substitution, which also handles capture renaming.
        match &found {
            Some(t) => alpha_eq(&substitute(body, x, t), inst).then_some(found),
            None => alpha_eq(body, inst).then_some(None),
        }
    } else {
        None
    }
}

fn match_term(
    p: &Term,
    t: &Term,
    x: Var,
    found: &mut Option<Term>,
    env_p: &[Var],
    env_t: &[Var],
) -> bool {
    match p {
        Term::Var(v) if *v == x && !env_p.contains(v) => {
            // the instantiating term must not mention variables bound in `t`'s context
            let mut vs = BTreeSet::new();
            t.vars(&mut vs);
            if vs.iter().any(|w| env_t.contains(w)) {
                return false;
            }
            match found {
                Some(prev) => prev == t,
                None => {
                    *found = Some(t.clone());
                    true
                }
            }
        }
        Term::Var(v) => matches!(t, Term::Var(w) if var_eq(*v, *w, env_p, env_t)),
        Term::App(f, xs) => match t {
            Term::App(g, ys) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(a, b)| match_term(a, b, x, found, env_p, env_t))
            }
            Term::Var(_) => false,
        },
    }
}

fn match_rec(
    p: &Formula,
    f: &Formula,
    x: Var,
    found: &mut Option<Term>,
    env_p: &mut Vec<Var>,
    env_t: &mut Vec<Var>,
) -> bool {
    match (p, f) {
        (Formula::Bot, Formula::Bot) => true,
        (Formula::Atom(r, xs), Formula::Atom(s, ys)) => {
            r == s
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(a, b)| match_term(a, b, x, found, env_p, env_t))
        }
        (Formula::Not(a), Formula::Not(b)) => match_rec(a, b, x, found, env_p, env_t),
        (Formula::Bin(c, a1, a2), Formula::Bin(d, b1, b2)) => {
            c == d && match_rec(a1, b1, x, found, env_p, env_t) && match_rec(a2, b2, x, found, env_p, env_t)
        }
        (
            Formula::Quant { q: q1, var: v1, bound: bd1, body: f1 },
            Formula::Quant { q: q2, var: v2, bound: bd2, body: f2 },
        ) => {
            if q1 != q2 {
                return false;
            }
            match (bd1, bd2) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    if a.kind != b.kind || !match_term(&a.term, &b.term, x, found, env_p, env_t) {
                        return false;
                    }
                }
                _ => return false,
            }
            if *v1 == x {
                // x is shadowed below this binder
                env_p.push(*v1);
                env_t.push(*v2);
                let r = alpha_rec(f1, f2, env_p, env_t);
                env_p.pop();
                env_t.pop();
                return r;
            }
            env_p.push(*v1);
            env_t.push(*v2);
            let r = match_rec(f1, f2, x, found, env_p, env_t);
            env_p.pop();
            env_t.pop();
            r
        }
        _ => false,
    }
}

/// A variable index above everything in `phis`.
pub fn fresh_var<'a>(phis: impl IntoIterator<Item = &'a Formula>) -> Var {
    Var(phis.into_iter().filter_map(Formula::max_var).max().map_or(0, |m| m + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn substitution_replaces_free_occurrences() {
        let f = p("(and (P x) (Q y))");
        let g = substitute(&f, Var(0), &Term::zero());
        assert_eq!(g, p("(and (P 0) (Q y))"));
    }

    #[test]
    fn substitution_ignores_bound_variable() {
        let f = p("(forall x (P x))");
        assert_eq!(substitute(&f, Var(0), &Term::succ(Term::var(1))), f);
    }

    #[test]
    fn substitution_renames_on_capture() {
        // (forall y R(x,y))[x := S(y)]
        let f = p("(forall y (R x y))");
        let g = substitute(&f, Var(0), &Term::succ(Term::var(1)));
        match &g {
            Formula::Quant { var, body, .. } => {
                assert_ne!(*var, Var(1));
                assert_eq!(**body, Formula::atom("R", vec![Term::succ(Term::var(1)), Term::Var(*var)]));
            }
            _ => panic!("expected quantifier"),
        }
        assert!(g.free_vars().contains(&Var(1)));
    }

    #[test]
    fn alpha_equivalence() {
        assert!(alpha_eq(&p("(forall x (P x))"), &p("(forall y (P y))")));
        assert!(!alpha_eq(&p("(forall x (R x y))"), &p("(forall y (R y y))")));
        assert!(alpha_eq(&p("(exists x (forall y (R x y)))"), &p("(exists z (forall x (R z x)))")));
        assert!(!alpha_eq(&p("(P x)"), &p("(P y)")));
    }

    #[test]
    fn matching_instances() {
        let body = p("(R x y)");
        let inst = p("(R z y)");
        assert_eq!(match_instance(&body, Var(0), &inst), Some(Some(Term::var(2))));
        assert_eq!(match_instance(&body, Var(0), &p("(R z z)")), None);
        let vac = p("(P y)");
        assert_eq!(match_instance(&vac, Var(0), &vac), Some(None));
    }
}
