//! Proofs of true closed bounded sentences from the defining axioms of
//! `0, S, +, *, <, <=`.
//!
//! Closed terms are rewritten to unary numerals `S^n 0`; atoms are decided by
//! unary arithmetic; bounded quantifiers are expanded case by case; existential
//! quantifiers are instantiated with efficient numerals. `#`, `len` and
//! `half` are outside the supported fragment.

use crate::coding::numeral;
use crate::proof::{eq, Proof};
use crate::sexp::parse_formula;
use crate::subst::substitute;
use crate::syntax::{Conn, Formula, Func, Quant, Signature, Term, Var, EQ, LE, LT};
use crate::theory::TheorySpec;
use std::collections::BTreeMap;

/// Largest value a closed subterm may take; unary expansion is linear in it.
pub const MAX_VALUE: u64 = 400;
/// Search limit for witnesses of unbounded existentials.
pub const WITNESS_LIMIT: u64 = 200;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("formula is false in the standard model: {0}")]
    False(String),
    #[error("outside the supported fragment: {0}")]
    Unsupported(String),
    #[error("value {0} exceeds the unary limit {MAX_VALUE}")]
    TooLarge(u64),
    #[error("formula is not closed: {0}")]
    Open(String),
}

const AXIOMS: [&str; 11] = [
    "(forall x (= (+ x 0) x))",
    "(forall x (forall y (= (+ x (S y)) (S (+ x y)))))",
    "(forall x (= (* x 0) 0))",
    "(forall x (forall y (= (* x (S y)) (+ (* x y) x))))",
    "(forall x (not (= (S x) 0)))",
    "(forall x (forall y (-> (= (S x) (S y)) (= x y))))",
    "(forall x (not (< x 0)))",
    "(forall x (forall y (-> (< x (S y)) (or (< x y) (= x y)))))",
    "(forall x (forall y (-> (or (< x y) (= x y)) (< x (S y)))))",
    "(forall x (forall y (-> (<= x y) (< x (S y)))))",
    "(forall x (forall y (-> (< x (S y)) (<= x y))))",
];

#[derive(Clone, Copy)]
enum Ax {
    Add0,
    AddS,
    Mul0,
    MulS,
    SuccNe0,
    SuccInj,
    Lt0,
    LtSElim,
    LtSIntro,
    LeLt,
    LtLe,
}

/// The defining axioms as sentences.
pub fn base_axioms() -> Vec<Formula> {
    AXIOMS.iter().map(|s| parse_formula(s).expect("fixed axiom")).collect()
}

/// The base arithmetic theory over the arithmetic signature.
pub fn base_theory() -> TheorySpec {
    TheorySpec::finite("Base", Signature::arithmetic("Arith", Vec::<(String, usize)>::new()).unwrap(), base_axioms())
        .expect("base axioms are sentences")
}

fn u(n: u64) -> Term {
    Term::unary(n)
}

/// Proof generator; holds the axiom formulas and a label counter.
pub struct ArithProver {
    axioms: Vec<Formula>,
    next_label: usize,
}

impl Default for ArithProver {
    fn default() -> Self {
        ArithProver::new()
    }
}

impl ArithProver {
    pub fn new() -> ArithProver {
        ArithProver { axioms: base_axioms(), next_label: 0 }
    }

    fn label(&mut self) -> String {
        self.next_label += 1;
        format!("a{}", self.next_label)
    }

    fn ax(&self, a: Ax, ts: &[Term]) -> Proof {
        Proof::forall_e_all(Proof::axiom(self.axioms[a as usize].clone()), ts)
    }

    /// `S^a 0 + S^b 0 = S^(a+b) 0`.
    fn add_lemma(&self, a: u64, b: u64) -> Proof {
        if b == 0 {
            return self.ax(Ax::Add0, &[u(a)]);
        }
        let step = self.ax(Ax::AddS, &[u(a), u(b - 1)]);
        let rec = self.add_lemma(a, b - 1);
        let z = Var(0);
        let lifted = eq::cong(rec, z, &Term::succ(Term::Var(z)));
        eq::trans(step, lifted)
    }

    /// `S^a 0 * S^b 0 = S^(a*b) 0`.
    fn mul_lemma(&self, a: u64, b: u64) -> Proof {
        if b == 0 {
            return self.ax(Ax::Mul0, &[u(a)]);
        }
        let step = self.ax(Ax::MulS, &[u(a), u(b - 1)]);
        let rec = self.mul_lemma(a, b - 1);
        let z = Var(0);
        let lifted = eq::cong(rec, z, &Term::add(Term::Var(z), u(a)));
        eq::trans(eq::trans(step, lifted), self.add_lemma(a * (b - 1), a))
    }

    /// Value of a closed term and a proof of `t = S^v 0`.
    pub fn normalize(&self, t: &Term) -> Result<(u64, Proof), ArithError> {
        let z = Var(0);
        match t {
            Term::Var(_) => Err(ArithError::Open(t.to_string())),
            Term::App(Func::Zero, _) => Ok((0, Proof::refl(Term::zero()))),
            Term::App(Func::Succ, a) => {
                let (v, p) = self.normalize(&a[0])?;
                check_size(v + 1)?;
                Ok((v + 1, eq::cong(p, z, &Term::succ(Term::Var(z)))))
            }
            Term::App(f @ (Func::Add | Func::Mul), a) => {
                let (va, pa) = self.normalize(&a[0])?;
                let (vb, pb) = self.normalize(&a[1])?;
                let app = |x: Term, y: Term| Term::App(*f, vec![x, y]);
                let v = if *f == Func::Add { va + vb } else { va.saturating_mul(vb) };
                check_size(v)?;
                let left = eq::cong(pa, z, &app(Term::Var(z), a[1].clone()));
                let right = eq::cong(pb, z, &app(u(va), Term::Var(z)));
                let lemma = if *f == Func::Add { self.add_lemma(va, vb) } else { self.mul_lemma(va, vb) };
                Ok((v, eq::trans(eq::trans(left, right), lemma)))
            }
            Term::App(f, _) => Err(ArithError::Unsupported(format!("function symbol `{}`", f.symbol()))),
        }
    }

    /// `not (S^a 0 = S^b 0)` refutation: from a proof of the equation, `bot`.
    fn neq_unary(&self, a: u64, b: u64, p: Proof) -> Proof {
        match (a, b) {
            (0, 0) => unreachable!("equal numerals"),
            (_, 0) => Proof::not_e(self.ax(Ax::SuccNe0, &[u(a - 1)]), p),
            (0, _) => self.neq_unary(b, a, eq::sym(p)),
            _ => {
                let inj = self.ax(Ax::SuccInj, &[u(a - 1), u(b - 1)]);
                self.neq_unary(a - 1, b - 1, Proof::imp_e(inj, p))
            }
        }
    }

    /// `S^a 0 < S^b 0` for `a < b`.
    fn lt_unary(&self, a: u64, b: u64) -> Proof {
        let intro = self.ax(Ax::LtSIntro, &[u(a), u(b - 1)]);
        let disj = if b == a + 1 {
            Proof::or_ir(Formula::lt(u(a), u(a)), Proof::refl(u(a)))
        } else {
            Proof::or_il(self.lt_unary(a, b - 1), Formula::eq(u(a), u(b - 1)))
        };
        Proof::imp_e(intro, disj)
    }

    /// `not (S^a 0 < S^b 0)` for `a >= b`.
    fn nlt_unary(&mut self, a: u64, b: u64) -> Proof {
        if b == 0 {
            return self.ax(Ax::Lt0, &[u(a)]);
        }
        let h = self.label();
        let k = self.label();
        let hyp = Formula::lt(u(a), u(b));
        let split = Proof::imp_e(self.ax(Ax::LtSElim, &[u(a), u(b - 1)]), Proof::assume(&h, hyp.clone()));
        let left = Proof::not_e(self.nlt_unary(a, b - 1), Proof::assume(&k, Formula::lt(u(a), u(b - 1))));
        let right = self.neq_unary(a, b - 1, Proof::assume(&k, Formula::eq(u(a), u(b - 1))));
        Proof::not_i(&h, hyp, Proof::or_e(&k, split, left, right))
    }

    /// From `R(A, B)` and `s = A`, `t = B` conclude `R(s, t)`.
    fn transport_in(rel: &str, s: &Term, ps: Proof, pt: Proof, p: Proof) -> Proof {
        let b = rhs(&pt);
        let z = Var(0);
        let step1 = Proof::eq_subst(z, Formula::atom(rel, vec![Term::Var(z), b]), eq::sym(ps), p);
        Proof::eq_subst(z, Formula::atom(rel, vec![s.clone(), Term::Var(z)]), eq::sym(pt), step1)
    }

    /// From `R(s, t)` and `s = A`, `t = B` conclude `R(A, B)`.
    fn transport_out(rel: &str, ps: Proof, pt: Proof, p: Proof) -> Proof {
        let a = rhs(&ps);
        let t = lhs(&pt);
        let z = Var(0);
        let step1 = Proof::eq_subst(z, Formula::atom(rel, vec![Term::Var(z), t]), ps, p);
        Proof::eq_subst(z, Formula::atom(rel, vec![a, Term::Var(z)]), pt, step1)
    }

    fn prove_atom(&mut self, rel: &str, args: &[Term]) -> Result<Proof, ArithError> {
        let (s, t) = binary_args(rel, args)?;
        if rel == EQ && s == t {
            value(s)?;
            return Ok(Proof::refl(s.clone()));
        }
        let (vs, ps) = self.normalize(s)?;
        let (vt, pt) = self.normalize(t)?;
        let holds = atom_holds(rel, vs, vt);
        if !holds {
            return Err(ArithError::False(Formula::atom(rel, args.to_vec()).to_string()));
        }
        Ok(match rel {
            EQ => eq::trans(ps, eq::sym(pt)),
            LT => Self::transport_in(LT, s, ps, pt, self.lt_unary(vs, vt)),
            _ => {
                let le = Proof::imp_e(self.ax(Ax::LtLe, &[u(vs), u(vt)]), self.lt_unary(vs, vt + 1));
                Self::transport_in(LE, s, ps, pt, le)
            }
        })
    }

    fn refute_atom(&mut self, rel: &str, args: &[Term]) -> Result<Proof, ArithError> {
        let (s, t) = binary_args(rel, args)?;
        let (vs, ps) = self.normalize(s)?;
        let (vt, pt) = self.normalize(t)?;
        let atom = Formula::atom(rel, args.to_vec());
        if atom_holds(rel, vs, vt) {
            return Err(ArithError::False(Formula::not(atom).to_string()));
        }
        let h = self.label();
        let hyp = Proof::assume(&h, atom.clone());
        let bot = match rel {
            EQ => {
                let unary = eq::trans(eq::sym(ps), eq::trans(hyp, pt));
                self.neq_unary(vs, vt, unary)
            }
            LT => {
                let unary = Self::transport_out(LT, ps, pt, hyp);
                Proof::not_e(self.nlt_unary(vs, vt), unary)
            }
            _ => {
                let unary = Self::transport_out(LE, ps, pt, hyp);
                let lt = Proof::imp_e(self.ax(Ax::LeLt, &[u(vs), u(vt)]), unary);
                Proof::not_e(self.nlt_unary(vs, vt + 1), lt)
            }
        };
        Ok(Proof::not_i(&h, atom, bot))
    }

    /// Case analysis on `hyp : a < S^m 0`; `case(k, e)` must prove `goal`
    /// from `e : a = S^k 0`.
    fn cases(
        &mut self,
        a: &Term,
        m: u64,
        hyp: Proof,
        goal: &Formula,
        case: &mut dyn FnMut(&mut Self, u64, Proof) -> Result<Proof, ArithError>,
    ) -> Result<Proof, ArithError> {
        if m == 0 {
            let bot = Proof::not_e(self.ax(Ax::Lt0, &[a.clone()]), hyp);
            return Ok(Proof::bot_e(bot, goal.clone()));
        }
        let l = self.label();
        let split = Proof::imp_e(self.ax(Ax::LtSElim, &[a.clone(), u(m - 1)]), hyp);
        let below = self.cases(a, m - 1, Proof::assume(&l, Formula::lt(a.clone(), u(m - 1))), goal, case)?;
        let here = case(self, m - 1, Proof::assume(&l, Formula::eq(a.clone(), u(m - 1))))?;
        Ok(Proof::or_e(&l, split, below, here))
    }

    /// A proof of the true closed sentence `f`.
    pub fn prove(&mut self, f: &Formula) -> Result<Proof, ArithError> {
        match f {
            Formula::Bot => Err(ArithError::False("bot".into())),
            Formula::Atom(r, args) => self.prove_atom(r, args),
            Formula::Not(g) => self.refute(g),
            Formula::Bin(Conn::And, a, b) => Ok(Proof::and_i(self.prove(a)?, self.prove(b)?)),
            Formula::Bin(Conn::Or, a, b) => {
                if truth(a)? {
                    Ok(Proof::or_il(self.prove(a)?, (**b).clone()))
                } else {
                    Ok(Proof::or_ir((**a).clone(), self.prove(b)?))
                }
            }
            Formula::Bin(Conn::Imp, a, b) => {
                let h = self.label();
                if truth(b)? {
                    Ok(Proof::imp_i(&h, (**a).clone(), self.prove(b)?))
                } else {
                    let na = self.refute(a)?;
                    let bot = Proof::not_e(na, Proof::assume(&h, (**a).clone()));
                    Ok(Proof::imp_i(&h, (**a).clone(), Proof::bot_e(bot, (**b).clone())))
                }
            }
            Formula::Quant { q: Quant::Exists, var, bound: None, body } => {
                for k in 0..=WITNESS_LIMIT {
                    let inst = substitute(body, *var, &numeral(k));
                    if truth(&inst)? {
                        let p = self.prove(&inst)?;
                        return Ok(Proof::exists_i(f.clone(), numeral(k), p));
                    }
                }
                Err(ArithError::Unsupported(format!("no witness below {WITNESS_LIMIT} for {f}")))
            }
            Formula::Quant { bound: None, .. } => Err(ArithError::Unsupported(format!("unbounded universal {f}"))),
            Formula::Quant { bound: Some(b), .. } if b.kind == crate::syntax::BoundKind::Sharp => {
                Err(ArithError::Unsupported("sharply bounded quantifier".into()))
            }
            Formula::Quant { q: Quant::Forall, var, bound: Some(b), body } => {
                let (m, pt) = self.normalize(&b.term)?;
                let a = fresh_for(f);
                let at = Term::Var(a);
                let h = self.label();
                let guard = Formula::lt(at.clone(), b.term.clone());
                let z = Var(a.0 + 1);
                let hyp = Proof::eq_subst(z, Formula::lt(at.clone(), Term::Var(z)), pt, Proof::assume(&h, guard.clone()));
                let body_a = substitute(body, *var, &at);
                let (bx, bodyx) = ((*var), (**body).clone());
                let inner = self.cases(&at, m, hyp, &body_a, &mut |me: &mut Self, k, e| {
                    let p = me.prove(&substitute(&bodyx, bx, &u(k)))?;
                    let ctx = substitute(&bodyx, bx, &Term::Var(z));
                    Ok(Proof::eq_subst(z, ctx, eq::sym(e), p))
                })?;
                let unfolded = Proof::forall_i(a, Proof::imp_i(&h, guard, inner));
                Ok(Proof::node(crate::proof::Rule::BDef, f.clone(), vec![unfolded]))
            }
            Formula::Quant { q: Quant::Exists, var, bound: Some(b), body } => {
                let m = value(&b.term)?;
                for k in 0..m {
                    let inst = substitute(body, *var, &numeral(k));
                    if truth(&inst)? {
                        let guard = self.prove_atom(LT, &[numeral(k), b.term.clone()])?;
                        let p = Proof::and_i(guard, self.prove(&inst)?);
                        let target = crate::proof::bdef_partner(f).expect("bounded");
                        let ex = Proof::exists_i(target, numeral(k), p);
                        return Ok(Proof::node(crate::proof::Rule::BDef, f.clone(), vec![ex]));
                    }
                }
                Err(ArithError::False(f.to_string()))
            }
        }
    }

    /// A proof of `not f` for the false closed sentence `f`.
    pub fn refute(&mut self, f: &Formula) -> Result<Proof, ArithError> {
        let h = self.label();
        let hyp = Proof::assume(&h, f.clone());
        let bot = match f {
            Formula::Bot => hyp,
            Formula::Atom(r, args) => return self.refute_atom(r, args),
            Formula::Not(g) => Proof::not_e(hyp, self.prove(g)?),
            Formula::Bin(Conn::And, a, b) => {
                if !truth(a)? {
                    Proof::not_e(self.refute(a)?, Proof::and_el(hyp))
                } else {
                    Proof::not_e(self.refute(b)?, Proof::and_er(hyp))
                }
            }
            Formula::Bin(Conn::Or, a, b) => {
                let l = self.label();
                let left = Proof::not_e(self.refute(a)?, Proof::assume(&l, (**a).clone()));
                let right = Proof::not_e(self.refute(b)?, Proof::assume(&l, (**b).clone()));
                Proof::or_e(&l, hyp, left, right)
            }
            Formula::Bin(Conn::Imp, a, b) => {
                let pb = Proof::imp_e(hyp, self.prove(a)?);
                Proof::not_e(self.refute(b)?, pb)
            }
            Formula::Quant { bound: None, .. } => {
                return Err(ArithError::Unsupported(format!("refuting unbounded quantifier {f}")))
            }
            Formula::Quant { bound: Some(b), .. } if b.kind == crate::syntax::BoundKind::Sharp => {
                return Err(ArithError::Unsupported("sharply bounded quantifier".into()))
            }
            Formula::Quant { q: Quant::Forall, var, bound: Some(b), body } => {
                let m = value(&b.term)?;
                let k = (0..m)
                    .find(|k| matches!(truth(&substitute(body, *var, &numeral(*k))), Ok(false)))
                    .ok_or_else(|| ArithError::False(Formula::not(f.clone()).to_string()))?;
                let inst = substitute(body, *var, &numeral(k));
                let unfolded = Proof::bdef(hyp);
                let imp = Proof::forall_e(unfolded, numeral(k));
                let guard = self.prove_atom(LT, &[numeral(k), b.term.clone()])?;
                Proof::not_e(self.refute(&inst)?, Proof::imp_e(imp, guard))
            }
            Formula::Quant { q: Quant::Exists, var, bound: Some(b), body } => {
                let (m, pt) = self.normalize(&b.term)?;
                let a = fresh_for(f);
                let at = Term::Var(a);
                let z = Var(a.0 + 1);
                let l = self.label();
                let body_a = substitute(body, *var, &at);
                let conj = Formula::and(Formula::lt(at.clone(), b.term.clone()), body_a.clone());
                let guard = Proof::and_el(Proof::assume(&l, conj.clone()));
                let hyp_lt = Proof::eq_subst(z, Formula::lt(at.clone(), Term::Var(z)), pt, guard);
                let (bx, bodyx) = (*var, (**body).clone());
                let lconj = l.clone();
                let minor = self.cases(&at, m, hyp_lt, &Formula::Bot, &mut |me: &mut Self, k, e| {
                    let here = Proof::and_er(Proof::assume(&lconj, conj.clone()));
                    let ctx = substitute(&bodyx, bx, &Term::Var(z));
                    let moved = Proof::eq_subst(z, ctx, e, here);
                    Ok(Proof::not_e(me.refute(&substitute(&bodyx, bx, &u(k)))?, moved))
                })?;
                Proof::exists_e(a, &l, Proof::bdef(hyp), minor)
            }
        };
        Ok(Proof::not_i(&h, f.clone(), bot))
    }
}

fn rhs(p: &Proof) -> Term {
    match &p.conclusion {
        Formula::Atom(_, a) => a[1].clone(),
        _ => unreachable!("equation expected"),
    }
}

fn lhs(p: &Proof) -> Term {
    match &p.conclusion {
        Formula::Atom(_, a) => a[0].clone(),
        _ => unreachable!("equation expected"),
    }
}

fn check_size(v: u64) -> Result<(), ArithError> {
    if v > MAX_VALUE {
        Err(ArithError::TooLarge(v))
    } else {
        Ok(())
    }
}

fn fresh_for(f: &Formula) -> Var {
    Var(f.max_var().map_or(0, |m| m + 1))
}

fn binary_args<'a>(rel: &str, args: &'a [Term]) -> Result<(&'a Term, &'a Term), ArithError> {
    match (rel, args) {
        (EQ | LT | LE, [s, t]) => Ok((s, t)),
        _ => Err(ArithError::Unsupported(format!("relation `{rel}`"))),
    }
}

fn atom_holds(rel: &str, a: u64, b: u64) -> bool {
    match rel {
        EQ => a == b,
        LT => a < b,
        _ => a <= b,
    }
}

/// Standard value of a closed term within the supported fragment.
pub fn value(t: &Term) -> Result<u64, ArithError> {
    eval_nat(t, &BTreeMap::new())
}

fn eval_nat(t: &Term, env: &BTreeMap<Var, u64>) -> Result<u64, ArithError> {
    let v = match t {
        Term::Var(v) => *env.get(v).ok_or_else(|| ArithError::Open(t.to_string()))?,
        Term::App(Func::Zero, _) => 0,
        Term::App(Func::Succ, a) => eval_nat(&a[0], env)? + 1,
        Term::App(Func::Add, a) => eval_nat(&a[0], env)? + eval_nat(&a[1], env)?,
        Term::App(Func::Mul, a) => eval_nat(&a[0], env)?.saturating_mul(eval_nat(&a[1], env)?),
        Term::App(f, _) => return Err(ArithError::Unsupported(format!("function symbol `{}`", f.symbol()))),
    };
    check_size(v)?;
    Ok(v)
}

/// Truth of a closed formula of the supported fragment in the standard model.
pub fn truth(f: &Formula) -> Result<bool, ArithError> {
    truth_env(f, &mut BTreeMap::new())
}

fn truth_env(f: &Formula, env: &mut BTreeMap<Var, u64>) -> Result<bool, ArithError> {
    Ok(match f {
        Formula::Bot => false,
        Formula::Atom(r, args) => {
            let (s, t) = binary_args(r, args)?;
            atom_holds(r, eval_nat(s, env)?, eval_nat(t, env)?)
        }
        Formula::Not(g) => !truth_env(g, env)?,
        Formula::Bin(c, a, b) => {
            let x = truth_env(a, env)?;
            match c {
                Conn::And => x && truth_env(b, env)?,
                Conn::Or => x || truth_env(b, env)?,
                Conn::Imp => !x || truth_env(b, env)?,
            }
        }
        Formula::Quant { q, var, bound, body } => {
            let limit = match bound {
                Some(b) if b.kind == crate::syntax::BoundKind::Plain => eval_nat(&b.term, env)?,
                Some(_) => return Err(ArithError::Unsupported("sharply bounded quantifier".into())),
                None if *q == Quant::Exists => WITNESS_LIMIT + 1,
                None => return Err(ArithError::Unsupported(format!("unbounded universal {f}"))),
            };
            let saved = env.get(var).copied();
            let mut result = *q == Quant::Forall;
            for k in 0..limit {
                env.insert(*var, k);
                let r = truth_env(body, env);
                match r {
                    Ok(b) if b != result => {
                        result = b;
                        break;
                    }
                    Ok(_) => {}
                    Err(e) => {
                        restore(env, *var, saved);
                        return Err(e);
                    }
                }
            }
            restore(env, *var, saved);
            result
        }
    })
}

fn restore(env: &mut BTreeMap<Var, u64>, v: Var, saved: Option<u64>) {
    match saved {
        Some(x) => env.insert(v, x),
        None => env.remove(&v),
    };
}

/// A base-theory proof of the true closed sentence `f`.
pub fn prove_true_bounded(f: &Formula) -> Result<Proof, ArithError> {
    if !f.is_sentence() {
        return Err(ArithError::Open(f.to_string()));
    }
    if !truth(f)? {
        return Err(ArithError::False(f.to_string()));
    }
    ArithProver::new().prove(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check_closed;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn proves(s: &str) {
        let f = p(s);
        let pr = prove_true_bounded(&f).unwrap_or_else(|e| panic!("{s}: {e}"));
        let c = check_closed(&pr, &base_theory()).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(crate::subst::alpha_eq(&c, &f));
    }

    #[test]
    fn two_plus_two() {
        proves("(= (+ (num 2) (num 2)) (num 4))");
    }

    #[test]
    fn bounded_witness() {
        proves("(bex x (num 3) (= x (num 2)))");
    }

    #[test]
    fn reflexivity() {
        proves("(= (num 0) (num 0))");
        let pr = prove_true_bounded(&p("(= 0 0)")).unwrap();
        assert_eq!(pr.size(), 1);
    }

    #[test]
    fn negated_atoms_and_orders() {
        proves("(not (= (num 3) (num 5)))");
        proves("(not (= (num 5) (num 3)))");
        proves("(< (num 2) (num 5))");
        proves("(not (< (num 5) (num 5)))");
        proves("(<= (num 5) (num 5))");
        proves("(not (<= (num 6) (num 5)))");
        proves("(= (* (num 3) (num 4)) (+ (num 5) (num 7)))");
    }

    #[test]
    fn bounded_quantifiers() {
        proves("(ball x (num 4) (< x (num 4)))");
        proves("(not (ball x (num 4) (< x (num 3))))");
        proves("(not (bex x (num 3) (= (* x x) (num 5))))");
        proves("(ball x (num 3) (bex y (num 4) (= y (S x))))");
        proves("(exists x (= (+ x x) (num 6)))");
        proves("(-> (= 0 (S 0)) bot)");
        proves("(or (= 0 (S 0)) (not bot))");
    }

    #[test]
    fn false_and_unsupported() {
        assert!(matches!(prove_true_bounded(&p("(= (num 1) (num 2))")), Err(ArithError::False(_))));
        assert!(matches!(prove_true_bounded(&p("(forall x (= x x))")), Err(ArithError::Unsupported(_))));
        assert!(matches!(prove_true_bounded(&p("(= (half 0) 0)")), Err(ArithError::Unsupported(_))));
    }
}
