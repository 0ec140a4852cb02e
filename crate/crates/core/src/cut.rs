//! Definable cuts: the four obligations, Solovay-style shortening, short
//! membership proofs for efficient numerals, term closure, the Pudlák
//! construction with its finite-model checks, and the Feferman restriction.

use crate::arith::base_axioms;
use crate::coding::{code_syntax, numeral};
use crate::interp::{translate_formula, InterpError, Translation};
use crate::model::{
    atoms_over, compare_definable, eval, Assignment, Disagreement, Elem, ModelError, QuantStep, Side, Structure,
};
use crate::proof::{check_closed, eq, Proof};
use crate::search::{search_refutation, SearchBudget};
use crate::subst::{alpha_eq, fresh_var, substitute, substitute_map};
use crate::syntax::{BoundKind, Formula, Func, Quant, Signature, Term, Var, EQ};
use crate::theory::{Origin, TheoryError, TheorySpec};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CutError {
    #[error("a cut formula has exactly one free variable, found {0}")]
    FreeVars(usize),
    #[error("theory `{0}` is not arithmetical")]
    NotArithmetic(String),
    #[error("obligation `{0}` has no proof")]
    MissingObligation(&'static str),
    #[error("proof of obligation `{clause}` rejected: {msg}")]
    BadObligation { clause: &'static str, msg: String },
    #[error("function symbol `{0}` is not supported")]
    UnsupportedSymbol(&'static str),
    #[error("`{0}` is not a translation of relational arithmetic into a sequential arithmetic theory: {1}")]
    NotSequential(String, String),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Names of the obligations, in order.
pub const CLAUSES: [&str; 4] = ["progressive", "downward", "arithmetic", "omega1"];

fn cut_var(j: &Formula) -> Result<Var, CutError> {
    let fv = j.free_vars();
    if fv.len() != 1 {
        return Err(CutError::FreeVars(fv.len()));
    }
    Ok(*fv.iter().next().expect("one"))
}

fn one() -> Term {
    Term::succ(Term::zero())
}

fn two() -> Term {
    Term::unary(2)
}

fn tv(v: Var) -> Term {
    Term::Var(v)
}

/// The obligations of a definable cut, as universal closures.
pub fn cut_obligations(j: &Formula, u: &TheorySpec) -> Result<Vec<Formula>, CutError> {
    if !u.signature.is_arithmetic() {
        return Err(CutError::NotArithmetic(u.name.clone()));
    }
    obligations_of(j)
}

fn obligations_of(j: &Formula) -> Result<Vec<Formula>, CutError> {
    let v = cut_var(j)?;
    let at = |t: Term| substitute(j, v, &t);
    let (x, y) = (Var(0), Var(1));
    let progressive = Formula::and(
        at(Term::zero()),
        Formula::forall(x, Formula::imp(at(tv(x)), at(Term::add(tv(x), one())))),
    );
    let downward = Formula::forall(
        x,
        Formula::forall(y, Formula::imp(Formula::and(at(tv(x)), Formula::le(tv(y), tv(x))), at(tv(y)))),
    );
    let arithmetic = Formula::forall(
        x,
        Formula::forall(
            y,
            Formula::imp(
                Formula::and(at(tv(x)), at(tv(y))),
                Formula::and(at(Term::add(tv(x), tv(y))), at(Term::mul(tv(x), tv(y)))),
            ),
        ),
    );
    let omega1 = Formula::forall(x, Formula::imp(at(tv(x)), at(Term::omega1(tv(x)))));
    Ok(vec![progressive, downward, arithmetic, omega1])
}

/// A cut formula over a host theory with optional obligation proofs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSpec {
    pub formula: Formula,
    pub var: Var,
    pub host: TheorySpec,
    proofs: [Option<Proof>; 4],
}

impl CutSpec {
    /// Every supplied proof must check in `host` and conclude its obligation.
    pub fn new(formula: Formula, host: TheorySpec, proofs: [Option<Proof>; 4]) -> Result<CutSpec, CutError> {
        let obligations = cut_obligations(&formula, &host)?;
        for ((p, ob), clause) in proofs.iter().zip(&obligations).zip(CLAUSES) {
            let Some(p) = p else { continue };
            let concl =
                check_closed(p, &host).map_err(|e| CutError::BadObligation { clause, msg: e.to_string() })?;
            if !alpha_eq(&concl, ob) {
                return Err(CutError::BadObligation { clause, msg: format!("concludes {concl}, expected {ob}") });
            }
        }
        let var = cut_var(&formula)?;
        Ok(CutSpec { formula, var, host, proofs })
    }

    pub fn obligations(&self) -> Vec<Formula> {
        obligations_of(&self.formula).expect("validated")
    }

    pub fn obligation_proof(&self, i: usize) -> Option<&Proof> {
        self.proofs[i].as_ref()
    }

    /// `J(t)`.
    pub fn at(&self, t: &Term) -> Formula {
        substitute(&self.formula, self.var, t)
    }

    /// `J = (x = x)` over the base theory.
    pub fn top() -> CutSpec {
        let (x, y) = (Var(0), Var(1));
        let j = Formula::top_like(x);
        let jx = j.clone();
        let jy = Formula::top_like(y);
        let p1 = Proof::and_i(
            Proof::refl(Term::zero()),
            Proof::forall_i(x, Proof::imp_i("h", jx.clone(), Proof::refl(Term::add(tv(x), one())))),
        );
        let p2 = Proof::forall_i(
            x,
            Proof::forall_i(
                y,
                Proof::imp_i("h", Formula::and(jx.clone(), Formula::le(tv(y), tv(x))), Proof::refl(tv(y))),
            ),
        );
        let p3 = Proof::forall_i(
            x,
            Proof::forall_i(
                y,
                Proof::imp_i(
                    "h",
                    Formula::and(jx.clone(), jy),
                    Proof::and_i(Proof::refl(Term::add(tv(x), tv(y))), Proof::refl(Term::mul(tv(x), tv(y)))),
                ),
            ),
        );
        let p4 = Proof::forall_i(x, Proof::imp_i("h", jx, Proof::refl(Term::omega1(tv(x)))));
        CutSpec::new(j, crate::arith::base_theory(), [Some(p1), Some(p2), Some(p3), Some(p4)]).expect("fixture")
    }

    /// A cut by fiat: a fresh predicate `I` whose obligations are axioms
    /// added to the base theory.
    pub fn axiomatic() -> CutSpec {
        let sig = Signature::arithmetic("ArithI", [("I", 1)]).expect("fixture signature");
        let j = Formula::rel("I", &[Var(0)]);
        let obligations = obligations_of(&j).expect("one free variable");
        let mut axioms = base_axioms();
        axioms.extend(obligations.iter().cloned());
        let host = TheorySpec::finite("BaseI", sig, axioms).expect("sentences");
        let proofs = obligations.into_iter().map(|o| Some(Proof::axiom(o))).collect::<Vec<_>>();
        CutSpec::new(j, host, proofs.try_into().expect("four")).expect("fixture")
    }

    fn need(&self, i: usize) -> Result<Proof, CutError> {
        self.proofs[i].clone().ok_or(CutError::MissingObligation(CLAUSES[i]))
    }

    fn zero_proof(&self) -> Result<Proof, CutError> {
        Ok(Proof::and_el(self.need(0)?))
    }

    /// `J(S t)` from a proof of `J(t)`.
    fn succ_proof(&self, p: Proof, t: &Term) -> Result<Proof, CutError> {
        let ax = base_axioms();
        let step = Proof::imp_e(Proof::forall_e(Proof::and_er(self.need(0)?), t.clone()), p);
        let add_s = Proof::forall_e_all(Proof::axiom(ax[1].clone()), &[t.clone(), Term::zero()]);
        let add_0 = Proof::forall_e(Proof::axiom(ax[0].clone()), t.clone());
        let z = self.fresh(&[t]);
        let lifted = eq::cong(add_0, z, &Term::succ(tv(z)));
        let e = eq::trans(add_s, lifted);
        Ok(Proof::eq_subst(z, self.at(&tv(z)), e, step))
    }

    fn fresh(&self, ts: &[&Term]) -> Var {
        let m = ts.iter().filter_map(|t| t.max_var()).chain(self.formula.max_var()).max();
        Var(m.map_or(0, |m| m + 1))
    }

    /// `forall x (J(x) -> J(2*x))` and `forall x (J(x) -> J(S(2*x)))`, with
    /// `2` written `SS0`.
    pub fn doubling_lemmas(&self) -> Result<(Proof, Proof), CutError> {
        let x = self.fresh(&[]);
        let jtwo = self.succ_proof(self.succ_proof(self.zero_proof()?, &Term::zero())?, &one())?;
        let hx = Proof::assume("m", self.at(&tv(x)));
        let dbl = Term::mul(two(), tv(x));
        let p = Proof::and_er(Proof::imp_e(
            Proof::forall_e_all(self.need(2)?, &[two(), tv(x)]),
            Proof::and_i(jtwo, hx),
        ));
        let odd = self.succ_proof(p.clone(), &dbl)?;
        let even = Proof::forall_i(x, Proof::imp_i("m", self.at(&tv(x)), p));
        let odd = Proof::forall_i(x, Proof::imp_i("m", self.at(&tv(x)), odd));
        Ok((even, odd))
    }
}

/// A proof of `J(numeral(n))` following the binary digits of `n`.
pub fn prove_cut_membership(c: &CutSpec, n: u64) -> Result<Proof, CutError> {
    MembershipProver::new(c)?.prove(n)
}

/// [`prove_cut_membership`] with the doubling lemmas built once.
pub struct MembershipProver<'a> {
    cut: &'a CutSpec,
    lemmas: (Proof, Proof),
}

impl<'a> MembershipProver<'a> {
    pub fn new(cut: &'a CutSpec) -> Result<MembershipProver<'a>, CutError> {
        for i in 0..3 {
            cut.need(i)?;
        }
        Ok(MembershipProver { cut, lemmas: cut.doubling_lemmas()? })
    }

    pub fn prove(&self, n: u64) -> Result<Proof, CutError> {
        membership_rec(self.cut, n, &self.lemmas)
    }
}

fn membership_rec(c: &CutSpec, n: u64, lemmas: &(Proof, Proof)) -> Result<Proof, CutError> {
    if n == 0 {
        return c.zero_proof();
    }
    let half = membership_rec(c, n / 2, lemmas)?;
    let lemma = if n % 2 == 0 { &lemmas.0 } else { &lemmas.1 };
    Ok(Proof::imp_e(Proof::forall_e(lemma.clone(), numeral(n / 2)), half))
}

/// The numbers visited by [`prove_cut_membership`], from `0` up to `n`.
pub fn membership_path(n: u64) -> Vec<u64> {
    let mut path = vec![n];
    let mut k = n;
    while k > 0 {
        k /= 2;
        path.push(k);
    }
    path.reverse();
    path
}

/// `forall x1 ... forall xk (J(x1) -> ... -> J(xk) -> J(t))` over the
/// variables of `t` in ascending order.
pub fn prove_term_closure(c: &CutSpec, t: &Term) -> Result<Proof, CutError> {
    let mut vars = BTreeSet::new();
    t.vars(&mut vars);
    let mut p = term_rec(c, t)?;
    for v in vars.iter().rev() {
        p = Proof::imp_i(&hyp_label(*v), c.at(&tv(*v)), p);
    }
    for v in vars.iter().rev() {
        p = Proof::forall_i(*v, p);
    }
    Ok(p)
}

fn hyp_label(v: Var) -> String {
    format!("in-{}", crate::sexp::var_name(v))
}

fn term_rec(c: &CutSpec, t: &Term) -> Result<Proof, CutError> {
    Ok(match t {
        Term::Var(v) => Proof::assume(&hyp_label(*v), c.at(t)),
        Term::App(f, args) => match f {
            Func::Zero => c.zero_proof()?,
            Func::Succ => c.succ_proof(term_rec(c, &args[0])?, &args[0])?,
            Func::Add | Func::Mul => {
                let both = Proof::imp_e(
                    Proof::forall_e_all(c.need(2)?, &[args[0].clone(), args[1].clone()]),
                    Proof::and_i(term_rec(c, &args[0])?, term_rec(c, &args[1])?),
                );
                if *f == Func::Add {
                    Proof::and_el(both)
                } else {
                    Proof::and_er(both)
                }
            }
            Func::Smash if args[0] == args[1] => {
                Proof::imp_e(Proof::forall_e(c.need(3)?, args[0].clone()), term_rec(c, &args[0])?)
            }
            other => return Err(CutError::UnsupportedSymbol(other.symbol())),
        },
    })
}

/// Shortening of `J0` to an initial segment closed under `+`, `*` and `#`:
/// `I1(x) = J0(x) and forall y<x J0(y)`, then each of `+`, `*`, `#` in turn
/// by `I'(x) = I(x) and forall y (I(y) -> I(y o x))`.
pub fn close_cut(j0: &Formula) -> Result<Formula, CutError> {
    let v = cut_var(j0)?;
    let y = fresh_var([j0]);
    let i1 = Formula::and(
        j0.clone(),
        Formula::bounded(Quant::Forall, y, BoundKind::Plain, tv(v), substitute(j0, v, &tv(y))),
    );
    let step = |prev: Formula, op: fn(Term, Term) -> Term| {
        let y = fresh_var([&prev]);
        let at = |t: Term| substitute(&prev, v, &t);
        let closed = Formula::forall(y, Formula::imp(at(tv(y)), at(op(tv(y), tv(v)))));
        Formula::and(prev.clone(), closed)
    };
    Ok(step(step(step(i1, Term::add), Term::mul), Term::smash))
}

/// Elements `x` of `m` with `m |= phi(x)`.
pub fn extension(m: &Structure, phi: &Formula) -> Result<Vec<Elem>, CutError> {
    let v = cut_var(phi)?;
    let mut out = Vec::new();
    for e in m.domain() {
        if eval(m, phi, &Assignment::from([(v, e)]))? {
            out.push(e);
        }
    }
    Ok(out)
}

pub const ZERO: &str = "Zero";
pub const ONE: &str = "One";
pub const ADD: &str = "Add";
pub const MUL: &str = "Mul";
pub const LEQ: &str = "Le";
pub const LH: &str = "Lh";
pub const ENT: &str = "Ent";

/// Relational arithmetic: `Zero/1, One/1, Add/3, Mul/3, Le/2`.
pub fn v_signature() -> Signature {
    Signature::relational("RelArith", [(ZERO, 1), (ONE, 1), (ADD, 3), (MUL, 3), (LEQ, 2)]).expect("fixed")
}

/// Arithmetic with `Lh(s, n)` (length) and `Ent(s, i, e)` (entry `i` is `e`).
pub fn sequential_signature() -> Signature {
    Signature::arithmetic("SeqArith", [(LH, 2), (ENT, 3)]).expect("fixed")
}

/// Sequence variable of `Goodsequence`; `x` and `y` are `Var(0)`, `Var(1)`.
pub const SIGMA: Var = Var(2);
const X: Var = Var(0);
const Y: Var = Var(1);

/// Goodsequence as named clauses over `sigma, x, y`, and the formulas
/// built from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PudlakArtifacts {
    pub translation: Translation,
    /// The cut `I` over the source, for the relative variant.
    pub relative: Option<Formula>,
    pub clauses: Vec<(String, Formula)>,
    pub goodsequence: Formula,
    pub h: Formula,
    pub jprime: Formula,
    pub j: Formula,
}

struct Fresh(u32);

impl Fresh {
    fn var(&mut self) -> Var {
        self.0 += 1;
        Var(self.0)
    }
}

fn check_sequential(j: &Translation) -> Result<(), CutError> {
    let bad = |m: String| Err(CutError::NotSequential(j.name.clone(), m));
    if !j.target.is_arithmetic() {
        return bad("target is not arithmetical".into());
    }
    for (r, n) in [(LH, 2), (ENT, 3)] {
        if j.target.arity(r) != Some(n) {
            return bad(format!("target lacks {r}/{n}"));
        }
    }
    for (r, n) in v_signature().relations() {
        if j.source.arity(r) != Some(n) {
            return bad(format!("source lacks {r}/{n}"));
        }
    }
    Ok(())
}

struct Builder<'a> {
    j: &'a Translation,
    fresh: Fresh,
}

impl Builder<'_> {
    fn ent(&self, s: Term, i: Term, e: Term) -> Formula {
        Formula::atom(ENT, vec![s, i, e])
    }

    fn eqj(&self, a: Term, b: Term) -> Formula {
        self.j.image_at(EQ, &[a, b]).expect("total")
    }

    fn img(&self, r: &str, args: &[Term]) -> Formula {
        self.j.image_at(r, args).expect("total")
    }

    fn delta(&self, t: Term) -> Formula {
        self.j.delta_at(&t)
    }

    /// `exists v (delta(v) and body(v))`, the relativized quantifier.
    fn some(&mut self, body: impl FnOnce(&mut Self, Term) -> Formula) -> Formula {
        let v = self.fresh.var();
        let b = body(self, tv(v));
        Formula::exists(v, Formula::and(self.delta(tv(v)), b))
    }

    /// `exists e (Ent(s, i, e) and body(e))`.
    fn entry(&mut self, s: Term, i: Term, body: impl FnOnce(&mut Self, Term) -> Formula) -> Formula {
        let e = self.fresh.var();
        let b = body(self, tv(e));
        Formula::exists(e, Formula::and(self.ent(s, i, tv(e)), b))
    }

    /// `forall i (i < t -> body(i))`.
    fn below(&mut self, t: Term, body: impl FnOnce(&mut Self, Term) -> Formula) -> Formula {
        let i = self.fresh.var();
        let b = body(self, tv(i));
        Formula::forall(i, Formula::imp(Formula::lt(tv(i), t), b))
    }

    /// `forall i (i <= t -> body(i))`.
    fn upto(&mut self, t: Term, body: impl FnOnce(&mut Self, Term) -> Formula) -> Formula {
        let i = self.fresh.var();
        let b = body(self, tv(i));
        Formula::forall(i, Formula::imp(Formula::le(tv(i), t), b))
    }

    fn law(&mut self, op: fn(Term, Term) -> Term, rel: &str) -> Formula {
        let (s, x) = (tv(SIGMA), tv(X));
        self.upto(x.clone(), |b, k| {
            b.upto(x.clone(), |b, l| {
                let kl = op(k.clone(), l.clone());
                let inner = b.entry(s.clone(), k.clone(), |b, a| {
                    b.entry(s.clone(), l.clone(), |b, c| {
                        b.entry(s.clone(), kl.clone(), |b, d| {
                            b.some(|b, r| Formula::and(b.img(rel, &[a, c, r.clone()]), b.eqj(r, d)))
                        })
                    })
                });
                Formula::imp(Formula::le(kl, x.clone()), inner)
            })
        })
    }

    fn clauses(&mut self, relative: Option<&Formula>) -> Result<Vec<(String, Formula)>, CutError> {
        let (s, x, y) = (tv(SIGMA), tv(X), tv(Y));
        let mut out = vec![("length".to_string(), Formula::atom(LH, vec![s.clone(), Term::add(x.clone(), one())]))];
        let anchor = self.entry(s.clone(), Term::zero(), |b, e| b.some(|b, z| Formula::and(b.img(ZERO, &[z.clone()]), b.eqj(e, z))));
        out.push(("anchor-zero".into(), anchor));
        let end = self.entry(s.clone(), x.clone(), |b, e| b.eqj(e, y.clone()));
        out.push(("anchor-end".into(), end));
        let delta = self.upto(x.clone(), |b, i| b.entry(s.clone(), i, |b, e| b.delta(e)));
        out.push(("delta".into(), delta));
        let succ = self.below(x.clone(), |b, i| {
            b.entry(s.clone(), i.clone(), |b, e| {
                b.entry(s.clone(), Term::succ(i), |b, f| {
                    b.some(|b, o| {
                        Formula::and(
                            b.img(ONE, &[o.clone()]),
                            b.some(|b, r| Formula::and(b.img(ADD, &[e, o, r.clone()]), b.eqj(f, r))),
                        )
                    })
                })
            })
        });
        out.push(("successor".into(), succ));
        let plus = self.law(Term::add, ADD);
        out.push(("plus-law".into(), plus));
        let times = self.law(Term::mul, MUL);
        out.push(("times-law".into(), times));
        let a = self.fresh.var();
        let covered = self.upto(x.clone(), |b, i| {
            let i2 = i.clone();
            let e = b.fresh.var();
            let _ = i2;
            Formula::and(Formula::le(i.clone(), x.clone()), Formula::exists(e, Formula::and(b.ent(s.clone(), i, tv(e)), b.eqj(tv(e), tv(a)))))
        });
        // the surjectivity clause wants an existential over i, not the
        // universal `upto` builds; rebuild it from the parts
        let exists_i = match covered {
            Formula::Quant { var, body, .. } => match *body {
                Formula::Bin(_, _, inner) => Formula::exists(var, *inner),
                _ => unreachable!("upto builds an implication"),
            },
            _ => unreachable!("upto builds a quantifier"),
        };
        let surj = Formula::forall(
            a,
            Formula::imp(self.delta(tv(a)), Formula::imp(self.img(LEQ, &[tv(a), y.clone()]), exists_i)),
        );
        out.push(("surjectivity".into(), surj));
        if let Some(i_formula) = relative {
            let iv = cut_var(i_formula)?;
            let ij = translate_formula(self.j, i_formula)?;
            let conf = self.upto(x, |b, i| b.entry(s.clone(), i, |_, e| substitute(&ij, iv, &e)));
            out.push(("image-in-cut".into(), conf));
        }
        Ok(out)
    }
}

impl PudlakArtifacts {
    /// Rebuilds `Goodsequence`, `H`, `J'` and `J` from a clause list.
    pub fn from_clauses(
        translation: Translation,
        relative: Option<Formula>,
        clauses: Vec<(String, Formula)>,
    ) -> Result<PudlakArtifacts, CutError> {
        let goodsequence = Formula::conj(clauses.iter().map(|(_, f)| f.clone()).collect()).expect("nonempty");
        let top = goodsequence.max_var().unwrap_or(2);
        let (s2, y2) = (Var(top + 1), Var(top + 2));
        let renamed = substitute_map(&goodsequence, &BTreeMap::from([(SIGMA, tv(s2)), (Y, tv(y2))]));
        let eq_yy = translation.image_at(EQ, &[tv(Y), tv(y2)])?;
        let h = Formula::and(
            Formula::exists(SIGMA, goodsequence.clone()),
            Formula::forall(s2, Formula::forall(y2, Formula::imp(renamed, eq_yy))),
        );
        let top = h.max_var().unwrap_or(1);
        let (x2, y3) = (Var(top + 1), Var(top + 2));
        let h_at = substitute_map(&h, &BTreeMap::from([(X, tv(x2)), (Y, tv(y3))]));
        let jprime = Formula::forall(x2, Formula::imp(Formula::le(tv(x2), tv(X)), Formula::exists(y3, h_at)));
        let j = close_cut(&jprime)?;
        Ok(PudlakArtifacts { translation, relative, clauses, goodsequence, h, jprime, j })
    }

    pub fn clause(&self, name: &str) -> Option<&Formula> {
        self.clauses.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Replaces one named clause and rebuilds.
    pub fn with_clause(&self, name: &str, f: Formula) -> Result<PudlakArtifacts, CutError> {
        let mut clauses = self.clauses.clone();
        for c in clauses.iter_mut().filter(|(n, _)| n == name) {
            c.1 = f.clone();
        }
        PudlakArtifacts::from_clauses(self.translation.clone(), self.relative.clone(), clauses)
    }

    /// `I^j` with its free variable, for the relative variant.
    pub fn relative_image(&self) -> Option<(Var, Formula)> {
        let i = self.relative.as_ref()?;
        Some((cut_var(i).ok()?, translate_formula(&self.translation, i).ok()?))
    }

    /// S-expression listing of every artifact.
    pub fn to_sexp_string(&self) -> String {
        let mut s = format!("(pudlak {}\n", self.translation.name);
        if let Some(i) = &self.relative {
            s += &format!("  (relative {i})\n");
        }
        for (n, f) in &self.clauses {
            s += &format!("  (clause {n} {f})\n");
        }
        s += &format!("  (goodsequence {})\n  (h {})\n  (jprime {})\n  (j {}))\n", self.goodsequence, self.h, self.jprime, self.j);
        s
    }
}

/// `Goodsequence`, `H`, `J'` and `J` for `j`.
pub fn build_pudlak(j: &Translation) -> Result<PudlakArtifacts, CutError> {
    build(j, None)
}

/// As [`build_pudlak`] with every entry confined to `I^j`; `I` is a cut
/// formula over the source of `j`.
pub fn build_pudlak_relative(j: &Translation, i: &Formula) -> Result<PudlakArtifacts, CutError> {
    build(j, Some(i))
}

fn build(j: &Translation, relative: Option<&Formula>) -> Result<PudlakArtifacts, CutError> {
    check_sequential(j)?;
    let mut b = Builder { j, fresh: Fresh(SIGMA.0) };
    let clauses = b.clauses(relative)?;
    PudlakArtifacts::from_clauses(j.clone(), relative.cloned(), clauses)
}

/// `sigma_0 =^j 1^j` in place of `sigma_0 =^j 0^j`.
pub fn shifted_anchor(art: &PudlakArtifacts) -> Result<PudlakArtifacts, CutError> {
    let mut b = Builder { j: &art.translation, fresh: Fresh(art.goodsequence.max_var().unwrap_or(2) + 2) };
    let f = b.entry(tv(SIGMA), Term::zero(), |b, e| b.some(|b, z| Formula::and(b.img(ONE, &[z.clone()]), b.eqj(e, z))));
    art.with_clause("anchor-zero", f)
}

fn parse_fixture(name: &str, delta: &str, images: &[(&str, &str)]) -> Translation {
    let src = images.iter().map(|(r, f)| format!("(rel {r} {f})")).collect::<Vec<_>>().join(" ");
    let text = format!(
        "(translation {name} (source (signature (Zero 1) (One 1) (Add 3) (Mul 3) (Le 2))) \
         (target (arithmetic (Lh 2) (Ent 3))) (delta {delta}) {src})"
    );
    Translation::parse(&text).expect("fixture translation")
}

/// Relational arithmetic read off the host's own numbers.
pub fn identity_fixture() -> Translation {
    parse_fixture(
        "numbers",
        "(<= x x)",
        &[
            (ZERO, "(= x 0)"),
            (ONE, "(= x (S 0))"),
            (ADD, "(= (+ x y) z)"),
            (MUL, "(= (* x y) z)"),
            (LEQ, "(<= x y)"),
        ],
    )
}

/// Each number `n` stands for `floor(n/2)`; identity becomes a proper
/// equivalence.
pub fn floor_half_fixture() -> Translation {
    parse_fixture(
        "halves",
        "(<= x x)",
        &[
            (EQ, "(= (half x) (half y))"),
            (ZERO, "(= (half x) 0)"),
            (ONE, "(= (half x) (S 0))"),
            (ADD, "(= (+ (half x) (half y)) (half z))"),
            (MUL, "(= (* (half x) (half y)) (half z))"),
            (LEQ, "(<= (half x) (half y))"),
        ],
    )
}

/// Which chains the host's sequence universe contains besides every
/// sequence of length one and two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainStarts {
    /// Chains of canonical representatives from the representative of `0^j`.
    Zero,
    /// Chains from every canonical representative.
    Every,
}

/// A finite host: numbers `0..numbers` followed by sequence elements.
#[derive(Clone, Debug)]
pub struct HostModel {
    pub structure: Structure,
    pub numbers: u32,
    pub sequences: Vec<Vec<Elem>>,
}

impl HostModel {
    pub fn sequence_element(&self, s: &[Elem]) -> Option<Elem> {
        self.sequences.iter().position(|t| t == s).map(|i| self.numbers + i as Elem)
    }
}

/// Semantic view of `j` on the numbers of a host.
struct View {
    dom: Vec<Elem>,
    rep: BTreeMap<Elem, Elem>,
}

fn view(m: &Structure, j: &Translation, elems: impl Iterator<Item = Elem>) -> Result<View, ModelError> {
    let dv = j.delta_var();
    let mut dom = Vec::new();
    for e in elems {
        if eval(m, j.delta(), &Assignment::from([(dv, e)]))? {
            dom.push(e);
        }
    }
    let eqf = j.image(EQ).expect("total");
    let mut rep = BTreeMap::new();
    let mut reps: Vec<Elem> = Vec::new();
    for &a in &dom {
        let mut found = None;
        for &r in &reps {
            if eval(m, eqf, &Assignment::from([(X, r), (Y, a)]))? {
                found = Some(r);
                break;
            }
        }
        match found {
            Some(r) => {
                rep.insert(a, r);
            }
            None => {
                reps.push(a);
                rep.insert(a, a);
            }
        }
    }
    Ok(View { dom, rep })
}

fn holds(m: &Structure, f: &Formula, args: &[Elem]) -> Result<bool, ModelError> {
    let a: Assignment = args.iter().enumerate().map(|(i, e)| (Var(i as u32), *e)).collect();
    eval(m, f, &a)
}

/// Builds the host for `j` with `numbers` numbers.
pub fn build_host(j: &Translation, numbers: u32, starts: ChainStarts) -> Result<HostModel, CutError> {
    check_sequential(j)?;
    let plain = Structure::with_numbers(j.target.clone(), numbers, numbers);
    let v = view(&plain, j, 0..numbers)?;
    let image = |r: &str| j.image(r).expect("total");
    let mut zero = None;
    let mut ones = Vec::new();
    for &a in &v.dom {
        if zero.is_none() && holds(&plain, image(ZERO), &[a])? {
            zero = Some(v.rep[&a]);
        }
        if holds(&plain, image(ONE), &[a])? {
            ones.push(a);
        }
    }
    let mut succ = BTreeMap::new();
    for &r in v.rep.values().collect::<BTreeSet<_>>() {
        'find: for &o in &ones {
            for &s in &v.dom {
                if holds(&plain, image(ADD), &[r, o, s])? {
                    succ.insert(r, v.rep[&s]);
                    break 'find;
                }
            }
        }
    }
    let max_len = numbers.saturating_sub(1) as usize;
    let mut seqs: BTreeSet<Vec<Elem>> = BTreeSet::new();
    for &a in &v.dom {
        if max_len >= 1 {
            seqs.insert(vec![a]);
        }
        if max_len >= 2 {
            for &b in &v.dom {
                seqs.insert(vec![a, b]);
            }
        }
    }
    let starts: Vec<Elem> = match starts {
        ChainStarts::Zero => zero.into_iter().collect(),
        ChainStarts::Every => v.rep.values().copied().collect::<BTreeSet<_>>().into_iter().collect(),
    };
    for s in starts {
        let mut chain = vec![s];
        while chain.len() <= max_len {
            seqs.insert(chain.clone());
            match succ.get(chain.last().expect("nonempty")) {
                Some(&n) => chain.push(n),
                None => break,
            }
        }
    }
    let sequences: Vec<Vec<Elem>> = seqs.into_iter().collect();
    let mut m = Structure::with_numbers(j.target.clone(), numbers + sequences.len() as u32, numbers);
    for (k, s) in sequences.iter().enumerate() {
        let id = numbers + k as Elem;
        m.set(LH, vec![id, s.len() as Elem], true);
        for (i, e) in s.iter().enumerate() {
            m.set(ENT, vec![id, i as Elem, *e], true);
        }
    }
    Ok(HostModel { structure: m, numbers, sequences })
}

/// `Goodsequence`, `H` and `J'` computed clause by clause on a host.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PudlakTables {
    /// `x -> [(sigma, y)]` with `Goodsequence(sigma, x, y)`.
    pub good: BTreeMap<Elem, Vec<(Elem, Elem)>>,
    /// `x -> [y]` with `H(x, y)`.
    pub h: BTreeMap<Elem, Vec<Elem>>,
    /// Numbers in the extension of `J'`.
    pub jprime: Vec<Elem>,
}

pub fn pudlak_tables(host: &HostModel, art: &PudlakArtifacts) -> Result<PudlakTables, ModelError> {
    let m = &host.structure;
    let (fixed, with_y): (Vec<&Formula>, Vec<&Formula>) =
        art.clauses.iter().map(|(_, f)| f).partition(|f| !f.has_free(Y));
    let mut t = PudlakTables::default();
    for s in m.domain() {
        for x in 0..host.numbers {
            let mut a = Assignment::from([(SIGMA, s), (X, x), (Y, 0)]);
            let mut ok = true;
            for f in &fixed {
                if !eval(m, f, &a)? {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for y in m.domain() {
                a.insert(Y, y);
                let mut all = true;
                for f in &with_y {
                    if !eval(m, f, &a)? {
                        all = false;
                        break;
                    }
                }
                if all {
                    t.good.entry(x).or_default().push((s, y));
                }
            }
        }
    }
    let eqf = art.translation.image(EQ).expect("total");
    for (x, goods) in &t.good {
        let ys: BTreeSet<Elem> = goods.iter().map(|(_, y)| *y).collect();
        let mut hs = Vec::new();
        for &y in &ys {
            let mut unique = true;
            for &y2 in &ys {
                if !holds(m, eqf, &[y, y2])? {
                    unique = false;
                    break;
                }
            }
            if unique {
                hs.push(y);
            }
        }
        if !hs.is_empty() {
            t.h.insert(*x, hs);
        }
    }
    for x in 0..host.numbers {
        if (0..=x).all(|x2| t.h.contains_key(&x2)) {
            t.jprime.push(x);
        }
    }
    Ok(t)
}

/// Names of the clauses that fail on the intended sequence for `x`: the
/// chain of canonical representatives from `0^j`, with `y` its last entry.
pub fn diagnose_clauses(host: &HostModel, art: &PudlakArtifacts, x: Elem) -> Result<Vec<String>, CutError> {
    let intended = host
        .sequences
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() == x as usize + 1)
        .find(|(_, s)| is_intended_chain(host, art, s).unwrap_or(false));
    let Some((k, s)) = intended else {
        return Ok(vec![format!("no intended sequence of length {} in the host", x + 1)]);
    };
    let a = Assignment::from([(SIGMA, host.numbers + k as Elem), (X, x), (Y, *s.last().expect("nonempty"))]);
    let mut out = Vec::new();
    for (name, f) in &art.clauses {
        if !eval(&host.structure, f, &a)? {
            out.push(name.clone());
        }
    }
    Ok(out)
}

fn is_intended_chain(host: &HostModel, art: &PudlakArtifacts, s: &[Elem]) -> Result<bool, CutError> {
    let m = &host.structure;
    let j = &art.translation;
    let v = view(m, j, 0..host.numbers)?;
    let canon = |e: &Elem| v.rep.get(e) == Some(e);
    if !s.iter().all(canon) || !holds(m, j.image(ZERO).expect("total"), &[s[0]])? {
        return Ok(false);
    }
    for w in s.windows(2) {
        let mut step = false;
        for &o in &v.dom {
            if holds(m, j.image(ONE).expect("total"), &[o])? && holds(m, j.image(ADD).expect("total"), &[w[0], o, w[1]])?
            {
                step = true;
                break;
            }
        }
        if !step {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the Delta0 agreement check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementReport {
    pub jprime: Vec<Elem>,
    /// `H` is a function modulo `=^j` on every `x`.
    pub functional: bool,
    pub classes: usize,
    pub disagreement: Option<Disagreement>,
    /// Problems located in the construction itself.
    pub diagnosis: Vec<String>,
}

impl AgreementReport {
    pub fn is_empty(&self) -> bool {
        self.functional && self.disagreement.is_none() && self.diagnosis.is_empty()
    }
}

/// Standard relational arithmetic on `0..n`.
pub fn standard_v_structure(n: u32) -> Structure {
    let mut m = Structure::new(v_signature(), n);
    if n > 0 {
        m.set(ZERO, vec![0], true);
    }
    if n > 1 {
        m.set(ONE, vec![1], true);
    }
    for a in 0..n {
        for b in 0..n {
            if a + b < n {
                m.set(ADD, vec![a, b, a + b], true);
            }
            if a * b < n {
                m.set(MUL, vec![a, b, a * b], true);
            }
            if a <= b {
                m.set(LEQ, vec![a, b], true);
            }
        }
    }
    m
}

/// Compares `phi(x)` on `J'` with `phi^j(h(x))` on the host for every
/// formula built from relational atoms over `vars` variables by the
/// connectives and the bounded quantifiers `forall/exists x_i (Le(x_i, x_k) ...)`,
/// up to `depth`.
pub fn check_delta0_agreement(
    host: &HostModel,
    art: &PudlakArtifacts,
    depth: usize,
    vars: usize,
) -> Result<AgreementReport, CutError> {
    let m = &host.structure;
    let t = pudlak_tables(host, art)?;
    let eqf = art.translation.image(EQ).expect("total");
    let mut functional = true;
    for ys in t.good.values() {
        let ys: BTreeSet<Elem> = ys.iter().map(|(_, y)| *y).collect();
        for &a in t.h.values().flatten().filter(|y| ys.contains(y)) {
            for &b in t.h.values().flatten().filter(|y| ys.contains(y)) {
                functional &= holds(m, eqf, &[a, b])?;
            }
        }
    }
    let mut report =
        AgreementReport { jprime: t.jprime.clone(), functional, classes: 0, disagreement: None, diagnosis: vec![] };
    let n = t.jprime.len() as u32;
    if n == 0 {
        report.diagnosis.push("J' is empty".into());
        for name in diagnose_clauses(host, art, 0)? {
            report.diagnosis.push(format!("clause {name} fails on the intended sequence at x = 0"));
        }
        return Ok(report);
    }
    if t.jprime != (0..n).collect::<Vec<_>>() {
        report.diagnosis.push("J' is not an initial segment".into());
        return Ok(report);
    }
    let j = &art.translation;
    let v = view(m, j, m.domain())?;
    let h: Vec<Elem> = (0..n).map(|x| t.h[&x][0]).collect();
    let Some(hpos) = h.iter().map(|y| v.dom.iter().position(|d| d == y)).collect::<Option<Vec<usize>>>() else {
        report.diagnosis.push("h leaves the domain of the translation".into());
        return Ok(report);
    };
    let left = Side { n: n as usize, vars };
    let right = Side { n: v.dom.len(), vars };
    let map: Vec<usize> = (0..left.positions())
        .map(|p| right.encode(&left.decode(p).iter().map(|d| hpos[*d]).collect::<Vec<_>>()))
        .collect();
    let std = standard_v_structure(n);
    let asg = |ds: &[usize], elems: &dyn Fn(usize) -> Elem| -> Assignment {
        ds.iter().enumerate().map(|(i, d)| (Var(i as u32), elems(*d))).collect()
    };
    let vectors = |a: &Formula| -> Result<(crate::model::Bits, crate::model::Bits), CutError> {
        let ta = translate_formula(j, a)?;
        let mut err = None;
        let l = left.vector(|ds| {
            eval(&std, a, &asg(ds, &|d| d as Elem)).unwrap_or_else(|e| {
                err = Some(e);
                false
            })
        });
        let r = right.vector(|ds| {
            eval(m, &ta, &asg(ds, &|d| v.dom[d])).unwrap_or_else(|e| {
                err = Some(e);
                false
            })
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok((l, r)),
        }
    };
    let mut atoms = Vec::new();
    for a in atoms_over(&v_signature(), vars) {
        let (l, r) = vectors(&a)?;
        atoms.push((a, l, r));
    }
    let mut steps = Vec::new();
    for i in 0..vars {
        for k in (0..vars).filter(|k| *k != i) {
            let g = Formula::rel(LEQ, &[Var(i as u32), Var(k as u32)]);
            let (l, r) = vectors(&g)?;
            steps.push(QuantStep { var: i, guard: Some((g, l, r)) });
        }
    }
    match compare_definable(&left, &right, &map, atoms, &steps, depth) {
        Ok(s) => report.classes = s.classes,
        Err(d) => {
            for x in d.assignment.iter().map(|x| *x as Elem).collect::<BTreeSet<_>>() {
                for name in diagnose_clauses(host, art, x)? {
                    report.diagnosis.push(format!("clause {name} fails on the intended sequence at x = {x}"));
                }
            }
            report.disagreement = Some(d);
        }
    }
    Ok(report)
}

/// Terms over `x`, `y`, `0`, `S0`, `+`, `*` of size at most `max`.
pub fn arithmetic_terms(max: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![vec![]; max + 1];
    if max >= 1 {
        by_size[1] = vec![tv(X), tv(Y), Term::zero()];
    }
    if max >= 2 {
        by_size[2].push(one());
    }
    for s in 3..=max {
        let mut here = Vec::new();
        for ls in 1..s - 1 {
            let rs = s - 1 - ls;
            for a in &by_size[ls] {
                for b in &by_size[rs] {
                    here.push(Term::add(a.clone(), b.clone()));
                    here.push(Term::mul(a.clone(), b.clone()));
                }
            }
        }
        by_size[s] = here;
    }
    by_size.concat()
}

fn std_value(t: &Term, env: &[u64; 2]) -> u64 {
    match t {
        Term::Var(v) => env[v.0 as usize],
        Term::App(Func::Zero, _) => 0,
        Term::App(Func::Succ, a) => std_value(&a[0], env) + 1,
        Term::App(Func::Add, a) => std_value(&a[0], env) + std_value(&a[1], env),
        Term::App(Func::Mul, a) => std_value(&a[0], env) * std_value(&a[1], env),
        Term::App(f, _) => unreachable!("{} is not generated", f.symbol()),
    }
}

/// Whether every subterm of `t` has its standard value in `J'`.
fn inside(t: &Term, env: &[u64; 2], jprime: &[Elem]) -> bool {
    let v = std_value(t, env);
    v <= Elem::MAX as u64 && jprime.contains(&(v as Elem)) && match t {
        Term::App(_, args) => args.iter().all(|a| inside(a, env, jprime)),
        Term::Var(_) => true,
    }
}

/// `t^j(h(x, y)) =^j h(z)` iff `t(x, y) = z` for all `x, y, z` in `J'` and
/// every term of [`arithmetic_terms`] whose subterms all take values in
/// `J'`. Returns the number of instances.
pub fn check_term_law(host: &HostModel, art: &PudlakArtifacts, max_size: usize) -> Result<usize, CutError> {
    let m = &host.structure;
    let j = &art.translation;
    let t = pudlak_tables(host, art)?;
    let v = view(m, j, 0..host.numbers)?;
    let image = |r: &str| j.image(r).expect("total");
    let mut zero = BTreeSet::new();
    let mut ones = BTreeSet::new();
    for &a in &v.dom {
        if holds(m, image(ZERO), &[a])? {
            zero.insert(a);
        }
        if holds(m, image(ONE), &[a])? {
            ones.insert(a);
        }
    }
    let mut add: BTreeMap<(Elem, Elem), BTreeSet<Elem>> = BTreeMap::new();
    let mut mul: BTreeMap<(Elem, Elem), BTreeSet<Elem>> = BTreeMap::new();
    for &a in &v.dom {
        for &b in &v.dom {
            for &c in &v.dom {
                if holds(m, image(ADD), &[a, b, c])? {
                    add.entry((a, b)).or_default().insert(c);
                }
                if holds(m, image(MUL), &[a, b, c])? {
                    mul.entry((a, b)).or_default().insert(c);
                }
            }
        }
    }
    let h = |x: Elem| t.h[&x][0];
    fn vals(
        t: &Term,
        env: [Elem; 2],
        zero: &BTreeSet<Elem>,
        ones: &BTreeSet<Elem>,
        add: &BTreeMap<(Elem, Elem), BTreeSet<Elem>>,
        mul: &BTreeMap<(Elem, Elem), BTreeSet<Elem>>,
    ) -> BTreeSet<Elem> {
        match t {
            Term::Var(v) => BTreeSet::from([env[v.0 as usize]]),
            Term::App(Func::Zero, _) => zero.clone(),
            Term::App(Func::Succ, a) if a[0] == Term::zero() => ones.clone(),
            Term::App(f, a) => {
                let l = vals(&a[0], env, zero, ones, add, mul);
                let r = vals(&a[1], env, zero, ones, add, mul);
                let table = if *f == Func::Add { add } else { mul };
                let mut out = BTreeSet::new();
                for x in &l {
                    for y in &r {
                        if let Some(s) = table.get(&(*x, *y)) {
                            out.extend(s);
                        }
                    }
                }
                out
            }
        }
    }
    let eqf = image(EQ);
    let mut count = 0;
    for term in arithmetic_terms(max_size) {
        for &a in &t.jprime {
            for &b in &t.jprime {
                let env = [a as u64, b as u64];
                if !inside(&term, &env, &t.jprime) {
                    continue;
                }
                let got = vals(&term, [h(a), h(b)], &zero, &ones, &add, &mul);
                let n = std_value(&term, &env);
                for &c in &t.jprime {
                    let mut lhs = false;
                    for &g in &got {
                        if holds(m, eqf, &[g, h(c)])? {
                            lhs = true;
                            break;
                        }
                    }
                    if lhs != (n == c as u64) {
                        return Err(CutError::Model(ModelError::Symbol(format!(
                            "term law fails for {term} at x = {a}, y = {b}, z = {c}"
                        ))));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Every `y` with `H(x, y)` satisfies `I^j`. Returns the number of pairs checked.
pub fn check_confinement(host: &HostModel, art: &PudlakArtifacts) -> Result<usize, CutError> {
    let (iv, ij) = art.relative_image().ok_or(CutError::FreeVars(0))?;
    let t = pudlak_tables(host, art)?;
    let mut n = 0;
    for (x, ys) in &t.h {
        for &y in ys {
            if !eval(&host.structure, &ij, &Assignment::from([(iv, y)]))? {
                return Err(CutError::Model(ModelError::Symbol(format!("H({x}, {y}) leaves I^j"))));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// Keeps the axioms `v` of `theory` for which a refutation search from
/// the axioms of code `<= code(v)` is exhausted at `budget`. The budget is
/// part of the result's name and origin.
pub fn feferman_restrict(theory: &TheorySpec, budget: &SearchBudget) -> Result<TheorySpec, CutError> {
    let kept: Vec<Formula> = theory
        .axioms()
        .filter(|(c, _)| search_refutation(theory, c, budget).is_exhausted())
        .map(|(_, a)| a.clone())
        .collect();
    Ok(TheorySpec::with_origin(
        &format!("{}'[max-nodes={}]", theory.name, budget.max_nodes),
        theory.signature.clone(),
        kept,
        Origin::Feferman { source: theory.name.clone(), max_nodes: budget.max_nodes },
    )?)
}

/// Code of `J(numeral(n))`, handy for restricted-provability reports.
pub fn membership_code(c: &CutSpec, n: u64) -> num_bigint::BigUint {
    code_syntax(&c.at(&numeral(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check_proof;
    use crate::sexp::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn four_obligations() {
        let base = crate::arith::base_theory();
        assert_eq!(cut_obligations(&f("(= x x)"), &base).unwrap().len(), 4);
        assert!(matches!(cut_obligations(&f("(= x y)"), &base), Err(CutError::FreeVars(2))));
        let rel = TheorySpec::parse("(theory R (signature (P 1)))").unwrap();
        assert!(matches!(cut_obligations(&f("(P x)"), &rel), Err(CutError::NotArithmetic(_))));
    }

    #[test]
    fn fixtures_validate() {
        CutSpec::top();
        CutSpec::axiomatic();
    }

    #[test]
    fn membership_zero_is_the_obligation() {
        let c = CutSpec::axiomatic();
        let p = prove_cut_membership(&c, 0).unwrap();
        assert_eq!(check_closed(&p, &c.host).unwrap(), c.at(&Term::zero()));
    }

    #[test]
    fn membership_follows_binary_digits() {
        assert_eq!(membership_path(18), vec![0, 1, 2, 4, 9, 18]);
        for c in [CutSpec::axiomatic(), CutSpec::top()] {
            for n in [1, 2, 5, 18, 1000] {
                let p = prove_cut_membership(&c, n).unwrap();
                let got = check_closed(&p, &c.host).unwrap();
                assert!(alpha_eq(&got, &c.at(&numeral(n))), "{n}");
            }
        }
    }

    #[test]
    fn missing_obligation_is_reported() {
        let c = CutSpec::axiomatic();
        let partial = CutSpec::new(c.formula.clone(), c.host.clone(), [None, None, None, None]).unwrap();
        assert_eq!(prove_cut_membership(&partial, 3), Err(CutError::MissingObligation("progressive")));
    }

    #[test]
    fn term_closure_proofs_check() {
        let c = CutSpec::axiomatic();
        for (t, nodes) in [("x", 0), ("(+ x y)", 0), ("(+ (* x y) (# x x))", 0)] {
            let t = crate::sexp::parse_term(t).unwrap();
            let p = prove_term_closure(&c, &t).unwrap();
            let got = check_closed(&p, &c.host).unwrap();
            assert!(got.is_sentence());
            assert!(matches!(got, Formula::Quant { .. }));
            let _ = nodes;
        }
        let smash = crate::sexp::parse_term("(# x y)").unwrap();
        assert_eq!(prove_term_closure(&c, &smash), Err(CutError::UnsupportedSymbol("#")));
    }

    #[test]
    fn close_cut_of_top_is_provable_everywhere() {
        // every stage I_k(t) is provable from nothing, so the shortening of
        // x = x holds of every number in every model
        let j = close_cut(&f("(= x x)")).unwrap();
        let x = Var(0);
        fn prove(phi: &Formula, v: Var, t: &Term) -> Proof {
            let inst = substitute(phi, v, t);
            prove_inst(&inst)
        }
        fn prove_inst(g: &Formula) -> Proof {
            match g {
                Formula::Atom(_, a) => Proof::refl(a[0].clone()),
                Formula::Bin(crate::syntax::Conn::And, a, b) => Proof::and_i(prove_inst(a), prove_inst(b)),
                Formula::Bin(crate::syntax::Conn::Imp, a, b) => Proof::imp_i("h", (**a).clone(), prove_inst(b)),
                Formula::Quant { bound: Some(_), .. } => Proof::bdef(prove_inst(&crate::proof::bdef_partner(g).unwrap())),
                Formula::Quant { var, body, .. } => Proof::forall_i(*var, prove_inst(body)),
                other => panic!("{other}"),
            }
        }
        let p = Proof::forall_i(x, prove(&j, x, &tv(x)));
        let got = check_closed(&p, &crate::arith::base_theory()).unwrap();
        assert!(alpha_eq(&got, &Formula::forall(x, j)));
    }

    #[test]
    fn close_cut_shrinks_a_bounded_segment() {
        let sig = Signature::arithmetic("A", Vec::<(String, usize)>::new()).unwrap();
        let m = Structure::new(sig, 20);
        let j0 = f("(< x (S (S (S (S (S (S (S (S 0)))))))))");
        let j = close_cut(&j0).unwrap();
        let before = extension(&m, &j0).unwrap();
        let after = extension(&m, &j).unwrap();
        assert_eq!(before, (0..8).collect::<Vec<_>>());
        assert!(after.len() < before.len());
        assert!(after.iter().enumerate().all(|(i, e)| *e == i as Elem), "initial segment");
        let twice = close_cut(&j).unwrap();
        assert_eq!(extension(&m, &twice).unwrap(), after);
    }

    #[test]
    fn pudlak_shape() {
        let art = build_pudlak(&identity_fixture()).unwrap();
        let names: Vec<&str> = art.clauses.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            ["length", "anchor-zero", "anchor-end", "delta", "successor", "plus-law", "times-law", "surjectivity"]
        );
        assert_eq!(art.h.free_vars(), BTreeSet::from([X, Y]));
        assert_eq!(art.jprime.free_vars(), BTreeSet::from([X]));
        assert_eq!(art.j.free_vars(), BTreeSet::from([X]));
        assert!(build_pudlak(&Translation::identity(&v_signature())).is_err());
        let top = f("(= x x)");
        let rel = build_pudlak_relative(&identity_fixture(), &top).unwrap();
        assert_eq!(rel.clauses[..8], art.clauses[..]);
        assert_eq!(rel.clauses.len(), 9);
    }

    #[test]
    fn tables_match_formula_evaluation() {
        for j in [identity_fixture(), floor_half_fixture()] {
            let art = build_pudlak(&j).unwrap();
            let host = build_host(&j, 5, ChainStarts::Every).unwrap();
            let t = pudlak_tables(&host, &art).unwrap();
            let m = &host.structure;
            for x in 0..host.numbers {
                for y in 0..host.numbers {
                    let a = Assignment::from([(X, x), (Y, y)]);
                    let table = t.h.get(&x).is_some_and(|ys| ys.contains(&y));
                    assert_eq!(eval(m, &art.h, &a).unwrap(), table, "{} H({x},{y})", j.name);
                }
                let a = Assignment::from([(X, x)]);
                assert_eq!(eval(m, &art.jprime, &a).unwrap(), t.jprime.contains(&x), "{} J'({x})", j.name);
            }
        }
    }

    #[test]
    fn identity_h_is_the_identity() {
        let j = identity_fixture();
        let art = build_pudlak(&j).unwrap();
        let host = build_host(&j, 10, ChainStarts::Every).unwrap();
        let t = pudlak_tables(&host, &art).unwrap();
        for x in 0..9 {
            assert_eq!(t.h[&x], vec![x]);
        }
        assert_eq!(t.jprime, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn agreement_on_small_hosts() {
        for j in [identity_fixture(), floor_half_fixture()] {
            let art = build_pudlak(&j).unwrap();
            let host = build_host(&j, 7, ChainStarts::Every).unwrap();
            let r = check_delta0_agreement(&host, &art, 2, 2).unwrap();
            assert!(r.is_empty(), "{}: {r:?}", j.name);
            assert!(check_term_law(&host, &art, 3).unwrap() > 0);
        }
    }

    #[test]
    fn shifted_anchor_is_diagnosed() {
        let j = identity_fixture();
        let bad = shifted_anchor(&build_pudlak(&j).unwrap()).unwrap();
        let host = build_host(&j, 7, ChainStarts::Every).unwrap();
        let r = check_delta0_agreement(&host, &bad, 2, 2).unwrap();
        assert!(!r.is_empty());
        assert!(r.diagnosis.iter().any(|d| d.contains("anchor-zero")), "{r:?}");
    }

    #[test]
    fn relative_variant_confines_the_image() {
        let j = identity_fixture();
        // x < 4 in relational arithmetic: no c with c = 1+1+1+1 and c <= x
        let i = f("(not (exists u (exists v (exists w (and (One u) (and (Add u u v) (and (Add v v w) (Le w x))))))))");
        let art = build_pudlak_relative(&j, &i).unwrap();
        let host = build_host(&j, 9, ChainStarts::Every).unwrap();
        assert!(check_confinement(&host, &art).unwrap() > 0);
        let t = pudlak_tables(&host, &art).unwrap();
        assert_eq!(t.jprime, vec![0, 1, 2, 3]);
    }

    #[test]
    fn feferman_examples() {
        let b = SearchBudget::default();
        let pq = TheorySpec::parse("(theory PQ (signature (P 0) (Q 0)) (axiom P) (axiom Q))").unwrap();
        assert_eq!(feferman_restrict(&pq, &b).unwrap().axiom_list(), pq.axiom_list());
        let bad = TheorySpec::parse("(theory Bad (signature (P 0)) (axiom P) (axiom (not P)))").unwrap();
        let r = feferman_restrict(&bad, &b).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.axiom_list(), vec![bad.axioms().next().unwrap().1.clone()]);
        assert!(r.name.contains("max-nodes=7"));
        let empty = TheorySpec::parse("(theory E (signature))").unwrap();
        assert!(feferman_restrict(&empty, &b).unwrap().is_empty());
    }

    #[test]
    fn membership_node_count_is_logarithmic() {
        let c = CutSpec::axiomatic();
        let lemmas = c.doubling_lemmas().unwrap();
        let per_bit = lemmas.0.size().max(lemmas.1.size()) + 2;
        let base = prove_cut_membership(&c, 0).unwrap().size();
        for n in [1u64, 7, 64, 1000, 99_999] {
            let p = prove_cut_membership(&c, n).unwrap();
            let bits = 64 - n.leading_zeros() as usize;
            assert!(p.size() <= base + per_bit * bits, "{n}: {}", p.size());
            check_proof(&p, &c.host).unwrap();
        }
    }
}
