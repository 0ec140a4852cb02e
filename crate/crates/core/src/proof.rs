//! Natural deduction with explicit discharge labels and primitive equality.
//!
//! Rules (premises left of `=>`):
//!
//! | tag | premises | conclusion |
//! |---|---|---|
//! | `assume l` | | `A`, open under `l` |
//! | `axiom c` | | axiom `A` with code `c` |
//! | `refl` | | `t = t` |
//! | `and-i` | `A`, `B` | `A and B` |
//! | `and-el` / `and-er` | `A and B` | `A` / `B` |
//! | `or-il` / `or-ir` | `A` / `B` | `A or B` |
//! | `or-e l` | `A or B`, `C` \[l:A\], `C` \[l:B\] | `C` |
//! | `imp-i l` | `B` \[l:A\] | `A -> B` |
//! | `imp-e` | `A -> B`, `A` | `B` |
//! | `not-i l` | `bot` \[l:A\] | `not A` |
//! | `not-e` | `not A`, `A` | `bot` |
//! | `bot-e` | `bot` | any |
//! | `raa l` | `bot` \[l:not A\] | `A` |
//! | `forall-i a` | `A[x:=a]` | `forall x A` |
//! | `forall-e t` | `forall x A` | `A[x:=t]` |
//! | `exists-i t` | `A[x:=t]` | `exists x A` |
//! | `exists-e a l` | `exists x A`, `C` \[l:A[x:=a]\] | `C` |
//! | `eq-subst z C` | `s = t`, `C[z:=s]` | `C[z:=t]` |
//! | `bdef` | bounded quantifier or its definition | the other one |
//!
//! `bdef` relates `ball x t A` with `forall x (x < t -> A)` and `bex x t A`
//! with `exists x (x < t and A)`, in both directions; for the sharp forms the
//! bound is `(len t)`. Conclusions are compared up to alpha-equivalence.
//! `forall-i a` requires `a` free in no open assumption and not free in the
//! conclusion; `exists-e a l` requires `a` free in neither `exists x A`, `C`,
//! nor any open assumption of the second premise other than those under `l`.

use crate::coding::{code_syntax, Syntax};
use crate::sexp::{self, ParseError, SExp};
use crate::subst::{alpha_eq, substitute};
use crate::syntax::{Bound, BoundKind, Conn, Formula, Quant, Term, Var};
use crate::theory::TheorySpec;
use num_bigint::BigUint;
use rustc_hash::FxHashMap;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Assume(String),
    Axiom(BigUint),
    EqRefl,
    AndI,
    AndEL,
    AndER,
    OrIL,
    OrIR,
    OrE(String),
    ImpI(String),
    ImpE,
    NotI(String),
    NotE,
    BotE,
    Raa(String),
    ForallI(Var),
    ForallE(Term),
    ExistsI(Term),
    ExistsE(Var, String),
    EqSubst(Var, Formula),
    BDef,
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Assume(_) => "assume",
            Rule::Axiom(_) => "axiom",
            Rule::EqRefl => "refl",
            Rule::AndI => "and-i",
            Rule::AndEL => "and-el",
            Rule::AndER => "and-er",
            Rule::OrIL => "or-il",
            Rule::OrIR => "or-ir",
            Rule::OrE(_) => "or-e",
            Rule::ImpI(_) => "imp-i",
            Rule::ImpE => "imp-e",
            Rule::NotI(_) => "not-i",
            Rule::NotE => "not-e",
            Rule::BotE => "bot-e",
            Rule::Raa(_) => "raa",
            Rule::ForallI(_) => "forall-i",
            Rule::ForallE(_) => "forall-e",
            Rule::ExistsI(_) => "exists-i",
            Rule::ExistsE(..) => "exists-e",
            Rule::EqSubst(..) => "eq-subst",
            Rule::BDef => "bdef",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Rule::Assume(_) | Rule::Axiom(_) | Rule::EqRefl => 0,
            Rule::AndI | Rule::ImpE | Rule::NotE | Rule::ExistsE(..) | Rule::EqSubst(..) => 2,
            Rule::OrE(_) => 3,
            _ => 1,
        }
    }
}

/// A derivation tree. Open assumptions are computed, not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: Formula,
    pub premises: Vec<Proof>,
}

/// Path from the root: child indices.
pub type NodePath = Vec<usize>;

fn show_path(p: &NodePath) -> String {
    if p.is_empty() {
        "root".to_string()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at {}: {kind}", show_path(.path))]
pub struct ProofError {
    pub path: NodePath,
    pub kind: ProofErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofErrorKind {
    #[error("{rule} expects {expected} premises, found {found}")]
    PremiseCount { rule: &'static str, expected: usize, found: usize },
    #[error("{rule}: {msg}")]
    Invalid { rule: &'static str, msg: String },
    #[error("axiom code {code} does not match the cited formula")]
    AxiomCode { code: BigUint },
    #[error("not an axiom of {theory}: {formula}")]
    NotAnAxiom { theory: String, formula: String },
    #[error("eigenvariable {var} {msg}")]
    Eigenvariable { var: String, msg: String },
    #[error("ill-formed formula: {0}")]
    IllFormed(String),
}

/// An open assumption: discharge label and formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpenAssumption {
    pub label: String,
    pub formula: Formula,
}

/// Result of checking a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checked {
    pub conclusion: Formula,
    pub open: Vec<OpenAssumption>,
}

impl Proof {
    pub fn leaf(rule: Rule, conclusion: Formula) -> Proof {
        Proof { rule, conclusion, premises: vec![] }
    }

    pub fn node(rule: Rule, conclusion: Formula, premises: Vec<Proof>) -> Proof {
        Proof { rule, conclusion, premises }
    }

    pub fn assume(label: &str, f: Formula) -> Proof {
        Proof::leaf(Rule::Assume(label.to_string()), f)
    }

    /// Citation of an axiom; the code is computed from the formula.
    pub fn axiom(f: Formula) -> Proof {
        Proof::leaf(Rule::Axiom(code_syntax(&f)), f)
    }

    pub fn refl(t: Term) -> Proof {
        Proof::leaf(Rule::EqRefl, Formula::eq(t.clone(), t))
    }

    pub fn and_i(a: Proof, b: Proof) -> Proof {
        let c = Formula::and(a.conclusion.clone(), b.conclusion.clone());
        Proof::node(Rule::AndI, c, vec![a, b])
    }

    pub fn and_el(p: Proof) -> Proof {
        let c = match &p.conclusion {
            Formula::Bin(Conn::And, a, _) => (**a).clone(),
            other => panic!("and_el on {other}"),
        };
        Proof::node(Rule::AndEL, c, vec![p])
    }

    pub fn and_er(p: Proof) -> Proof {
        let c = match &p.conclusion {
            Formula::Bin(Conn::And, _, b) => (**b).clone(),
            other => panic!("and_er on {other}"),
        };
        Proof::node(Rule::AndER, c, vec![p])
    }

    pub fn or_il(p: Proof, right: Formula) -> Proof {
        let c = Formula::or(p.conclusion.clone(), right);
        Proof::node(Rule::OrIL, c, vec![p])
    }

    pub fn or_ir(left: Formula, p: Proof) -> Proof {
        let c = Formula::or(left, p.conclusion.clone());
        Proof::node(Rule::OrIR, c, vec![p])
    }

    pub fn or_e(label: &str, major: Proof, left: Proof, right: Proof) -> Proof {
        let c = left.conclusion.clone();
        Proof::node(Rule::OrE(label.to_string()), c, vec![major, left, right])
    }

    pub fn imp_i(label: &str, hyp: Formula, p: Proof) -> Proof {
        let c = Formula::imp(hyp, p.conclusion.clone());
        Proof::node(Rule::ImpI(label.to_string()), c, vec![p])
    }

    pub fn imp_e(major: Proof, minor: Proof) -> Proof {
        let c = match &major.conclusion {
            Formula::Bin(Conn::Imp, _, b) => (**b).clone(),
            other => panic!("imp_e on {other}"),
        };
        Proof::node(Rule::ImpE, c, vec![major, minor])
    }

    pub fn not_i(label: &str, hyp: Formula, p: Proof) -> Proof {
        Proof::node(Rule::NotI(label.to_string()), Formula::not(hyp), vec![p])
    }

    pub fn not_e(neg: Proof, pos: Proof) -> Proof {
        Proof::node(Rule::NotE, Formula::Bot, vec![neg, pos])
    }

    pub fn bot_e(p: Proof, goal: Formula) -> Proof {
        Proof::node(Rule::BotE, goal, vec![p])
    }

    pub fn raa(label: &str, goal: Formula, p: Proof) -> Proof {
        Proof::node(Rule::Raa(label.to_string()), goal, vec![p])
    }

    /// `forall x A` from a proof of `A[x:=a]`, binding `a` itself.
    pub fn forall_i(a: Var, p: Proof) -> Proof {
        let c = Formula::forall(a, p.conclusion.clone());
        Proof::node(Rule::ForallI(a), c, vec![p])
    }

    pub fn forall_e(p: Proof, t: Term) -> Proof {
        let c = match &p.conclusion {
            Formula::Quant { q: Quant::Forall, var, bound: None, body } => substitute(body, *var, &t),
            other => panic!("forall_e on {other}"),
        };
        Proof::node(Rule::ForallE(t), c, vec![p])
    }

    /// Repeated universal instantiation.
    pub fn forall_e_all(p: Proof, ts: &[Term]) -> Proof {
        ts.iter().fold(p, |p, t| Proof::forall_e(p, t.clone()))
    }

    pub fn exists_i(target: Formula, t: Term, p: Proof) -> Proof {
        Proof::node(Rule::ExistsI(t), target, vec![p])
    }

    pub fn exists_e(a: Var, label: &str, major: Proof, minor: Proof) -> Proof {
        let c = minor.conclusion.clone();
        Proof::node(Rule::ExistsE(a, label.to_string()), c, vec![major, minor])
    }

    /// From `s = t` and `C[z:=s]` conclude `C[z:=t]`.
    pub fn eq_subst(z: Var, context: Formula, eq: Proof, p: Proof) -> Proof {
        let t = match &eq.conclusion {
            Formula::Atom(r, args) if r == crate::syntax::EQ => args[1].clone(),
            other => panic!("eq_subst on {other}"),
        };
        let c = substitute(&context, z, &t);
        Proof::node(Rule::EqSubst(z, context), c, vec![eq, p])
    }

    pub fn bdef(p: Proof) -> Proof {
        let c = bdef_partner(&p.conclusion).expect("bdef on a formula without a bounded partner");
        Proof::node(Rule::BDef, c, vec![p])
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Proof::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Proof::height).max().unwrap_or(0)
    }

    /// All nodes in preorder with their paths.
    pub fn nodes(&self) -> Vec<(NodePath, &Proof)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((path, p)) = stack.pop() {
            for (i, q) in p.premises.iter().enumerate().rev() {
                let mut qp = path.clone();
                qp.push(i);
                stack.push((qp, q));
            }
            out.push((path, p));
        }
        out
    }

    pub fn at(&self, path: &[usize]) -> Option<&Proof> {
        path.iter().try_fold(self, |p, i| p.premises.get(*i))
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Proof> {
        path.iter().try_fold(self, |p, i| p.premises.get_mut(*i))
    }

    /// Codes of every cited axiom.
    pub fn axiom_codes(&self) -> Vec<BigUint> {
        self.nodes()
            .into_iter()
            .filter_map(|(_, p)| match &p.rule {
                Rule::Axiom(c) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }

    /// Every axiom formula cited, deduplicated by code.
    pub fn cited_axioms(&self) -> Vec<(BigUint, Formula)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (_, p) in self.nodes() {
            if let Rule::Axiom(c) = &p.rule {
                if seen.insert(c.clone()) {
                    out.push((c.clone(), p.conclusion.clone()));
                }
            }
        }
        out
    }

    /// Largest `rho` among all formulas occurring in the tree.
    pub fn max_rho(&self) -> usize {
        self.nodes().iter().map(|(_, p)| crate::classify::rho(&p.conclusion)).max().unwrap_or(0)
    }

    /// Largest variable index mentioned anywhere in the proof.
    pub fn max_var(&self) -> Option<u32> {
        self.nodes()
            .iter()
            .filter_map(|(_, p)| {
                let rv = match &p.rule {
                    Rule::ForallI(a) | Rule::ExistsE(a, _) => Some(a.0),
                    Rule::EqSubst(z, c) => Some(z.0).max(c.max_var()),
                    Rule::ForallE(t) | Rule::ExistsI(t) => t.max_var(),
                    _ => None,
                };
                p.conclusion.max_var().max(rv)
            })
            .max()
    }
}

/// `ball x t A` <-> `forall x (x < t -> A)`, `bex x t A` <-> `exists x (x < t and A)`.
pub fn bdef_partner(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Quant { q, var, bound: Some(b), body } => {
            let guard = Formula::lt(Term::Var(*var), b.limit());
            Some(match q {
                Quant::Forall => Formula::forall(*var, Formula::imp(guard, (**body).clone())),
                Quant::Exists => Formula::exists(*var, Formula::and(guard, (**body).clone())),
            })
        }
        Formula::Quant { q, var, bound: None, body } => {
            let (guard, rest) = match (q, &**body) {
                (Quant::Forall, Formula::Bin(Conn::Imp, g, r)) => (g, r),
                (Quant::Exists, Formula::Bin(Conn::And, g, r)) => (g, r),
                _ => return None,
            };
            let Formula::Atom(rel, args) = &**guard else { return None };
            if rel != crate::syntax::LT || args[0] != Term::Var(*var) {
                return None;
            }
            let bound = match &args[1] {
                Term::App(crate::syntax::Func::Len, inner) => Bound { kind: BoundKind::Sharp, term: inner[0].clone() },
                t => Bound { kind: BoundKind::Plain, term: t.clone() },
            };
            if bound.term.contains_var(*var) {
                return None;
            }
            Some(Formula::Quant { q: *q, var: *var, bound: Some(bound), body: rest.clone() })
        }
        _ => None,
    }
}

/// How axiom leaves are validated.
pub trait AxiomOracle {
    fn name(&self) -> &str;
    fn is_axiom(&self, f: &Formula) -> bool;
    /// `is_axiom` when the caller already holds `code_syntax(f)`.
    fn is_axiom_coded(&self, f: &Formula, _code: &BigUint) -> bool {
        self.is_axiom(f)
    }
    fn signature(&self) -> Option<&crate::syntax::Signature> {
        None
    }
}

impl AxiomOracle for TheorySpec {
    fn name(&self) -> &str {
        &self.name
    }
    fn is_axiom(&self, f: &Formula) -> bool {
        self.recognizes(f)
    }
    fn is_axiom_coded(&self, f: &Formula, code: &BigUint) -> bool {
        self.axiom_at(code) == Some(f)
    }
    fn signature(&self) -> Option<&crate::syntax::Signature> {
        Some(&self.signature)
    }
}

/// Checks `p` against `theory`, returning the conclusion and open assumptions.
pub fn check_proof(p: &Proof, theory: &dyn AxiomOracle) -> Result<Checked, ProofError> {
    let mut path = Vec::new();
    let open = check_rec(p, theory, &mut path, &mut FxHashMap::default())?;
    Ok(Checked { conclusion: p.conclusion.clone(), open })
}

/// Checks `p` and additionally requires that no assumption is left open.
pub fn check_closed(p: &Proof, theory: &dyn AxiomOracle) -> Result<Formula, ProofError> {
    let c = check_proof(p, theory)?;
    match c.open.first() {
        None => Ok(c.conclusion),
        Some(a) => Err(ProofError {
            path: vec![],
            kind: ProofErrorKind::Invalid { rule: "root", msg: format!("open assumption {}: {}", a.label, a.formula) },
        }),
    }
}

fn err(path: &NodePath, kind: ProofErrorKind) -> ProofError {
    ProofError { path: path.clone(), kind }
}

fn invalid(path: &NodePath, rule: &'static str, msg: impl Into<String>) -> ProofError {
    err(path, ProofErrorKind::Invalid { rule, msg: msg.into() })
}

fn discharge(open: Vec<OpenAssumption>, label: &str, f: &Formula) -> Vec<OpenAssumption> {
    open.into_iter().filter(|a| !(a.label == label && alpha_eq(&a.formula, f))).collect()
}

/// Verified `forall-i` subproofs with their open assumptions. The outcome
/// of checking a subproof does not depend on where it occurs.
type Memo<'a> = FxHashMap<&'a Proof, Vec<OpenAssumption>>;

fn check_rec<'a>(
    p: &'a Proof,
    th: &dyn AxiomOracle,
    path: &mut NodePath,
    memo: &mut Memo<'a>,
) -> Result<Vec<OpenAssumption>, ProofError> {
    let memoize = matches!(p.rule, Rule::ForallI(_));
    if memoize {
        if let Some(open) = memo.get(p) {
            return Ok(open.clone());
        }
    }
    let out = check_node(p, th, path, memo)?;
    if memoize {
        memo.insert(p, out.clone());
    }
    Ok(out)
}

fn check_node<'a>(
    p: &'a Proof,
    th: &dyn AxiomOracle,
    path: &mut NodePath,
    memo: &mut Memo<'a>,
) -> Result<Vec<OpenAssumption>, ProofError> {
    let tag = p.rule.tag();
    if p.premises.len() != p.rule.arity() {
        return Err(err(
            path,
            ProofErrorKind::PremiseCount { rule: tag, expected: p.rule.arity(), found: p.premises.len() },
        ));
    }
    if let Some(sig) = th.signature() {
        sig.check_formula(&p.conclusion).map_err(|e| err(path, ProofErrorKind::IllFormed(e.to_string())))?;
    }
    let mut opens = Vec::with_capacity(p.premises.len());
    for (i, q) in p.premises.iter().enumerate() {
        path.push(i);
        opens.push(check_rec(q, th, path, memo)?);
        path.pop();
    }
    let c = &p.conclusion;
    let prem = |i: usize| &p.premises[i].conclusion;
    let union = |opens: Vec<Vec<OpenAssumption>>| opens.into_iter().flatten().collect::<Vec<_>>();
    match &p.rule {
        Rule::Assume(l) => Ok(vec![OpenAssumption { label: l.clone(), formula: c.clone() }]),
        Rule::Axiom(code) => {
            if &code_syntax(c) != code {
                return Err(err(path, ProofErrorKind::AxiomCode { code: code.clone() }));
            }
            if !th.is_axiom_coded(c, code) {
                return Err(err(
                    path,
                    ProofErrorKind::NotAnAxiom { theory: th.name().to_string(), formula: c.to_string() },
                ));
            }
            Ok(vec![])
        }
        Rule::EqRefl => match c {
            Formula::Atom(r, args) if r == crate::syntax::EQ && args[0] == args[1] => Ok(vec![]),
            _ => Err(invalid(path, tag, "conclusion is not of the form t = t")),
        },
        Rule::AndI => {
            if !alpha_eq(c, &Formula::and(prem(0).clone(), prem(1).clone())) {
                return Err(invalid(path, tag, "conclusion is not the conjunction of the premises"));
            }
            Ok(union(opens))
        }
        Rule::AndEL | Rule::AndER => match prem(0) {
            Formula::Bin(Conn::And, a, b) => {
                let side = if matches!(p.rule, Rule::AndEL) { a } else { b };
                if !alpha_eq(c, side) {
                    return Err(invalid(path, tag, "conclusion is not the selected conjunct"));
                }
                Ok(union(opens))
            }
            _ => Err(invalid(path, tag, "premise is not a conjunction")),
        },
        Rule::OrIL | Rule::OrIR => match c {
            Formula::Bin(Conn::Or, a, b) => {
                let side = if matches!(p.rule, Rule::OrIL) { a } else { b };
                if !alpha_eq(side, prem(0)) {
                    return Err(invalid(path, tag, "premise is not the selected disjunct"));
                }
                Ok(union(opens))
            }
            _ => Err(invalid(path, tag, "conclusion is not a disjunction")),
        },
        Rule::OrE(l) => {
            let (a, b) = match prem(0) {
                Formula::Bin(Conn::Or, a, b) => (a, b),
                _ => return Err(invalid(path, tag, "major premise is not a disjunction")),
            };
            if !alpha_eq(prem(1), c) || !alpha_eq(prem(2), c) {
                return Err(invalid(path, tag, "minor premises do not match the conclusion"));
            }
            let mut it = opens.into_iter();
            let (o0, o1, o2) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
            Ok(union(vec![o0, discharge(o1, l, a), discharge(o2, l, b)]))
        }
        Rule::ImpI(l) => match c {
            Formula::Bin(Conn::Imp, a, b) => {
                if !alpha_eq(b, prem(0)) {
                    return Err(invalid(path, tag, "premise is not the consequent"));
                }
                Ok(discharge(union(opens), l, a))
            }
            _ => Err(invalid(path, tag, "conclusion is not an implication")),
        },
        Rule::ImpE => match prem(0) {
            Formula::Bin(Conn::Imp, a, b) => {
                if !alpha_eq(a, prem(1)) {
                    return Err(invalid(path, tag, "minor premise is not the antecedent"));
                }
                if !alpha_eq(b, c) {
                    return Err(invalid(path, tag, "conclusion is not the consequent"));
                }
                Ok(union(opens))
            }
            _ => Err(invalid(path, tag, "major premise is not an implication")),
        },
        Rule::NotI(l) => match c {
            Formula::Not(a) => {
                if *prem(0) != Formula::Bot {
                    return Err(invalid(path, tag, "premise is not bot"));
                }
                Ok(discharge(union(opens), l, a))
            }
            _ => Err(invalid(path, tag, "conclusion is not a negation")),
        },
        Rule::NotE => {
            if *c != Formula::Bot {
                return Err(invalid(path, tag, "conclusion is not bot"));
            }
            match prem(0) {
                Formula::Not(a) if alpha_eq(a, prem(1)) => Ok(union(opens)),
                _ => Err(invalid(path, tag, "premises are not A and not A")),
            }
        }
        Rule::BotE => {
            if *prem(0) != Formula::Bot {
                return Err(invalid(path, tag, "premise is not bot"));
            }
            Ok(union(opens))
        }
        Rule::Raa(l) => {
            if *prem(0) != Formula::Bot {
                return Err(invalid(path, tag, "premise is not bot"));
            }
            Ok(discharge(union(opens), l, &Formula::not(c.clone())))
        }
        Rule::ForallI(a) => match c {
            Formula::Quant { q: Quant::Forall, var, bound: None, body } => {
                if !alpha_eq(&substitute(body, *var, &Term::Var(*a)), prem(0)) {
                    return Err(invalid(path, tag, "premise is not the eigen-instance of the conclusion"));
                }
                if c.has_free(*a) {
                    return Err(eigen(path, *a, "is free in the conclusion"));
                }
                let open = union(opens);
                if open.iter().any(|o| o.formula.has_free(*a)) {
                    return Err(eigen(path, *a, "is free in an open assumption"));
                }
                Ok(open)
            }
            _ => Err(invalid(path, tag, "conclusion is not an unbounded universal")),
        },
        Rule::ForallE(t) => match prem(0) {
            Formula::Quant { q: Quant::Forall, var, bound: None, body } => {
                if !alpha_eq(&substitute(body, *var, t), c) {
                    return Err(invalid(path, tag, "conclusion is not the stated instance"));
                }
                Ok(union(opens))
            }
            _ => Err(invalid(path, tag, "premise is not an unbounded universal")),
        },
        Rule::ExistsI(t) => match c {
            Formula::Quant { q: Quant::Exists, var, bound: None, body } => {
                if !alpha_eq(&substitute(body, *var, t), prem(0)) {
                    return Err(invalid(path, tag, "premise is not the stated instance"));
                }
                Ok(union(opens))
            }
            _ => Err(invalid(path, tag, "conclusion is not an unbounded existential")),
        },
        Rule::ExistsE(a, l) => match prem(0) {
            Formula::Quant { q: Quant::Exists, var, bound: None, body } => {
                if !alpha_eq(prem(1), c) {
                    return Err(invalid(path, tag, "minor premise does not match the conclusion"));
                }
                let inst = substitute(body, *var, &Term::Var(*a));
                if prem(0).has_free(*a) {
                    return Err(eigen(path, *a, "is free in the existential premise"));
                }
                if c.has_free(*a) {
                    return Err(eigen(path, *a, "is free in the conclusion"));
                }
                let mut it = opens.into_iter();
                let (o0, o1) = (it.next().unwrap(), it.next().unwrap());
                let o1 = discharge(o1, l, &inst);
                if o1.iter().any(|o| o.formula.has_free(*a)) {
                    return Err(eigen(path, *a, "is free in an open assumption"));
                }
                Ok(union(vec![o0, o1]))
            }
            _ => Err(invalid(path, tag, "major premise is not an unbounded existential")),
        },
        Rule::EqSubst(z, ctx) => match prem(0) {
            Formula::Atom(r, args) if r == crate::syntax::EQ => {
                if !alpha_eq(&substitute(ctx, *z, &args[0]), prem(1)) {
                    return Err(invalid(path, tag, "minor premise is not the context at the left side"));
                }
                if !alpha_eq(&substitute(ctx, *z, &args[1]), c) {
                    return Err(invalid(path, tag, "conclusion is not the context at the right side"));
                }
                Ok(union(opens))
            }
            _ => Err(invalid(path, tag, "major premise is not an equation")),
        },
        Rule::BDef => match bdef_partner(prem(0)) {
            Some(f) if alpha_eq(&f, c) => Ok(union(opens)),
            _ => Err(invalid(path, tag, "conclusion is not the bounded-quantifier partner of the premise")),
        },
    }
}

fn eigen(path: &NodePath, a: Var, msg: &str) -> ProofError {
    err(path, ProofErrorKind::Eigenvariable { var: crate::sexp::var_name(a), msg: msg.to_string() })
}

/// Outcome of the restricted check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedReport {
    pub ok: bool,
    pub max_axiom_code: Option<BigUint>,
    pub max_rho: usize,
    /// Offending nodes with the reason.
    pub offending: Vec<(NodePath, String)>,
}

/// Every cited axiom has code `<= n` and every formula has `rho <= n`.
pub fn check_restricted(p: &Proof, n: &BigUint) -> RestrictedReport {
    let mut offending = Vec::new();
    let mut max_code: Option<BigUint> = None;
    let mut max_rho = 0;
    for (path, q) in p.nodes() {
        let r = crate::classify::rho(&q.conclusion);
        max_rho = max_rho.max(r);
        if BigUint::from(r) > *n {
            offending.push((path.clone(), format!("rho {r} exceeds {n}")));
        }
        if let Rule::Axiom(c) = &q.rule {
            if max_code.as_ref().is_none_or(|m| c > m) {
                max_code = Some(c.clone());
            }
            if c > n {
                offending.push((path, format!("axiom code {c} exceeds {n}")));
            }
        }
    }
    RestrictedReport { ok: offending.is_empty(), max_axiom_code: max_code, max_rho, offending }
}

/// Smallest `n` at which [`check_restricted`] accepts `p`.
pub fn restriction_level(p: &Proof) -> BigUint {
    let r = check_restricted(p, &BigUint::from(0u32));
    let rho = BigUint::from(r.max_rho);
    match r.max_axiom_code {
        Some(c) if c > rho => c,
        _ => rho,
    }
}

impl Syntax for Proof {
    fn render(&self) -> String {
        print_proof(self)
    }
}

/// Single-line s-expression: `(tag (args...) conclusion premise...)`.
pub fn print_proof(p: &Proof) -> String {
    let mut s = String::new();
    write_proof(p, &mut s);
    s
}

fn write_proof(p: &Proof, out: &mut String) {
    out.push('(');
    out.push_str(p.rule.tag());
    out.push_str(" (");
    let args: Vec<String> = match &p.rule {
        Rule::Assume(l) | Rule::OrE(l) | Rule::ImpI(l) | Rule::NotI(l) | Rule::Raa(l) => vec![l.clone()],
        Rule::Axiom(c) => vec![c.to_string()],
        Rule::ForallI(a) => vec![sexp::var_name(*a)],
        Rule::ForallE(t) | Rule::ExistsI(t) => vec![sexp::print_term(t)],
        Rule::ExistsE(a, l) => vec![sexp::var_name(*a), l.clone()],
        Rule::EqSubst(z, ctx) => vec![sexp::var_name(*z), sexp::print_formula(ctx)],
        _ => vec![],
    };
    out.push_str(&args.join(" "));
    out.push_str(") ");
    out.push_str(&sexp::print_formula(&p.conclusion));
    for q in &p.premises {
        out.push(' ');
        write_proof(q, out);
    }
    out.push(')');
}

/// Indented multi-line rendering of the same s-expression, for files.
pub fn pretty_proof(p: &Proof) -> String {
    let mut s = String::new();
    pretty_rec(p, 0, &mut s);
    s
}

fn pretty_rec(p: &Proof, indent: usize, out: &mut String) {
    let head = print_proof(&Proof { rule: p.rule.clone(), conclusion: p.conclusion.clone(), premises: vec![] });
    out.push_str(&" ".repeat(indent));
    if p.premises.is_empty() {
        out.push_str(&head);
        return;
    }
    out.push_str(&head[..head.len() - 1]);
    for q in &p.premises {
        out.push('\n');
        pretty_rec(q, indent + 2, out);
    }
    out.push(')');
}

fn label_of(e: &SExp) -> Result<String, ParseError> {
    e.as_atom().map(str::to_string).ok_or_else(|| ParseError::new(e.pos(), "expected a label"))
}

fn var_of(e: &SExp) -> Result<Var, ParseError> {
    e.as_atom()
        .and_then(sexp::parse_var_name)
        .ok_or_else(|| ParseError::new(e.pos(), "expected a variable"))
}

pub fn proof_from_sexp(e: &SExp) -> Result<Proof, ParseError> {
    let xs = e.as_list().ok_or_else(|| ParseError::new(e.pos(), "expected a proof node"))?;
    if xs.len() < 3 {
        return Err(ParseError::new(e.pos(), "proof node needs a tag, an argument list and a conclusion"));
    }
    let tag = xs[0].as_atom().ok_or_else(|| ParseError::new(xs[0].pos(), "expected a rule tag"))?;
    let args = xs[1].as_list().ok_or_else(|| ParseError::new(xs[1].pos(), "expected an argument list"))?;
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(ParseError::new(xs[1].pos(), format!("`{tag}` takes {n} arguments, got {}", args.len())))
        }
    };
    let rule = match tag {
        "assume" | "or-e" | "imp-i" | "not-i" | "raa" => {
            want(1)?;
            let l = label_of(&args[0])?;
            match tag {
                "assume" => Rule::Assume(l),
                "or-e" => Rule::OrE(l),
                "imp-i" => Rule::ImpI(l),
                "not-i" => Rule::NotI(l),
                _ => Rule::Raa(l),
            }
        }
        "axiom" => {
            want(1)?;
            let c = args[0]
                .as_atom()
                .and_then(|s| s.parse::<BigUint>().ok())
                .ok_or_else(|| ParseError::new(args[0].pos(), "expected a decimal code"))?;
            Rule::Axiom(c)
        }
        "forall-i" => {
            want(1)?;
            Rule::ForallI(var_of(&args[0])?)
        }
        "forall-e" | "exists-i" => {
            want(1)?;
            let t = sexp::term_from_sexp(&args[0])?;
            if tag == "forall-e" {
                Rule::ForallE(t)
            } else {
                Rule::ExistsI(t)
            }
        }
        "exists-e" => {
            want(2)?;
            Rule::ExistsE(var_of(&args[0])?, label_of(&args[1])?)
        }
        "eq-subst" => {
            want(2)?;
            Rule::EqSubst(var_of(&args[0])?, sexp::formula_from_sexp(&args[1], None)?)
        }
        "refl" | "and-i" | "and-el" | "and-er" | "or-il" | "or-ir" | "imp-e" | "not-e" | "bot-e" | "bdef" => {
            want(0)?;
            match tag {
                "refl" => Rule::EqRefl,
                "and-i" => Rule::AndI,
                "and-el" => Rule::AndEL,
                "and-er" => Rule::AndER,
                "or-il" => Rule::OrIL,
                "or-ir" => Rule::OrIR,
                "imp-e" => Rule::ImpE,
                "not-e" => Rule::NotE,
                "bot-e" => Rule::BotE,
                _ => Rule::BDef,
            }
        }
        other => return Err(ParseError::new(xs[0].pos(), format!("unknown rule `{other}`"))),
    };
    let conclusion = sexp::formula_from_sexp(&xs[2], None)?;
    let premises = xs[3..].iter().map(proof_from_sexp).collect::<Result<Vec<_>, _>>()?;
    Ok(Proof { rule, conclusion, premises })
}

pub fn parse_proof(src: &str) -> Result<Proof, ParseError> {
    proof_from_sexp(&sexp::read_one(src)?)
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_proof(self))
    }
}

/// Equality reasoning derived from `refl` and `eq-subst`.
pub mod eq {
    use super::Proof;
    use crate::syntax::{Formula, Term, Var, EQ};

    fn sides(p: &Proof) -> (Term, Term) {
        match &p.conclusion {
            Formula::Atom(r, a) if r == EQ => (a[0].clone(), a[1].clone()),
            other => panic!("not an equation: {other}"),
        }
    }

    fn fresh(ts: &[&Term]) -> Var {
        Var(ts.iter().filter_map(|t| t.max_var()).max().map_or(0, |m| m + 1))
    }

    /// `t = s` from `s = t`.
    pub fn sym(p: Proof) -> Proof {
        let (s, t) = sides(&p);
        let z = fresh(&[&s, &t]);
        let ctx = Formula::eq(Term::Var(z), s.clone());
        Proof::eq_subst(z, ctx, p, Proof::refl(s))
    }

    /// `s = u` from `s = t` and `t = u`.
    pub fn trans(p: Proof, q: Proof) -> Proof {
        let (s, t) = sides(&p);
        let (_, u) = sides(&q);
        let z = fresh(&[&s, &t, &u]);
        let ctx = Formula::eq(s, Term::Var(z));
        Proof::eq_subst(z, ctx, q, p)
    }

    /// `C[s] = C[t]` from `s = t`, where `hole` marks the position in `ctx`.
    pub fn cong(p: Proof, hole: Var, ctx: &Term) -> Proof {
        let (s, _) = sides(&p);
        let mut m = std::collections::BTreeMap::new();
        m.insert(hole, s);
        let left = ctx.subst_map(&m);
        let f = Formula::eq(left.clone(), ctx.clone());
        Proof::eq_subst(hole, f, p, Proof::refl(left))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_formula;
    use crate::syntax::Signature;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn empty() -> TheorySpec {
        TheorySpec::finite("Empty", Signature::relational("L", [("P", 0), ("Q", 0), ("R", 1)]).unwrap(), vec![])
            .unwrap()
    }

    #[test]
    fn single_assumption() {
        let p = Proof::assume("h", f("P"));
        let c = check_proof(&p, &empty()).unwrap();
        assert_eq!(c.conclusion, f("P"));
        assert_eq!(c.open, vec![OpenAssumption { label: "h".into(), formula: f("P") }]);
    }

    #[test]
    fn conjunction_introduction() {
        let p = Proof::and_i(Proof::assume("a", f("P")), Proof::assume("b", f("Q")));
        let c = check_proof(&p, &empty()).unwrap();
        assert_eq!(c.conclusion, f("(and P Q)"));
        assert_eq!(c.open.len(), 2);
    }

    #[test]
    fn implication_discharges() {
        let p = Proof::imp_i("h", f("P"), Proof::assume("h", f("P")));
        assert_eq!(check_closed(&p, &empty()).unwrap(), f("(-> P P)"));
        let wrong_label = Proof::imp_i("g", f("P"), Proof::assume("h", f("P")));
        assert!(check_closed(&wrong_label, &empty()).is_err());
    }

    #[test]
    fn eigenvariable_condition() {
        let bad = Proof::forall_i(Var(0), Proof::assume("h", f("(R x)")));
        let e = check_proof(&bad, &empty()).unwrap_err();
        assert!(matches!(e.kind, ProofErrorKind::Eigenvariable { .. }));
        let ok = Proof::imp_i(
            "h",
            f("(forall x (R x))"),
            Proof::forall_i(Var(1), Proof::forall_e(Proof::assume("h", f("(forall x (R x))")), Term::var(1))),
        );
        assert_eq!(check_closed(&ok, &empty()).unwrap().to_string(), "(-> (forall x (R x)) (forall y (R y)))");
    }

    #[test]
    fn errors_carry_paths() {
        let mut p = Proof::and_i(Proof::assume("a", f("P")), Proof::assume("b", f("Q")));
        p.premises[1].conclusion = f("P");
        p.conclusion = f("(and P Q)");
        let e = check_proof(&p, &empty()).unwrap_err();
        assert_eq!(e.path, Vec::<usize>::new());
        let mut q = Proof::imp_i("h", f("(and P Q)"), Proof::and_el(Proof::assume("h", f("(and P Q)"))));
        q.premises[0].conclusion = f("Q");
        q.conclusion = f("(-> (and P Q) Q)");
        let e = check_proof(&q, &empty()).unwrap_err();
        assert_eq!(e.path, vec![0]);
    }

    #[test]
    fn equality_helpers() {
        let th = TheorySpec::finite("E", Signature::relational("L", [("R", 1)]).unwrap(), vec![]).unwrap();
        let s = Proof::assume("e", f("(= x y)"));
        assert_eq!(check_proof(&eq::sym(s.clone()), &th).unwrap().conclusion, f("(= y x)"));
        let t = Proof::assume("e2", f("(= y z)"));
        assert_eq!(check_proof(&eq::trans(s, t), &th).unwrap().conclusion, f("(= x z)"));
    }

    #[test]
    fn bounded_definitions() {
        let b = f("(ball x (S y) (R x))");
        let u = bdef_partner(&b).unwrap();
        assert_eq!(u, f("(forall x (-> (< x (S y)) (R x)))"));
        assert_eq!(bdef_partner(&u).unwrap(), b);
        let s = f("(sbex x y (R x))");
        assert_eq!(bdef_partner(&s).unwrap(), f("(exists x (and (< x (len y)) (R x)))"));
    }

    #[test]
    fn print_parse_round_trip() {
        let p = Proof::imp_i(
            "h",
            f("(forall x (R x))"),
            Proof::forall_i(Var(1), Proof::forall_e(Proof::assume("h", f("(forall x (R x))")), Term::var(1))),
        );
        assert_eq!(parse_proof(&print_proof(&p)).unwrap(), p);
        assert_eq!(parse_proof(&pretty_proof(&p)).unwrap(), p);
    }

    #[test]
    fn restricted_check_is_sharp_at_the_level() {
        let ax = f("(forall x (R x))");
        let th = TheorySpec::finite("T", Signature::relational("L", [("R", 1)]).unwrap(), vec![ax.clone()]).unwrap();
        let p = Proof::forall_e(Proof::axiom(ax), Term::var(0));
        check_proof(&p, &th).unwrap();
        let n = restriction_level(&p);
        assert!(check_restricted(&p, &n).ok);
        assert!(!check_restricted(&p, &(n - 1u32)).ok);
    }
}
