//! First-order syntax: variables, terms, formulas and signatures.
//!
//! Object theories are relational. Function symbols exist only for the
//! arithmetic signature (`0`, `S`, `+`, `*`, `#`, `len`, `half`), which is
//! also the only signature where bounded quantifiers may appear.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Name of the identity relation.
pub const EQ: &str = "=";
/// Strict order of the arithmetic signature.
pub const LT: &str = "<";
/// Non-strict order of the arithmetic signature.
pub const LE: &str = "<=";

/// A variable, identified by a canonical index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::sexp::var_name(*self))
    }
}

/// Function symbols of the arithmetic signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Func {
    Zero,
    Succ,
    Add,
    Mul,
    /// `x # y = 2^(|x|*|y|)`
    Smash,
    /// binary length `|x|`
    Len,
    /// `floor(x/2)`
    Half,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Zero,
        Func::Succ,
        Func::Add,
        Func::Mul,
        Func::Smash,
        Func::Len,
        Func::Half,
    ];

    pub fn arity(self) -> usize {
        match self {
            Func::Zero => 0,
            Func::Succ | Func::Len | Func::Half => 1,
            Func::Add | Func::Mul | Func::Smash => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Func::Zero => "0",
            Func::Succ => "S",
            Func::Add => "+",
            Func::Mul => "*",
            Func::Smash => "#",
            Func::Len => "len",
            Func::Half => "half",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.symbol() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Func, Vec<Term>),
}

impl Term {
    pub fn var(i: u32) -> Term {
        Term::Var(Var(i))
    }

    pub fn zero() -> Term {
        Term::App(Func::Zero, vec![])
    }

    pub fn succ(t: Term) -> Term {
        Term::App(Func::Succ, vec![t])
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::App(Func::Add, vec![a, b])
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::App(Func::Mul, vec![a, b])
    }

    pub fn smash(a: Term, b: Term) -> Term {
        Term::App(Func::Smash, vec![a, b])
    }

    /// `omega1(t)`, written as `t # t`.
    pub fn omega1(t: Term) -> Term {
        Term::smash(t.clone(), t)
    }

    /// `S^n 0`.
    pub fn unary(n: u64) -> Term {
        (0..n).fold(Term::zero(), |t, _| Term::succ(t))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            Term::App(..) => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn contains_var(&self, x: Var) -> bool {
        match self {
            Term::Var(v) => *v == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v.0),
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    pub fn uses_functions(&self) -> bool {
        matches!(self, Term::App(..))
    }

    /// Simultaneous replacement of variables.
    pub fn subst_map(&self, map: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.subst_map(map)).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conn {
    And,
    Or,
    Imp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Forall => Quant::Exists,
            Quant::Exists => Quant::Forall,
        }
    }
}

/// `Plain` bounds `x < t`; `Sharp` bounds `x < |t|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundKind {
    Plain,
    Sharp,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound {
    pub kind: BoundKind,
    pub term: Term,
}

impl Bound {
    /// The term the bound variable is compared against (`t` or `|t|`).
    pub fn limit(&self) -> Term {
        match self.kind {
            BoundKind::Plain => self.term.clone(),
            BoundKind::Sharp => Term::App(Func::Len, vec![self.term.clone()]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bot,
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    Bin(Conn, Box<Formula>, Box<Formula>),
    Quant {
        q: Quant,
        var: Var,
        bound: Option<Bound>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(rel.to_string(), args)
    }

    /// Atom applied to variables.
    pub fn rel(rel: &str, vars: &[Var]) -> Formula {
        Formula::Atom(rel.to_string(), vars.iter().map(|v| Term::Var(*v)).collect())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(EQ.to_string(), vec![a, b])
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Atom(LT.to_string(), vec![a, b])
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Atom(LE.to_string(), vec![a, b])
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::And, Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::Or, Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Bin(Conn::Imp, Box::new(a), Box::new(b))
    }

    pub fn forall(x: Var, body: Formula) -> Formula {
        Formula::Quant { q: Quant::Forall, var: x, bound: None, body: Box::new(body) }
    }

    pub fn exists(x: Var, body: Formula) -> Formula {
        Formula::Quant { q: Quant::Exists, var: x, bound: None, body: Box::new(body) }
    }

    pub fn bounded(q: Quant, x: Var, kind: BoundKind, t: Term, body: Formula) -> Formula {
        Formula::Quant { q, var: x, bound: Some(Bound { kind, term: t }), body: Box::new(body) }
    }

    /// Right-nested conjunction; `None` for an empty list.
    pub fn conj(items: Vec<Formula>) -> Option<Formula> {
        let mut it = items.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, f| Formula::and(f, acc)))
    }

    /// Right-nested disjunction; `None` for an empty list.
    pub fn disj(items: Vec<Formula>) -> Option<Formula> {
        let mut it = items.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, f| Formula::or(f, acc)))
    }

    /// `x = x`, the formula used wherever a "true" one-variable formula is needed.
    pub fn top_like(x: Var) -> Formula {
        Formula::eq(Term::Var(x), Term::Var(x))
    }

    /// `bot -> bot`, a closed truth.
    pub fn top() -> Formula {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    pub fn iff_parts(a: Formula, b: Formula) -> (Formula, Formula) {
        (Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(_, args) => {
                for a in args {
                    let mut vs = BTreeSet::new();
                    a.vars(&mut vs);
                    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::Bin(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant { var, bound: bd, body, .. } => {
                if let Some(bd) = bd {
                    let mut vs = BTreeSet::new();
                    bd.term.vars(&mut vs);
                    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
                }
                bound.push(*var);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_free(&self, x: Var) -> bool {
        match self {
            Formula::Bot => false,
            Formula::Atom(_, args) => args.iter().any(|a| a.contains_var(x)),
            Formula::Not(f) => f.has_free(x),
            Formula::Bin(_, a, b) => a.has_free(x) || b.has_free(x),
            Formula::Quant { var, bound, body, .. } => {
                bound.as_ref().is_some_and(|b| b.term.contains_var(x)) || (*var != x && body.has_free(x))
            }
        }
    }

    /// Largest variable index occurring anywhere, bound or free.
    pub fn max_var(&self) -> Option<u32> {
        match self {
            Formula::Bot => None,
            Formula::Atom(_, args) => args.iter().filter_map(Term::max_var).max(),
            Formula::Not(f) => f.max_var(),
            Formula::Bin(_, a, b) => a.max_var().max(b.max_var()),
            Formula::Quant { var, bound, body, .. } => {
                let bm = bound.as_ref().and_then(|b| b.term.max_var());
                Some(var.0).max(bm).max(body.max_var())
            }
        }
    }

    /// Number of symbol occurrences (connectives, quantifiers, relation and
    /// term symbols).
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot => 1,
            Formula::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Not(f) => 1 + f.size(),
            Formula::Bin(_, a, b) => 1 + a.size() + b.size(),
            Formula::Quant { bound, body, .. } => {
                2 + bound.as_ref().map_or(0, |b| b.term.size()) + body.size()
            }
        }
    }

    /// Nesting depth of connectives and quantifiers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(..) => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::Bin(_, a, b) => 1 + a.depth().max(b.depth()),
            Formula::Quant { body, .. } => 1 + body.depth(),
        }
    }

    pub fn relations(&self, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(r, args) => {
                out.insert(r.clone(), args.len());
            }
            Formula::Not(f) => f.relations(out),
            Formula::Bin(_, a, b) => {
                a.relations(out);
                b.relations(out);
            }
            Formula::Quant { body, .. } => body.relations(out),
        }
    }

    /// True when some term is a function application or a quantifier is bounded.
    pub fn uses_arithmetic(&self) -> bool {
        match self {
            Formula::Bot => false,
            Formula::Atom(_, args) => args.iter().any(Term::uses_functions),
            Formula::Not(f) => f.uses_arithmetic(),
            Formula::Bin(_, a, b) => a.uses_arithmetic() || b.uses_arithmetic(),
            Formula::Quant { bound, body, .. } => bound.is_some() || body.uses_arithmetic(),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Bot | Formula::Atom(..) => vec![],
            Formula::Not(f) => vec![f],
            Formula::Bin(_, a, b) => vec![a, b],
            Formula::Quant { body, .. } => vec![body],
        }
    }

    /// All subformulas, including `self`, in preorder.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let f = out[i];
            out.extend(f.children());
            i += 1;
        }
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::sexp::print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::sexp::print_formula(self))
    }
}

/// A finite relational signature with identity, optionally extended by the
/// arithmetic function symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub name: String,
    relations: BTreeMap<String, usize>,
    arithmetic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("relation `{0}` declared twice")]
    Duplicate(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("identity must be binary")]
    IdentityArity,
    #[error("relation `{rel}` has arity {expected}, used with {found} arguments")]
    Arity { rel: String, expected: usize, found: usize },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("function symbols and bounded quantifiers need the arithmetic signature")]
    NotArithmetic,
}

impl Signature {
    /// A relational signature; identity is always included.
    pub fn relational<I, S>(name: &str, rels: I) -> Result<Signature, SignatureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut relations = BTreeMap::new();
        relations.insert(EQ.to_string(), 2);
        for (r, n) in rels {
            let r = r.into();
            if r == EQ {
                if n != 2 {
                    return Err(SignatureError::IdentityArity);
                }
                continue;
            }
            if Func::from_symbol(&r).is_some() {
                return Err(SignatureError::Reserved(r));
            }
            if relations.insert(r.clone(), n).is_some() {
                return Err(SignatureError::Duplicate(r));
            }
        }
        Ok(Signature { name: name.to_string(), relations, arithmetic: false })
    }

    /// The arithmetic signature: function symbols plus `=`, `<`, `<=` and any
    /// extra relations.
    pub fn arithmetic<I, S>(name: &str, extra: I) -> Result<Signature, SignatureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let base = [(LT.to_string(), 2), (LE.to_string(), 2)];
        let extra: Vec<(String, usize)> = extra.into_iter().map(|(s, n)| (s.into(), n)).collect();
        let mut sig = Signature::relational(name, base.into_iter().chain(extra))?;
        sig.arithmetic = true;
        Ok(sig)
    }

    pub fn is_arithmetic(&self) -> bool {
        self.arithmetic
    }

    pub fn arity(&self, rel: &str) -> Option<usize> {
        self.relations.get(rel).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(r, n)| (r.as_str(), *n))
    }

    /// Relations other than identity.
    pub fn proper_relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations().filter(|(r, _)| *r != EQ)
    }

    pub fn contains(&self, rel: &str) -> bool {
        self.relations.contains_key(rel)
    }

    pub fn with_relation(&self, rel: &str, arity: usize) -> Result<Signature, SignatureError> {
        if self.relations.contains_key(rel) {
            return Err(SignatureError::Duplicate(rel.to_string()));
        }
        let mut s = self.clone();
        s.relations.insert(rel.to_string(), arity);
        Ok(s)
    }

    /// Union of two signatures; shared symbols must agree on arity.
    pub fn union(&self, other: &Signature, name: &str) -> Result<Signature, SignatureError> {
        let mut s = self.clone();
        s.name = name.to_string();
        s.arithmetic |= other.arithmetic;
        for (r, n) in other.relations() {
            match s.relations.get(r) {
                Some(m) if *m != n => {
                    return Err(SignatureError::Arity { rel: r.to_string(), expected: *m, found: n })
                }
                _ => {
                    s.relations.insert(r.to_string(), n);
                }
            }
        }
        Ok(s)
    }

    pub fn check_term(&self, t: &Term) -> Result<(), SignatureError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(_, args) => {
                if !self.arithmetic {
                    return Err(SignatureError::NotArithmetic);
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// Checks that every atom matches its declared arity.
    pub fn check_formula(&self, f: &Formula) -> Result<(), SignatureError> {
        match f {
            Formula::Bot => Ok(()),
            Formula::Atom(r, args) => {
                let expected = self.arity(r).ok_or_else(|| SignatureError::UnknownRelation(r.clone()))?;
                if expected != args.len() {
                    return Err(SignatureError::Arity { rel: r.clone(), expected, found: args.len() });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Formula::Not(g) => self.check_formula(g),
            Formula::Bin(_, a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
            Formula::Quant { bound, body, .. } => {
                if let Some(b) = bound {
                    if !self.arithmetic {
                        return Err(SignatureError::NotArithmetic);
                    }
                    self.check_term(&b.term)?;
                }
                self.check_formula(body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Var {
        Var(0)
    }
    fn y() -> Var {
        Var(1)
    }

    #[test]
    fn free_vars_excludes_bound() {
        let f = Formula::and(Formula::rel("P", &[x()]), Formula::forall(y(), Formula::rel("Q", &[y()])));
        assert_eq!(f.free_vars(), BTreeSet::from([x()]));
    }

    #[test]
    fn free_vars_of_sentence_is_empty() {
        let f = Formula::forall(x(), Formula::exists(y(), Formula::rel("R", &[x(), y()])));
        assert!(f.free_vars().is_empty());
        assert!(f.is_sentence());
    }

    #[test]
    fn bound_term_variables_are_free() {
        // forall x < y . P(x)
        let f = Formula::bounded(Quant::Forall, x(), BoundKind::Plain, Term::Var(y()), Formula::rel("P", &[x()]));
        assert_eq!(f.free_vars(), BTreeSet::from([y()]));
    }

    #[test]
    fn signature_always_has_identity() {
        let s = Signature::relational("T", [("P", 1)]).unwrap();
        assert_eq!(s.arity(EQ), Some(2));
        assert!(Signature::relational("T", [("=", 3)]).is_err());
        assert!(Signature::relational("T", [("P", 1), ("P", 2)]).is_err());
    }

    #[test]
    fn relational_signature_rejects_function_terms() {
        let s = Signature::relational("T", [("P", 1)]).unwrap();
        let f = Formula::atom("P", vec![Term::zero()]);
        assert_eq!(s.check_formula(&f), Err(SignatureError::NotArithmetic));
        let g = Formula::rel("P", &[x(), y()]);
        assert!(matches!(s.check_formula(&g), Err(SignatureError::Arity { .. })));
    }
}
