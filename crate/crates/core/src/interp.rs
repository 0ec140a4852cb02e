//! Translations `<delta, F>` between relational languages, their action on
//! formulas and natural-deduction proofs, and bounded certificates for the
//! four interpretability notions.
//!
//! Proof translation keeps the tree shape. Each source node concluding `A`
//! becomes a node concluding `A^k`, possibly with open assumptions
//! `delta(z)` for the variables `z` it instantiates. Those are discharged
//! at the binders that introduce `z`, and any survivors at the root are
//! closed by `exists x delta(x)`, which belongs to the translated theory.

use crate::classify::rho;
use crate::coding::{code_syntax, count_up_to};
use crate::proof::{check_closed, check_proof, AxiomOracle, Proof, ProofError, Rule};
use crate::sexp::{self, ParseError, SExp};
use crate::subst::{alpha_eq, substitute, substitute_map};
use crate::syntax::{Formula, Quant, Signature, SignatureError, Term, Var, EQ};
use crate::theory::{signature_from_sexp, signature_to_string, Origin, TheoryError, TheorySpec};
use num_bigint::BigUint;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("relation `{0}` has no image under the translation")]
    Unmapped(String),
    #[error("source formula is not relational: {0}")]
    NotRelational(String),
    #[error("domain formula must have exactly one free variable, found {0}")]
    DeltaArity(usize),
    #[error("image of `{rel}` mentions a variable beyond its {arity} parameters")]
    ImageArity { rel: String, arity: usize },
    #[error("translation misses source relation `{0}`")]
    NotTotal(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("proof endpoint is not a sentence: {0}")]
    OpenEndpoint(String),
    #[error("equality rule needs identity mapped to identity")]
    EqualityNotPreserved,
    #[error("rule `{0}` is not supported here")]
    Unsupported(&'static str),
    #[error("variable {0} disappears from the conclusion, so its domain guard cannot be supplied")]
    Vanishing(String),
    #[error("order symbol `{0}` is not a binary relation of the target")]
    NoOrder(String),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// `<delta, F>`. Images use parameters `Var(0), ..., Var(arity - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub name: String,
    pub source: Signature,
    pub target: Signature,
    delta_var: Var,
    delta: Formula,
    map: BTreeMap<String, Formula>,
}

fn params(n: usize) -> Vec<Var> {
    (0..n as u32).map(Var).collect()
}

fn same_relations(a: &Signature, b: &Signature) -> bool {
    a.is_arithmetic() == b.is_arithmetic() && a.relations().eq(b.relations())
}

impl Translation {
    /// Checks the arity conditions and totality on the source signature.
    pub fn new(
        name: &str,
        source: Signature,
        target: Signature,
        delta: Formula,
        map: BTreeMap<String, Formula>,
    ) -> Result<Translation, InterpError> {
        if source.is_arithmetic() {
            return Err(InterpError::NotRelational(format!("source signature `{}`", source.name)));
        }
        let fv = delta.free_vars();
        if fv.len() != 1 {
            return Err(InterpError::DeltaArity(fv.len()));
        }
        target.check_formula(&delta)?;
        let delta_var = *fv.iter().next().expect("one free variable");
        for (r, n) in source.relations() {
            let img = map.get(r).ok_or_else(|| InterpError::NotTotal(r.to_string()))?;
            if img.free_vars().iter().any(|v| v.0 as usize >= n) {
                return Err(InterpError::ImageArity { rel: r.to_string(), arity: n });
            }
            target.check_formula(img)?;
        }
        if let Some(r) = map.keys().find(|r| !source.contains(r)) {
            return Err(InterpError::Unmapped(r.clone()));
        }
        Ok(Translation { name: name.to_string(), source, target, delta_var, delta, map })
    }

    /// `delta = (x = x)`, every symbol to itself.
    pub fn identity(sig: &Signature) -> Translation {
        let map = sig.relations().map(|(r, n)| (r.to_string(), Formula::rel(r, &params(n)))).collect();
        Translation::new(&format!("id-{}", sig.name), sig.clone(), sig.clone(), Formula::top_like(Var(0)), map)
            .expect("identity is a translation")
    }

    pub fn delta(&self) -> &Formula {
        &self.delta
    }

    pub fn delta_var(&self) -> Var {
        self.delta_var
    }

    pub fn image(&self, rel: &str) -> Option<&Formula> {
        self.map.get(rel)
    }

    pub fn images(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.map.iter().map(|(r, f)| (r.as_str(), f))
    }

    /// `delta(t)`.
    pub fn delta_at(&self, t: &Term) -> Formula {
        substitute(&self.delta, self.delta_var, t)
    }

    /// `F(R)(args)`.
    pub fn image_at(&self, rel: &str, args: &[Term]) -> Result<Formula, InterpError> {
        let img = self.map.get(rel).ok_or_else(|| InterpError::Unmapped(rel.to_string()))?;
        let m: BTreeMap<Var, Term> = args.iter().enumerate().map(|(i, t)| (Var(i as u32), t.clone())).collect();
        Ok(substitute_map(img, &m))
    }

    /// Identity is mapped literally to `x = y`.
    pub fn preserves_identity(&self) -> bool {
        self.map.get(EQ) == Some(&Formula::eq(Term::Var(Var(0)), Term::Var(Var(1))))
    }

    /// `exists x delta(x)`.
    pub fn nonempty_axiom(&self) -> Formula {
        Formula::exists(self.delta_var, self.delta.clone())
    }

    /// `(translation NAME (source SIG) (target SIG) (delta A) (rel R A) ...)`.
    /// Images use `x, y, z, ...` as their parameters in order; a missing
    /// identity clause means identity maps to itself.
    pub fn from_sexp(e: &SExp) -> Result<Translation, InterpError> {
        let bad = |e: &SExp, m: &str| InterpError::Parse(ParseError::new(e.pos(), m));
        let xs = e
            .as_list()
            .filter(|xs| xs.len() >= 5 && xs[0].as_atom() == Some("translation"))
            .ok_or_else(|| bad(e, "expected (translation NAME (source ...) (target ...) (delta ...) ...)"))?;
        let name = xs[1].as_atom().ok_or_else(|| bad(&xs[1], "expected a translation name"))?;
        let sig_clause = |e: &SExp, head: &str| -> Result<Signature, InterpError> {
            let ys = e
                .as_list()
                .filter(|ys| ys.len() == 2 && ys[0].as_atom() == Some(head))
                .ok_or_else(|| bad(e, &format!("expected ({head} (signature ...))")))?;
            Ok(signature_from_sexp(&ys[1], &format!("{name}-{head}"))?)
        };
        let source = sig_clause(&xs[2], "source")?;
        let target = sig_clause(&xs[3], "target")?;
        let mut delta = None;
        let mut map = BTreeMap::new();
        for c in &xs[4..] {
            let ys = c.as_list().ok_or_else(|| bad(c, "expected (delta A) or (rel R A)"))?;
            match (ys.first().and_then(SExp::as_atom), ys.len()) {
                (Some("delta"), 2) => delta = Some(sexp::formula_from_sexp(&ys[1], Some(&target))?),
                (Some("rel"), 3) => {
                    let r = ys[1].as_atom().ok_or_else(|| bad(&ys[1], "expected a relation symbol"))?;
                    if map.insert(r.to_string(), sexp::formula_from_sexp(&ys[2], Some(&target))?).is_some() {
                        return Err(bad(c, &format!("relation `{r}` mapped twice")));
                    }
                }
                _ => return Err(bad(c, "expected (delta A) or (rel R A)")),
            }
        }
        let delta = delta.ok_or_else(|| bad(e, "missing (delta A) clause"))?;
        map.entry(EQ.to_string()).or_insert_with(|| Formula::eq(Term::Var(Var(0)), Term::Var(Var(1))));
        Translation::new(name, source, target, delta, map)
    }

    pub fn parse(src: &str) -> Result<Translation, InterpError> {
        Translation::from_sexp(&sexp::read_one(src)?)
    }

    pub fn to_sexp_string(&self) -> String {
        let mut s = format!(
            "(translation {}\n  (source {})\n  (target {})\n  (delta {})",
            self.name,
            signature_to_string(&self.source),
            signature_to_string(&self.target),
            self.delta
        );
        for (r, f) in &self.map {
            s.push_str(&format!("\n  (rel {r} {f})"));
        }
        s.push_str(")\n");
        s
    }

    /// `rho(delta)` and the largest `rho` of an image.
    pub fn complexity(&self) -> (usize, usize) {
        (rho(&self.delta), self.map.values().map(rho).max().unwrap_or(0))
    }

    /// Longest printed length among `delta` and the images.
    pub fn max_image_len(&self) -> usize {
        std::iter::once(&self.delta).chain(self.map.values()).map(|f| f.to_string().len()).max().unwrap_or(0)
    }
}

impl fmt::Display for Translation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexp_string())
    }
}

/// `phi^k`.
pub fn translate_formula(k: &Translation, phi: &Formula) -> Result<Formula, InterpError> {
    Ok(match phi {
        Formula::Bot => Formula::Bot,
        Formula::Atom(r, args) => {
            if args.iter().any(|t| t.as_var().is_none()) {
                return Err(InterpError::NotRelational(phi.to_string()));
            }
            k.image_at(r, args)?
        }
        Formula::Not(a) => Formula::not(translate_formula(k, a)?),
        Formula::Bin(c, a, b) => {
            Formula::Bin(*c, Box::new(translate_formula(k, a)?), Box::new(translate_formula(k, b)?))
        }
        Formula::Quant { bound: Some(_), .. } => return Err(InterpError::NotRelational(phi.to_string())),
        Formula::Quant { q, var, bound: None, body } => {
            let guard = k.delta_at(&Term::Var(*var));
            let body = translate_formula(k, body)?;
            match q {
                Quant::Forall => Formula::forall(*var, Formula::imp(guard, body)),
                Quant::Exists => Formula::exists(*var, Formula::and(guard, body)),
            }
        }
    })
}

/// Conjunction of `delta(x)` over `vars` in ascending order.
pub fn guard_conj(k: &Translation, vars: &BTreeSet<Var>) -> Option<Formula> {
    Formula::conj(vars.iter().map(|v| k.delta_at(&Term::Var(*v))).collect())
}

/// `(delta(x1) and ... and delta(xn)) -> phi^k` over the free variables in
/// ascending order; `phi^k` itself for sentences.
pub fn translate_closure(k: &Translation, phi: &Formula) -> Result<Formula, InterpError> {
    let t = translate_formula(k, phi)?;
    Ok(match guard_conj(k, &phi.free_vars()) {
        None => t,
        Some(g) => Formula::imp(g, t),
    })
}

/// `{A^k : A in V} + {exists x delta(x)}` over the target signature.
pub fn translated_theory(k: &Translation, v: &TheorySpec) -> Result<TheorySpec, InterpError> {
    if !same_relations(&k.source, &v.signature) {
        return Err(InterpError::SignatureMismatch(format!(
            "theory `{}` is not over the source of `{}`",
            v.name, k.name
        )));
    }
    let mut axioms = vec![k.nonempty_axiom()];
    for a in v.axiom_list() {
        axioms.push(translate_formula(k, &a)?);
    }
    Ok(TheorySpec::with_origin(
        &format!("{}^{}", v.name, k.name),
        k.target.clone(),
        axioms,
        Origin::Translated { source: v.name.clone() },
    )?)
}

/// Accepts every axiom citation; used to compute open assumptions.
pub(crate) struct AnyAxiom;

impl AxiomOracle for AnyAxiom {
    fn name(&self) -> &str {
        "any"
    }
    fn is_axiom(&self, _: &Formula) -> bool {
        true
    }
}

fn labels(p: &Proof, out: &mut BTreeSet<String>) {
    match &p.rule {
        Rule::Assume(l) | Rule::OrE(l) | Rule::ImpI(l) | Rule::NotI(l) | Rule::Raa(l) | Rule::ExistsE(_, l) => {
            out.insert(l.clone());
        }
        _ => {}
    }
    p.premises.iter().for_each(|q| labels(q, out));
}

/// A label prefix no label of `p` starts with.
fn fresh_prefix(p: &Proof, base: &str) -> String {
    let mut used = BTreeSet::new();
    labels(p, &mut used);
    let mut prefix = base.to_string();
    while used.iter().any(|l| l.starts_with(&prefix)) {
        prefix.push('_');
    }
    prefix
}

struct ProofTranslator<'a> {
    k: &'a Translation,
    prefix: String,
    next_label: usize,
}

impl ProofTranslator<'_> {
    fn dom_label(&self, v: Var) -> String {
        format!("{}-{}", self.prefix, sexp::var_name(v))
    }

    fn var_of(&self, t: &Term) -> Result<Var, InterpError> {
        t.as_var().ok_or_else(|| InterpError::NotRelational(sexp::print_term(t)))
    }

    fn dom(&self, v: Var) -> Proof {
        Proof::assume(&self.dom_label(v), self.k.delta_at(&Term::Var(v)))
    }

    fn tr(&mut self, q: &Proof) -> Result<Proof, InterpError> {
        let k = self.k;
        let c = translate_formula(k, &q.conclusion)?;
        let mut prem = Vec::with_capacity(q.premises.len());
        for p in &q.premises {
            prem.push(self.tr(p)?);
        }
        Ok(match &q.rule {
            Rule::Assume(l) => Proof::assume(l, c),
            Rule::Axiom(_) => Proof::axiom(c),
            Rule::EqRefl | Rule::EqSubst(..) if !k.preserves_identity() => return Err(InterpError::EqualityNotPreserved),
            Rule::EqRefl => Proof::leaf(Rule::EqRefl, c),
            Rule::EqSubst(z, ctx) => Proof::node(Rule::EqSubst(*z, translate_formula(k, ctx)?), c, prem),
            Rule::BDef => return Err(InterpError::Unsupported("bdef")),
            Rule::ForallI(a) => {
                let p0 = prem.pop().expect("one premise");
                let body = Proof::imp_i(&self.dom_label(*a), k.delta_at(&Term::Var(*a)), p0);
                Proof::node(Rule::ForallI(*a), c, vec![body])
            }
            Rule::ForallE(t) => {
                let v = self.var_of(t)?;
                let inst = Proof::forall_e(prem.pop().expect("one premise"), t.clone());
                Proof::node(Rule::ImpE, c, vec![inst, self.dom(v)])
            }
            Rule::ExistsI(t) => {
                let v = self.var_of(t)?;
                let p0 = prem.pop().expect("one premise");
                Proof::node(Rule::ExistsI(t.clone()), c, vec![Proof::and_i(self.dom(v), p0)])
            }
            Rule::ExistsE(a, l) => {
                let minor = prem.pop().expect("two premises");
                let major = prem.pop().expect("two premises");
                let (x, body) = match &q.premises[0].conclusion {
                    Formula::Quant { var, body, .. } => (*var, body),
                    _ => return Err(InterpError::Unsupported("exists-e without an existential")),
                };
                let hyp = translate_formula(k, &substitute(body, x, &Term::Var(*a)))?;
                let d = k.delta_at(&Term::Var(*a));
                let curried = Proof::imp_i(&self.dom_label(*a), d.clone(), Proof::imp_i(l, hyp.clone(), minor));
                self.next_label += 1;
                let l2 = format!("{}-w{}", self.prefix, self.next_label);
                let pair = Proof::assume(&l2, Formula::and(d, hyp));
                let step = Proof::imp_e(Proof::imp_e(curried, Proof::and_el(pair.clone())), Proof::and_er(pair));
                Proof::node(Rule::ExistsE(*a, l2), c, vec![major, step])
            }
            rule => Proof::node(rule.clone(), c, prem),
        })
    }
}

/// `p^k`. Requires a sentence as conclusion and sentences as open
/// assumptions; the result cites axioms of [`translated_theory`].
pub fn translate_proof(k: &Translation, p: &Proof) -> Result<Proof, InterpError> {
    let checked = check_proof(p, &AnyAxiom)?;
    if !checked.conclusion.is_sentence() {
        return Err(InterpError::OpenEndpoint(checked.conclusion.to_string()));
    }
    if let Some(a) = checked.open.iter().find(|a| !a.formula.is_sentence()) {
        return Err(InterpError::OpenEndpoint(format!("{}: {}", a.label, a.formula)));
    }
    let mut t = ProofTranslator { k, prefix: fresh_prefix(p, "dom"), next_label: 0 };
    let mut out = t.tr(p)?;
    let open = check_proof(&out, &AnyAxiom)?.open;
    let mut pending: BTreeSet<Var> = BTreeSet::new();
    for o in &open {
        if let Some(v) = o.label.strip_prefix(&format!("{}-", t.prefix)).and_then(sexp::parse_var_name) {
            pending.insert(v);
        }
    }
    for v in pending {
        out = Proof::exists_e(v, &t.dom_label(v), Proof::axiom(k.nonempty_axiom()), out);
    }
    Ok(out)
}

/// The closure-form translation: every node concluding `A` becomes a node
/// concluding [`translate_closure`] of `A`. Covers proofs without
/// discharging rules whose premises mention only variables of the
/// conclusion (plus the eigenvariable of `forall-i`).
pub fn translate_open(k: &Translation, p: &Proof) -> Result<Proof, InterpError> {
    let prefix = fresh_prefix(p, "dom");
    tr_open(k, p, &prefix)
}

fn project(k: &Translation, vars: &BTreeSet<Var>, hyp: Proof) -> BTreeMap<Var, Proof> {
    let mut out = BTreeMap::new();
    let mut rest = hyp;
    let vs: Vec<Var> = vars.iter().copied().collect();
    for (i, v) in vs.iter().enumerate() {
        if i + 1 == vs.len() {
            out.insert(*v, rest.clone());
        } else {
            out.insert(*v, Proof::and_el(rest.clone()));
            rest = Proof::and_er(rest);
        }
    }
    debug_assert!(out.iter().all(|(v, q)| q.conclusion == k.delta_at(&Term::Var(*v))));
    out
}

fn supply(vars: &BTreeSet<Var>, avail: &BTreeMap<Var, Proof>) -> Result<Option<Proof>, InterpError> {
    let mut items = Vec::new();
    for v in vars {
        items.push(avail.get(v).cloned().ok_or_else(|| InterpError::Vanishing(sexp::var_name(*v)))?);
    }
    let mut it = items.into_iter().rev();
    let Some(last) = it.next() else { return Ok(None) };
    Ok(Some(it.fold(last, |acc, q| Proof::and_i(q, acc))))
}

fn tr_open(k: &Translation, q: &Proof, prefix: &str) -> Result<Proof, InterpError> {
    let fv = q.conclusion.free_vars();
    let target = translate_formula(k, &q.conclusion)?;
    let hyp_f = guard_conj(k, &fv);
    let mut avail = match &hyp_f {
        Some(h) => project(k, &fv, Proof::assume(prefix, h.clone())),
        None => BTreeMap::new(),
    };
    let eigen_label = format!("{prefix}-e");
    if let Rule::ForallI(a) = &q.rule {
        avail.insert(*a, Proof::assume(&eigen_label, k.delta_at(&Term::Var(*a))));
    }
    let mut inner = Vec::new();
    for p in &q.premises {
        let tp = tr_open(k, p, prefix)?;
        inner.push(match supply(&p.conclusion.free_vars(), &avail)? {
            None => tp,
            Some(g) => Proof::imp_e(tp, g),
        });
    }
    let body = match &q.rule {
        Rule::Assume(l) => return Ok(Proof::assume(l, translate_closure(k, &q.conclusion)?)),
        Rule::Axiom(_) => Proof::axiom(target.clone()),
        Rule::EqRefl | Rule::EqSubst(..) if !k.preserves_identity() => return Err(InterpError::EqualityNotPreserved),
        Rule::EqRefl => Proof::leaf(Rule::EqRefl, target.clone()),
        Rule::EqSubst(z, ctx) => Proof::node(Rule::EqSubst(*z, translate_formula(k, ctx)?), target.clone(), inner),
        Rule::AndI | Rule::AndEL | Rule::AndER | Rule::OrIL | Rule::OrIR | Rule::ImpE | Rule::NotE | Rule::BotE => {
            Proof::node(q.rule.clone(), target.clone(), inner)
        }
        Rule::ForallI(a) => {
            let p0 = inner.pop().expect("one premise");
            let g = Proof::imp_i(&eigen_label, k.delta_at(&Term::Var(*a)), p0);
            Proof::node(Rule::ForallI(*a), target.clone(), vec![g])
        }
        Rule::ForallE(t) => {
            let v = t.as_var().ok_or_else(|| InterpError::NotRelational(sexp::print_term(t)))?;
            let d = supply(&BTreeSet::from([v]), &avail)?.expect("one variable");
            Proof::node(Rule::ImpE, target.clone(), vec![Proof::forall_e(inner.pop().expect("one premise"), t.clone()), d])
        }
        Rule::ExistsI(t) => {
            let v = t.as_var().ok_or_else(|| InterpError::NotRelational(sexp::print_term(t)))?;
            let d = supply(&BTreeSet::from([v]), &avail)?.expect("one variable");
            Proof::node(Rule::ExistsI(t.clone()), target.clone(), vec![Proof::and_i(d, inner.pop().expect("one premise"))])
        }
        r => return Err(InterpError::Unsupported(r.tag())),
    };
    Ok(match hyp_f {
        None => body,
        Some(h) => Proof::imp_i(prefix, h, body),
    })
}

/// Multiplier of the quadratic part of [`size_bound`].
pub const SIZE_BOUND_C0: u64 = 4;

/// `f(n, k) = max(c0 * (n + rho(delta) + max rho(F(R)) + 1)^2, code part)`.
/// The code part bounds the codes of translated axioms: a source formula of
/// code `<= n` prints in at most `l` symbols, its translation in at most
/// `l * (2L + 2l + 16)` where `L` is the longest image, and the code of a
/// string of length `m` is below `95^(m+1)`.
pub fn size_bound(n: &BigUint, k: &Translation) -> BigUint {
    size_bound_with(n, k, SIZE_BOUND_C0)
}

pub fn size_bound_with(n: &BigUint, k: &Translation, c0: u64) -> BigUint {
    let (rd, rf) = k.complexity();
    let base = n + BigUint::from(rd + rf + 1);
    let quadratic = BigUint::from(c0) * &base * &base;
    let mut l: u32 = 0;
    while count_up_to(95, l) <= *n {
        l += 1;
    }
    let m = l as usize * (2 * k.max_image_len() + 2 * l as usize + 16);
    let codes = BigUint::from(95u32).pow(m as u32 + 1).max(code_syntax(&k.nonempty_axiom()));
    quadratic.max(codes)
}

/// `j o k`: `k` from `S` into `M`, `j` from `M` into `T`.
pub fn compose(j: &Translation, k: &Translation) -> Result<Translation, InterpError> {
    if !same_relations(&k.target, &j.source) {
        return Err(InterpError::SignatureMismatch(format!("target of `{}` is not the source of `{}`", k.name, j.name)));
    }
    let x = j.delta_var;
    let dk = translate_formula(j, &k.delta_at(&Term::Var(x)))?;
    let delta = Formula::and(j.delta.clone(), dk);
    let mut map = BTreeMap::new();
    for (r, f) in &k.map {
        map.insert(r.clone(), translate_formula(j, f)?);
    }
    Translation::new(&format!("{}.{}", j.name, k.name), k.source.clone(), j.target.clone(), delta, map)
}

/// `delta'(x) = delta(x) and forall y (y < x -> (delta(y) -> not y =^j x))`
/// with identity mapped to identity. `order` names a binary target relation.
/// Sound only when the target proves least-number principles for the
/// formulas involved; that side condition is not checked.
pub fn normalize_identity(j: &Translation, order: &str) -> Result<Translation, InterpError> {
    if j.target.arity(order) != Some(2) {
        return Err(InterpError::NoOrder(order.to_string()));
    }
    let x = j.delta_var;
    let mut fresh = std::iter::once(&j.delta).chain(j.map.values()).filter_map(Formula::max_var).max().unwrap_or(0);
    fresh = fresh.max(x.0) + 1;
    let y = Var(fresh);
    let (tx, ty) = (Term::Var(x), Term::Var(y));
    let eq_j = j.image_at(EQ, &[ty.clone(), tx.clone()])?;
    let least = Formula::forall(
        y,
        Formula::imp(Formula::atom(order, vec![ty.clone(), tx]), Formula::imp(j.delta_at(&ty), Formula::not(eq_j))),
    );
    let mut map = j.map.clone();
    map.insert(EQ.to_string(), Formula::eq(Term::Var(Var(0)), Term::Var(Var(1))));
    Translation::new(
        &format!("{}-normal", j.name),
        j.source.clone(),
        j.target.clone(),
        Formula::and(j.delta.clone(), least),
        map,
    )
}

/// The four notions, as bounded certificate checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    A,
    T,
    Sa,
    St,
}

impl FromStr for Notion {
    type Err = String;
    fn from_str(s: &str) -> Result<Notion, String> {
        match s {
            "a" => Ok(Notion::A),
            "t" => Ok(Notion::T),
            "sa" => Ok(Notion::Sa),
            "st" => Ok(Notion::St),
            _ => Err(format!("unknown notion `{s}`; expected a, t, sa or st")),
        }
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::A => "a",
            Notion::T => "t",
            Notion::Sa => "sa",
            Notion::St => "st",
        })
    }
}

/// Witnesses that a translation carries source axioms (and theorems) into
/// target proofs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub translation: Translation,
    pub source: TheorySpec,
    pub target: TheorySpec,
    /// Axioms of code `<= x` are claimed covered.
    pub x: BigUint,
    /// Source axiom code to a target proof of its translation.
    pub witnesses: BTreeMap<BigUint, Proof>,
    /// Target proof of `exists x delta(x)`, needed when translated proofs
    /// instantiate free parameters.
    pub domain: Option<Proof>,
    /// Source proof paired with a target proof of its translated conclusion.
    pub theorems: Vec<(Proof, Proof)>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CertFailure {
    pub code: Option<String>,
    pub index: Option<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CertReport {
    pub notion: Notion,
    pub certified: bool,
    pub x: String,
    /// Largest code of a checked witness, for the smooth notions.
    pub y: Option<String>,
    pub checked: usize,
    pub failures: Vec<CertFailure>,
    pub statement: String,
}

/// Checks `c` for `notion`. Reports only what holds at the stated bounds.
pub fn verify_certificate(c: &Certificate, notion: Notion) -> CertReport {
    let k = &c.translation;
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut y: Option<BigUint> = None;
    let mut note_y = |p: &Proof| {
        let code = code_syntax(p);
        if y.as_ref().is_none_or(|m| code > *m) {
            y = Some(code);
        }
    };
    let fail = |code: Option<&BigUint>, index: Option<usize>, reason: String| CertFailure {
        code: code.map(|c| c.to_string()),
        index,
        reason,
    };
    match notion {
        Notion::A | Notion::Sa => {
            for (code, ax) in c.source.axioms_upto(&c.x) {
                checked += 1;
                let Some(w) = c.witnesses.get(code) else {
                    failures.push(fail(Some(code), None, "no witness for this axiom".into()));
                    continue;
                };
                let want = match translate_formula(k, ax) {
                    Ok(f) => f,
                    Err(e) => {
                        failures.push(fail(Some(code), None, e.to_string()));
                        continue;
                    }
                };
                match check_closed(w, &c.target) {
                    Ok(got) if alpha_eq(&got, &want) => note_y(w),
                    Ok(got) => failures.push(fail(Some(code), None, format!("witness concludes {got}, expected {want}"))),
                    Err(e) => failures.push(fail(Some(code), None, e.to_string())),
                }
            }
        }
        Notion::T | Notion::St => {
            for (i, (p, w)) in c.theorems.iter().enumerate() {
                checked += 1;
                let phi = match check_closed(p, &c.source) {
                    Ok(f) => f,
                    Err(e) => {
                        failures.push(fail(None, Some(i), format!("source proof: {e}")));
                        continue;
                    }
                };
                let want = match translate_closure(k, &phi) {
                    Ok(f) => f,
                    Err(e) => {
                        failures.push(fail(None, Some(i), e.to_string()));
                        continue;
                    }
                };
                match check_closed(w, &c.target) {
                    Ok(got) if alpha_eq(&got, &want) => note_y(w),
                    Ok(got) => failures.push(fail(None, Some(i), format!("witness concludes {got}, expected {want}"))),
                    Err(e) => failures.push(fail(None, Some(i), format!("witness: {e}"))),
                }
            }
        }
    }
    let certified = failures.is_empty();
    let smooth = matches!(notion, Notion::Sa | Notion::St);
    let y = if smooth { y.map(|v| v.to_string()) } else { None };
    let statement = match (notion, certified) {
        (_, false) => format!("not certified: {} of {checked} checks failed", failures.len()),
        (Notion::A, true) => format!("every source axiom of code <= x has a target proof of its translation ({checked} axioms)"),
        (Notion::Sa, true) => format!(
            "every source axiom of code <= x has a target proof of its translation of code <= y ({checked} axioms)"
        ),
        (Notion::T, true) => format!("each of the {checked} supplied source theorems has a target proof of its translation"),
        (Notion::St, true) => format!(
            "each of the {checked} supplied source theorems has a target proof of its translation of code <= y"
        ),
    };
    CertReport { notion, certified, x: c.x.to_string(), y, checked, failures, statement }
}

/// `p^j` with each translated axiom citation replaced by its witness; the
/// construction taking smooth axiom certificates to theorem certificates.
pub fn substitute_witnesses(c: &Certificate, p: &Proof) -> Result<Proof, InterpError> {
    let k = &c.translation;
    let mut by_image: BTreeMap<BigUint, Proof> = BTreeMap::new();
    for (code, ax) in c.source.axioms() {
        if let Some(w) = c.witnesses.get(code) {
            by_image.insert(code_syntax(&translate_formula(k, ax)?), w.clone());
        }
    }
    if let Some(d) = &c.domain {
        by_image.insert(code_syntax(&k.nonempty_axiom()), d.clone());
    }
    let t = translate_proof(k, p)?;
    let mut missing = None;
    let out = replace_axioms(&t, &by_image, &mut missing);
    match missing {
        Some(f) => Err(InterpError::Unmapped(format!("no witness for translated axiom {f}"))),
        None => Ok(out),
    }
}

fn replace_axioms(p: &Proof, table: &BTreeMap<BigUint, Proof>, missing: &mut Option<Formula>) -> Proof {
    if let Rule::Axiom(code) = &p.rule {
        return match table.get(code) {
            Some(w) => w.clone(),
            None => {
                missing.get_or_insert_with(|| p.conclusion.clone());
                p.clone()
            }
        };
    }
    let premises = p.premises.iter().map(|q| replace_axioms(q, table, missing)).collect();
    Proof { rule: p.rule.clone(), conclusion: p.conclusion.clone(), premises }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Manifest {
    translation: String,
    source: String,
    target: String,
    x: String,
    witnesses: Vec<(String, String)>,
    domain: Option<String>,
    theorems: Vec<(String, String)>,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("{path}: {msg}")]
    Content { path: String, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BundleError + '_ {
    move |source| BundleError::Io { path: path.display().to_string(), source }
}

impl Certificate {
    /// Directory of s-expression files plus `manifest.json`.
    pub fn save_bundle(&self, dir: &Path) -> Result<(), BundleError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let write = |name: &str, body: String| -> Result<String, BundleError> {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(io_err(&p))?;
            Ok(name.to_string())
        };
        let mut witnesses = Vec::new();
        for (i, (code, w)) in self.witnesses.iter().enumerate() {
            witnesses.push((code.to_string(), write(&format!("witness-{i}.proof"), crate::proof::pretty_proof(w))?));
        }
        let mut theorems = Vec::new();
        for (i, (p, w)) in self.theorems.iter().enumerate() {
            theorems.push((
                write(&format!("theorem-{i}.proof"), crate::proof::pretty_proof(p))?,
                write(&format!("theorem-{i}-witness.proof"), crate::proof::pretty_proof(w))?,
            ));
        }
        let domain = match &self.domain {
            Some(d) => Some(write("domain.proof", crate::proof::pretty_proof(d))?),
            None => None,
        };
        let m = Manifest {
            translation: write("translation.sexp", self.translation.to_sexp_string())?,
            source: write("source.theory", self.source.to_sexp_string())?,
            target: write("target.theory", self.target.to_sexp_string())?,
            x: self.x.to_string(),
            witnesses,
            domain,
            theorems,
        };
        write("manifest.json", serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(())
    }

    pub fn load_bundle(dir: &Path) -> Result<Certificate, BundleError> {
        let read = |name: &str| -> Result<String, BundleError> {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(io_err(&p))
        };
        let content = |name: &str, msg: String| BundleError::Content { path: dir.join(name).display().to_string(), msg };
        let m: Manifest = serde_json::from_str(&read("manifest.json")?)?;
        let proof = |name: &str| -> Result<Proof, BundleError> {
            crate::proof::parse_proof(&read(name)?).map_err(|e| content(name, e.to_string()))
        };
        let theory = |name: &str| -> Result<TheorySpec, BundleError> {
            TheorySpec::parse(&read(name)?).map_err(|e| content(name, e.to_string()))
        };
        let translation =
            Translation::parse(&read(&m.translation)?).map_err(|e| content(&m.translation, e.to_string()))?;
        let x = m.x.parse::<BigUint>().map_err(|e| content("manifest.json", e.to_string()))?;
        let mut witnesses = BTreeMap::new();
        for (code, file) in &m.witnesses {
            let code = code.parse::<BigUint>().map_err(|e| content("manifest.json", e.to_string()))?;
            witnesses.insert(code, proof(file)?);
        }
        let mut theorems = Vec::new();
        for (p, w) in &m.theorems {
            theorems.push((proof(p)?, proof(w)?));
        }
        Ok(Certificate {
            translation,
            source: theory(&m.source)?,
            target: theory(&m.target)?,
            x,
            witnesses,
            domain: m.domain.as_deref().map(proof).transpose()?,
            theorems,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn pq() -> Signature {
        Signature::relational("PQ", [("P", 1), ("Q", 1), ("R", 2)]).unwrap()
    }

    fn dq() -> Translation {
        let tgt = Signature::relational("DQ", [("D", 1), ("Q", 1), ("E", 2)]).unwrap();
        Translation::parse(&format!(
            "(translation k (source {}) (target {}) (delta (D x)) (rel P (Q x)) (rel Q (not (Q x))) (rel R (exists z (and (E x z) (E z y)))))",
            signature_to_string(&pq()),
            signature_to_string(&tgt)
        ))
        .unwrap()
    }

    #[test]
    fn quantifier_clause_relativizes() {
        let k = dq();
        assert_eq!(
            translate_formula(&k, &f("(forall x (P x))")).unwrap(),
            f("(forall x (-> (D x) (Q x)))")
        );
        assert_eq!(translate_formula(&k, &Formula::Bot).unwrap(), Formula::Bot);
        assert_eq!(
            translate_formula(&k, &f("(exists y (Q y))")).unwrap(),
            f("(exists y (and (D y) (not (Q y))))")
        );
    }

    #[test]
    fn images_avoid_capture() {
        let k = dq();
        let g = translate_formula(&k, &f("(R z x)")).unwrap();
        assert!(alpha_eq(&g, &f("(exists u (and (E z u) (E u x)))")), "{g}");
    }

    #[test]
    fn closure_orders_guards_by_index() {
        let k = dq();
        assert_eq!(translate_closure(&k, &f("(R y x)")).unwrap().to_string(), {
            let body = translate_formula(&k, &f("(R y x)")).unwrap();
            format!("(-> (and (D x) (D y)) {body})")
        });
        let s = f("(forall x (P x))");
        assert_eq!(translate_closure(&k, &s).unwrap(), translate_formula(&k, &s).unwrap());
    }

    #[test]
    fn and_intro_closure_shape() {
        let k = dq();
        let p = Proof::and_i(Proof::assume("1", f("(P x)")), Proof::assume("2", f("(Q y)")));
        let t = translate_open(&k, &p).unwrap();
        assert_eq!(t.rule, Rule::ImpI("dom".into()));
        assert_eq!(t.conclusion, translate_closure(&k, &p.conclusion).unwrap());
        let conj = &t.premises[0];
        assert_eq!(conj.rule, Rule::AndI);
        for (side, q) in conj.premises.iter().enumerate() {
            assert_eq!(q.rule, Rule::ImpE);
            assert_eq!(q.premises[0].rule, Rule::Assume((side + 1).to_string()));
            let proj = &q.premises[1];
            let expected = if side == 0 { Rule::AndEL } else { Rule::AndER };
            assert_eq!(proj.rule, expected);
            assert_eq!(proj.premises[0].rule, Rule::Assume("dom".into()));
        }
        let c = check_proof(&t, &AnyAxiom).unwrap();
        let labels: BTreeSet<_> = c.open.iter().map(|o| o.label.as_str()).collect();
        assert_eq!(labels, BTreeSet::from(["1", "2"]));
    }

    #[test]
    fn open_endpoints_are_rejected() {
        let k = dq();
        let p = Proof::assume("1", f("(P x)"));
        assert!(matches!(translate_proof(&k, &p), Err(InterpError::OpenEndpoint(_))));
    }

    #[test]
    fn parameter_needs_nonempty_domain() {
        // forall x P x |- exists x P x, through the parameter y.
        let k = dq();
        let all = f("(forall x (P x))");
        let p = Proof::imp_i(
            "h",
            all.clone(),
            Proof::exists_i(f("(exists x (P x))"), Term::Var(Var(1)), Proof::forall_e(Proof::assume("h", all), Term::Var(Var(1)))),
        );
        let t = translate_proof(&k, &p).unwrap();
        assert_eq!(t.rule.tag(), "exists-e");
        let v = TheorySpec::finite("V", pq(), vec![]).unwrap();
        let th = translated_theory(&k, &v).unwrap();
        let got = check_closed(&t, &th).unwrap();
        assert!(alpha_eq(&got, &translate_formula(&k, &p.conclusion).unwrap()));
    }

    #[test]
    fn existential_elimination_translates() {
        let k = dq();
        let ex = f("(exists x (and (P x) (Q x)))");
        let minor = Proof::exists_i(
            f("(exists y (P y))"),
            Term::Var(Var(3)),
            Proof::and_el(Proof::assume("w", f("(and (P u) (Q u))"))),
        );
        let p = Proof::imp_i("h", ex.clone(), Proof::exists_e(Var(3), "w", Proof::assume("h", ex), minor));
        check_closed(&p, &AnyAxiom).unwrap();
        let t = translate_proof(&k, &p).unwrap();
        let got = check_closed(&t, &AnyAxiom).unwrap();
        assert!(alpha_eq(&got, &translate_formula(&k, &p.conclusion).unwrap()));
        assert!(t.axiom_codes().is_empty());
    }

    #[test]
    fn composition_unfolds_on_atoms() {
        let k = dq();
        let j = Translation::identity(&k.target);
        let c = compose(&j, &k).unwrap();
        assert_eq!(c.image("P").unwrap(), &translate_formula(&j, k.image("P").unwrap()).unwrap());
        assert!(compose(&k, &k).is_err());
    }

    #[test]
    fn normalization_keeps_identity_literal() {
        let sig = Signature::relational("O", [("L", 2)]).unwrap();
        let j = Translation::parse(&format!(
            "(translation e (source {s}) (target {s}) (delta (= x x)) (rel = (L x y)) (rel L (L x y)))",
            s = signature_to_string(&sig)
        ))
        .unwrap();
        let n = normalize_identity(&j, "L").unwrap();
        assert!(n.preserves_identity());
        assert!(normalize_identity(&j, "<").is_err());
    }

    #[test]
    fn size_bound_dominates_source_level() {
        let k = dq();
        for n in [0u64, 1, 10, 1 << 40] {
            let n = BigUint::from(n);
            assert!(size_bound(&n, &k) >= n);
            assert!(size_bound(&(&n + 1u32), &k) >= size_bound(&n, &k));
        }
    }

    #[test]
    fn translation_file_round_trip() {
        let k = dq();
        assert_eq!(Translation::parse(&k.to_sexp_string()).unwrap(), k);
    }
}
