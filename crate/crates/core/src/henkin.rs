//! Desk-scale Henkin completion: witness constants, completion against a
//! finite-model oracle, term models, and certificates built from the
//! atomic diagram of a finite model.
//!
//! Constants are unary relations `C` with `exists x (C x and forall y (C y -> y = x))`;
//! a sentence `phi(c)` is written `exists x (C x and phi(x))`.

use crate::coding::{code_syntax, count_up_to, decode, Alphabet};
use crate::interp::{translate_formula, Certificate, Translation};
use crate::model::{eval, eval_sentence, for_each_model, Assignment, Elem, ModelError, Structure};
use crate::proof::Proof;
use crate::sexp::{parse_formula, var_name};
use crate::subst::substitute;
use crate::syntax::{Conn, Formula, Quant, Signature, Term, Var, EQ};
use crate::theory::{Origin, TheoryError, TheorySpec};
use num_bigint::BigUint;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HenkinError {
    #[error("the oracle found no model of `{0}`: refusing to complete it")]
    BaseRejected(String),
    #[error("the oracle is inconclusive on the base theory `{0}`")]
    BaseInconclusive(String),
    #[error("theory `{0}` is arithmetical; completion needs a relational signature")]
    Arithmetic(String),
    #[error("the sentence universe below the bound has more than {0} members")]
    UniverseTooLarge(usize),
    #[error("state is truncated: {reason}")]
    Truncated { reason: String, partial: Option<Box<Structure>> },
    #[error("axiom {code} is false in the structure: {axiom}")]
    AxiomFalse { code: String, axiom: String },
    #[error("sentence of W is false in the term model: {0}")]
    Unsound(String),
    #[error("bad state file: {0}")]
    State(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Largest sentence universe [`sentence_universe`] materializes.
pub const MAX_UNIVERSE: usize = 20_000;

/// Completion gives up on closing the domain after this many rounds.
pub const MAX_CLOSURE_ROUNDS: usize = 8;

/// The bound covering every string of at most `len` symbols.
pub fn bound_for_length(len: u32) -> BigUint {
    count_up_to(Alphabet::syntax().size(), len) - 1u32
}

fn printed_len_of_bound(b: &BigUint) -> usize {
    decode(b, &Alphabet::syntax()).chars().count()
}

/// Sentences over `sig` of code `<= b`, ascending by code. Bound variables
/// are canonical: a quantifier under `d` others binds `Var(d)`.
pub fn sentence_universe(sig: &Signature, b: &BigUint) -> Result<Vec<Formula>, HenkinError> {
    if sig.is_arithmetic() {
        return Err(HenkinError::Arithmetic(sig.name.clone()));
    }
    let max = printed_len_of_bound(b);
    let mut g = Generator { sig, memo: BTreeMap::new(), total: 0 };
    let mut out = Vec::new();
    for len in 1..=max {
        for f in g.exact(0, len)? {
            let c = code_syntax(&f);
            if c <= *b {
                out.push((c, f));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, f)| f).collect())
}

struct Generator<'a> {
    sig: &'a Signature,
    memo: BTreeMap<(u32, usize), Vec<Formula>>,
    total: usize,
}

impl Generator<'_> {
    /// Formulas with free variables among `Var(0..d)`, printed in exactly `len` symbols.
    fn exact(&mut self, d: u32, len: usize) -> Result<Vec<Formula>, HenkinError> {
        if let Some(v) = self.memo.get(&(d, len)) {
            return Ok(v.clone());
        }
        let mut out = Vec::new();
        if len == 3 {
            out.push(Formula::Bot);
        }
        let names: Vec<String> = (0..d).map(|i| var_name(Var(i))).collect();
        for (r, k) in self.sig.relations() {
            let base = if k == 0 { r.len() } else { 2 + r.len() + k };
            if k > 0 && d == 0 || base > len {
                continue;
            }
            for args in arg_tuples(d, k) {
                let l = base + args.iter().map(|a| names[a.0 as usize].len()).sum::<usize>();
                if l == len {
                    out.push(Formula::rel(r, &args));
                }
            }
        }
        if len > 6 {
            for a in self.exact(d, len - 6)? {
                out.push(Formula::not(a));
            }
        }
        for (conn, extra) in [(Conn::And, 7), (Conn::Or, 6), (Conn::Imp, 6)] {
            if len <= extra {
                continue;
            }
            for la in 1..len - extra {
                let lb = len - extra - la;
                let left = self.exact(d, la)?;
                if left.is_empty() {
                    continue;
                }
                let right = self.exact(d, lb)?;
                for a in &left {
                    for b in &right {
                        out.push(Formula::Bin(conn, Box::new(a.clone()), Box::new(b.clone())));
                    }
                }
            }
        }
        let v = Var(d);
        let head = 10 + var_name(v).len();
        if len > head {
            for body in self.exact(d + 1, len - head)? {
                out.push(Formula::forall(v, body.clone()));
                out.push(Formula::exists(v, body));
            }
        }
        self.total += out.len();
        if self.total > MAX_UNIVERSE * 8 {
            return Err(HenkinError::UniverseTooLarge(MAX_UNIVERSE));
        }
        self.memo.insert((d, len), out.clone());
        Ok(out)
    }
}

fn arg_tuples(d: u32, k: usize) -> Vec<Vec<Var>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..d).map(move |v| [t.clone(), vec![Var(v)]].concat())).collect();
    }
    out
}

/// A witness constant and the existential sentence it was made for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub name: String,
    pub sentence: Formula,
}

const X0: Var = Var(0);
const X1: Var = Var(1);

/// `exists x (C x and forall y (C y -> y = x))`.
pub fn uniqueness_axiom(c: &str) -> Formula {
    Formula::exists(
        X0,
        Formula::and(
            Formula::rel(c, &[X0]),
            Formula::forall(X1, Formula::imp(Formula::rel(c, &[X1]), Formula::eq(Term::Var(X1), Term::Var(X0)))),
        ),
    )
}

/// `phi(c)` for `exists x phi` read relationally.
pub fn instance(sentence: &Formula, c: &str) -> Option<Formula> {
    match sentence {
        Formula::Quant { q: Quant::Exists, var, bound: None, body } => {
            let x = crate::subst::fresh_var([sentence]);
            let b = substitute(body, *var, &Term::Var(x));
            Some(Formula::exists(x, Formula::and(Formula::rel(c, &[x]), b)))
        }
        _ => None,
    }
}

/// `exists x phi -> phi(c)`.
pub fn henkin_axiom(sentence: &Formula, c: &str) -> Option<Formula> {
    Some(Formula::imp(sentence.clone(), instance(sentence, c)?))
}

/// `R(c1, ..., ck)` read relationally; `c = d` for identity.
pub fn fact(rel: &str, constants: &[&str]) -> Formula {
    let vars: Vec<Var> = (0..constants.len() as u32).map(Var).collect();
    let mut body = Formula::rel(rel, &vars);
    for (v, c) in vars.iter().zip(constants).rev() {
        body = Formula::and(Formula::rel(c, &[*v]), body);
    }
    for v in vars.iter().rev() {
        body = Formula::exists(*v, body);
    }
    body
}

/// `forall x (C0 x or ... or Cn x)`; every element is named.
pub fn closure_sentence(constants: &[String]) -> Formula {
    let body = Formula::disj(constants.iter().map(|c| Formula::rel(c, &[X0])).collect()).unwrap_or(Formula::Bot);
    Formula::forall(X0, body)
}

/// `exists x (not C0 x and ... and not Cn x)`, the existential form of the
/// negated closure.
pub fn unnamed_sentence(constants: &[String]) -> Formula {
    let body = Formula::conj(constants.iter().map(|c| Formula::not(Formula::rel(c, &[X0]))).collect())
        .unwrap_or_else(|| Formula::top_like(X0));
    Formula::exists(X0, body)
}

fn witness_prefix(sig: &Signature) -> String {
    let mut p = "C".to_string();
    while sig.relations().any(|(r, _)| r.starts_with(&p)) {
        p.push('C');
    }
    p
}

fn extend_signature(sig: &Signature, names: &[String]) -> Signature {
    let rels = sig.relations().map(|(r, n)| (r.to_string(), n)).chain(names.iter().map(|c| (c.clone(), 1)));
    Signature::relational(&sig.name, rels).expect("witness names are fresh")
}

/// `V` plus one witness per existential sentence of code `<= b`, with the
/// uniqueness and Henkin axioms.
pub fn add_witnesses(v: &TheorySpec, b: &BigUint) -> Result<(TheorySpec, Vec<Witness>), HenkinError> {
    let universe = sentence_universe(&v.signature, b)?;
    let prefix = witness_prefix(&v.signature);
    let mut witnesses = Vec::new();
    for s in universe.into_iter().filter(is_existential) {
        witnesses.push(Witness { name: format!("{prefix}{}", witnesses.len()), sentence: s });
    }
    let names: Vec<String> = witnesses.iter().map(|w| w.name.clone()).collect();
    let sig = extend_signature(&v.signature, &names);
    let mut axioms = v.axiom_list();
    for w in &witnesses {
        axioms.push(uniqueness_axiom(&w.name));
        axioms.push(henkin_axiom(&w.sentence, &w.name).expect("existential"));
    }
    let origin = Origin::Henkin { source: v.name.clone(), bound: b.clone() };
    Ok((TheorySpec::with_origin(&format!("{}+witnesses", v.name), sig, axioms, origin)?, witnesses))
}

fn is_existential(f: &Formula) -> bool {
    matches!(f, Formula::Quant { q: Quant::Exists, bound: None, .. })
}

/// Answer of a consistency oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleAnswer {
    Model(Structure),
    NoModel,
    Inconclusive,
}

/// Decides (soundly for positive answers) whether a finite sentence set
/// over a relational signature has a model. `constants` lists the witness
/// relations, each interpreted as a singleton.
pub trait ConsistencyOracle {
    fn describe(&self) -> String;
    fn query(&mut self, sig: &Signature, constants: &[String], sentences: &[Formula]) -> OracleAnswer;
}

/// Finite model search up to `max_domain` elements; `NoModel` only means
/// none within the bound. `max_queries` turns later queries inconclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModelOracle {
    pub max_domain: u32,
    pub max_queries: Option<usize>,
    pub queries: usize,
}

impl FiniteModelOracle {
    pub fn new(max_domain: u32) -> FiniteModelOracle {
        FiniteModelOracle { max_domain, max_queries: None, queries: 0 }
    }
}

impl ConsistencyOracle for FiniteModelOracle {
    fn describe(&self) -> String {
        match self.max_queries {
            Some(q) => format!("finite-model(max-domain={}, max-queries={q})", self.max_domain),
            None => format!("finite-model(max-domain={})", self.max_domain),
        }
    }

    fn query(&mut self, sig: &Signature, constants: &[String], sentences: &[Formula]) -> OracleAnswer {
        if self.max_queries.is_some_and(|q| self.queries >= q) {
            return OracleAnswer::Inconclusive;
        }
        self.queries += 1;
        let index: BTreeMap<&str, usize> = constants.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let base_sig = Signature::relational(
            &sig.name,
            sig.relations().filter(|(r, _)| !index.contains_key(r)).map(|(r, n)| (r.to_string(), n)),
        )
        .expect("subsignature");
        // sentences grouped by the largest constant they mention
        let mut plain = Vec::new();
        let mut by_last: Vec<Vec<&Formula>> = vec![vec![]; constants.len()];
        for f in sentences {
            let mut rels = BTreeMap::new();
            f.relations(&mut rels);
            match rels.keys().filter_map(|r| index.get(r.as_str())).max() {
                Some(&k) => by_last[k].push(f),
                None => plain.push(f.clone()),
            }
        }
        for n in 1..=self.max_domain {
            let mut found = None;
            for_each_model(&base_sig, &plain, n, &mut |m| {
                let mut ext = expand(m, sig);
                if place_constants(&mut ext, constants, &by_last, 0).unwrap_or(false) {
                    found = Some(ext);
                    return true;
                }
                false
            });
            if let Some(m) = found {
                return OracleAnswer::Model(m);
            }
        }
        OracleAnswer::NoModel
    }
}

fn place_constants(
    m: &mut Structure,
    constants: &[String],
    by_last: &[Vec<&Formula>],
    k: usize,
) -> Result<bool, ModelError> {
    if k == constants.len() {
        return Ok(true);
    }
    for e in m.domain() {
        m.set(&constants[k], vec![e], true);
        let mut ok = true;
        for f in &by_last[k] {
            if !eval_sentence(m, f)? {
                ok = false;
                break;
            }
        }
        if ok && place_constants(m, constants, by_last, k + 1)? {
            return Ok(true);
        }
        m.set(&constants[k], vec![e], false);
    }
    Ok(false)
}

/// `m` over a larger signature; new relations start empty.
fn expand(m: &Structure, sig: &Signature) -> Structure {
    let mut out = Structure::new(sig.clone(), m.size());
    for (r, _) in m.signature.proper_relations() {
        if let Some(t) = m.table(r) {
            for tuple in t {
                out.set(r, tuple.clone(), true);
            }
        }
    }
    out
}

/// Stage of the completion a transcript entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Base,
    Witness,
    Universe,
    Closure,
    Diagram,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TranscriptEntry {
    pub phase: Phase,
    pub sentence: String,
    /// `current-model`, `found(n)`, `none-found`, `inconclusive` or `implied`.
    pub answer: String,
    /// `accepted`, `negated` or `added`.
    pub decision: String,
}

/// The accepted set `W`, the witnesses and the oracle transcript.
#[derive(Clone, Debug, PartialEq)]
pub struct HenkinState {
    pub base: TheorySpec,
    pub bound: BigUint,
    pub oracle: String,
    pub witnesses: Vec<Witness>,
    /// In order of acceptance.
    pub w: Vec<Formula>,
    pub transcript: Vec<TranscriptEntry>,
    pub truncated: Option<String>,
    codes: BTreeSet<BigUint>,
}

impl HenkinState {
    pub fn contains(&self, f: &Formula) -> bool {
        self.codes.contains(&code_syntax(f))
    }

    pub fn constants(&self) -> Vec<String> {
        self.witnesses.iter().map(|w| w.name.clone()).collect()
    }

    /// The base signature plus the witness relations.
    pub fn signature(&self) -> Signature {
        extend_signature(&self.base.signature, &self.constants())
    }

    /// Every base sentence of code `<= bound` is in `W` or has its
    /// negation there.
    pub fn decides_universe(&self) -> Result<bool, HenkinError> {
        for s in sentence_universe(&self.base.signature, &self.bound)? {
            if !self.contains(&s) && !self.contains(&Formula::not(s)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn push(&mut self, f: Formula) {
        if self.codes.insert(code_syntax(&f)) {
            self.w.push(f);
        }
    }

    pub fn to_json(&self) -> String {
        let file = StateFile {
            base: self.base.to_sexp_string(),
            bound: self.bound.to_string(),
            oracle: self.oracle.clone(),
            witnesses: self.witnesses.iter().map(|w| (w.name.clone(), w.sentence.to_string())).collect(),
            w: self.w.iter().map(|f| code_syntax(f).to_string()).collect(),
            transcript: self.transcript.clone(),
            truncated: self.truncated.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }

    pub fn from_json(src: &str) -> Result<HenkinState, HenkinError> {
        let bad = |m: String| HenkinError::State(m);
        let file: StateFile = serde_json::from_str(src).map_err(|e| bad(e.to_string()))?;
        let base = TheorySpec::parse(&file.base)?;
        let bound = file.bound.parse::<BigUint>().map_err(|e| bad(e.to_string()))?;
        let mut witnesses = Vec::new();
        for (name, s) in file.witnesses {
            witnesses.push(Witness { name, sentence: parse_formula(&s).map_err(|e| bad(e.to_string()))? });
        }
        let mut state = HenkinState {
            base,
            bound,
            oracle: file.oracle,
            witnesses,
            w: vec![],
            transcript: file.transcript,
            truncated: file.truncated,
            codes: BTreeSet::new(),
        };
        let sig = state.signature();
        for c in file.w {
            let code = c.parse::<BigUint>().map_err(|e| bad(e.to_string()))?;
            let f = parse_formula(&decode(&code, &Alphabet::syntax())).map_err(|e| bad(e.to_string()))?;
            sig.check_formula(&f).map_err(|e| bad(e.to_string()))?;
            state.push(f);
        }
        Ok(state)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct StateFile {
    base: String,
    bound: String,
    oracle: String,
    witnesses: Vec<(String, String)>,
    w: Vec<String>,
    transcript: Vec<TranscriptEntry>,
    truncated: Option<String>,
}

struct Completion<'o> {
    state: HenkinState,
    oracle: &'o mut dyn ConsistencyOracle,
    /// A model of everything in `W`.
    model: Structure,
}

impl Completion<'_> {
    fn note(&mut self, phase: Phase, f: &Formula, answer: &str, decision: &str) {
        self.state.transcript.push(TranscriptEntry {
            phase,
            sentence: f.to_string(),
            answer: answer.to_string(),
            decision: decision.to_string(),
        });
    }

    /// Adds a sentence already true in the current model.
    fn add_implied(&mut self, phase: Phase, f: Formula) -> Result<(), HenkinError> {
        debug_assert!(eval_sentence(&self.model, &f)?);
        self.note(phase, &f, "implied", "added");
        self.state.push(f);
        Ok(())
    }

    /// `Some(true)` when `f` joins `W`, `Some(false)` when `not f` does,
    /// `None` when the oracle is inconclusive.
    fn decide(&mut self, phase: Phase, f: Formula) -> Result<Option<bool>, HenkinError> {
        if self.state.contains(&f) {
            return Ok(Some(true));
        }
        if eval_sentence(&self.model, &f)? {
            self.note(phase, &f, "current-model", "accepted");
            self.state.push(f);
            return Ok(Some(true));
        }
        let mut query = self.state.w.clone();
        query.push(f.clone());
        let sig = self.state.signature();
        match self.oracle.query(&sig, &self.state.constants(), &query) {
            OracleAnswer::Model(m) => {
                self.note(phase, &f, &format!("found({})", m.size()), "accepted");
                self.model = m;
                self.state.push(f);
                Ok(Some(true))
            }
            OracleAnswer::NoModel => {
                self.note(phase, &f, "none-found", "negated");
                self.state.push(Formula::not(f));
                Ok(Some(false))
            }
            OracleAnswer::Inconclusive => {
                self.note(phase, &f, "inconclusive", "stopped");
                self.state.truncated = Some(format!("oracle inconclusive on {f}"));
                Ok(None)
            }
        }
    }

    /// A fresh witness for `s`, interpreted in the current model.
    fn witness(&mut self, s: Formula) -> Result<String, HenkinError> {
        let name = format!("{}{}", witness_prefix(&self.state.base.signature), self.state.witnesses.len());
        self.state.witnesses.push(Witness { name: name.clone(), sentence: s.clone() });
        let mut m = expand(&self.model, &self.state.signature());
        let pick = witness_element(&m, &s)?;
        m.set(&name, vec![pick], true);
        self.model = m;
        self.add_implied(Phase::Witness, uniqueness_axiom(&name))?;
        self.add_implied(Phase::Witness, henkin_axiom(&s, &name).expect("existential"))?;
        Ok(name)
    }
}

/// Least element satisfying the body of `s`, or `0`.
fn witness_element(m: &Structure, s: &Formula) -> Result<Elem, ModelError> {
    if let Formula::Quant { var, body, .. } = s {
        for e in m.domain() {
            if eval(m, body, &Assignment::from([(*var, e)]))? {
                return Ok(e);
            }
        }
    }
    Ok(0)
}

/// Completes `V` against `oracle`: witnesses for the existential sentences
/// of code `<= b`, then every sentence of code `<= b` by ascending code,
/// then closure of the domain under the witnesses, then the atomic diagram
/// of the witnesses. Each sentence is accepted when the oracle (or the
/// model from its last answer) satisfies it together with `W`.
pub fn henkin_complete(
    v: &TheorySpec,
    b: &BigUint,
    oracle: &mut dyn ConsistencyOracle,
) -> Result<HenkinState, HenkinError> {
    if v.signature.is_arithmetic() {
        return Err(HenkinError::Arithmetic(v.name.clone()));
    }
    let base_axioms = v.axiom_list();
    let model = match oracle.query(&v.signature, &[], &base_axioms) {
        OracleAnswer::Model(m) => m,
        OracleAnswer::NoModel => return Err(HenkinError::BaseRejected(v.name.clone())),
        OracleAnswer::Inconclusive => return Err(HenkinError::BaseInconclusive(v.name.clone())),
    };
    let state = HenkinState {
        base: v.clone(),
        bound: b.clone(),
        oracle: oracle.describe(),
        witnesses: vec![],
        w: vec![],
        transcript: vec![],
        truncated: None,
        codes: BTreeSet::new(),
    };
    let mut c = Completion { state, oracle, model };
    for a in base_axioms {
        c.note(Phase::Base, &a, &format!("found({})", c.model.size()), "added");
        c.state.push(a);
    }
    let universe = sentence_universe(&v.signature, b)?;
    let mut witness_of = BTreeMap::new();
    for s in universe.iter().filter(|s| is_existential(s)) {
        let name = c.witness(s.clone())?;
        witness_of.insert(code_syntax(s), name);
    }
    for s in universe {
        match c.decide(Phase::Universe, s.clone())? {
            None => return Ok(c.state),
            Some(true) => {
                if let Some(name) = witness_of.get(&code_syntax(&s)) {
                    let inst = instance(&s, name).expect("existential");
                    c.add_implied(Phase::Universe, inst)?;
                }
            }
            Some(false) => {}
        }
    }
    let mut closed = false;
    for _ in 0..MAX_CLOSURE_ROUNDS {
        let names = c.state.constants();
        match c.decide(Phase::Closure, closure_sentence(&names))? {
            None => return Ok(c.state),
            Some(true) => {
                closed = true;
                break;
            }
            Some(false) => {
                let u = unnamed_sentence(&names);
                c.add_implied(Phase::Closure, u.clone())?;
                let name = c.witness(u.clone())?;
                c.add_implied(Phase::Closure, instance(&u, &name).expect("existential"))?;
            }
        }
    }
    if !closed {
        c.state.truncated = Some(format!("domain not closed after {MAX_CLOSURE_ROUNDS} witness rounds"));
        return Ok(c.state);
    }
    let names = c.state.constants();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            if c.decide(Phase::Diagram, fact(EQ, &[&names[i], &names[j]]))?.is_none() {
                return Ok(c.state);
            }
        }
    }
    let rels: Vec<(String, usize)> = v.signature.proper_relations().map(|(r, n)| (r.to_string(), n)).collect();
    for (r, k) in rels {
        for t in index_tuples(names.len(), k) {
            let args: Vec<&str> = t.iter().map(|i| names[*i].as_str()).collect();
            if c.decide(Phase::Diagram, fact(&r, &args))?.is_none() {
                return Ok(c.state);
            }
        }
    }
    Ok(c.state)
}

fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// A term model: witness classes and the structure read off `W`.
#[derive(Clone, Debug, PartialEq)]
pub struct TermModel {
    pub structure: Structure,
    /// Witness names of each element.
    pub classes: Vec<Vec<String>>,
}

/// Domain: witnesses modulo the identities in `W`; relations: the facts in
/// `W`. Every sentence of `W` is checked true in the result.
pub fn term_model(s: &HenkinState) -> Result<TermModel, HenkinError> {
    let names = s.constants();
    let mut class_of: Vec<usize> = (0..names.len()).collect();
    for i in 0..names.len() {
        for j in 0..i {
            if class_of[j] == j && s.contains(&fact(EQ, &[&names[j], &names[i]])) {
                class_of[i] = j;
                break;
            }
        }
    }
    let reps: Vec<usize> = (0..names.len()).filter(|i| class_of[*i] == *i).collect();
    let elem: BTreeMap<usize, Elem> = reps.iter().enumerate().map(|(e, r)| (*r, e as Elem)).collect();
    let sig = s.signature();
    let mut m = Structure::new(sig, reps.len().max(1) as u32);
    let mut classes = vec![vec![]; reps.len()];
    for (i, n) in names.iter().enumerate() {
        let e = elem[&class_of[i]];
        m.set(n, vec![e], true);
        classes[e as usize].push(n.clone());
    }
    for (r, k) in s.base.signature.proper_relations() {
        for t in index_tuples(reps.len(), k) {
            let args: Vec<&str> = t.iter().map(|i| names[reps[*i]].as_str()).collect();
            if s.contains(&fact(r, &args)) {
                m.set(r, t.iter().map(|i| *i as Elem).collect(), true);
            }
        }
    }
    if let Some(reason) = &s.truncated {
        return Err(HenkinError::Truncated { reason: reason.clone(), partial: Some(Box::new(m)) });
    }
    if reps.is_empty() {
        return Err(HenkinError::Truncated { reason: "no witnesses".into(), partial: Some(Box::new(m)) });
    }
    for f in &s.w {
        if !eval_sentence(&m, f)? {
            return Err(HenkinError::Unsound(f.to_string()));
        }
    }
    Ok(TermModel { structure: m, classes })
}

fn element_names(sig: &Signature, n: u32) -> Vec<String> {
    let mut p = "E".to_string();
    while sig.relations().any(|(r, _)| r.starts_with(&p)) {
        p.push('E');
    }
    (0..n).map(|i| format!("{p}{i}")).collect()
}

/// The theory `U_N`: one name `E_i` per element with existence,
/// uniqueness, distinctness and closure axioms.
pub fn diagram_theory(n: &Structure, source: &Signature) -> Result<(TheorySpec, Vec<String>), HenkinError> {
    let names = element_names(source, n.size());
    let sig = Signature::relational(&format!("Diag-{}", source.name), names.iter().map(|e| (e.clone(), 1)))
        .expect("fresh names");
    let mut axioms = Vec::new();
    let (x, y) = (Term::Var(X0), Term::Var(X1));
    for (i, e) in names.iter().enumerate() {
        axioms.push(Formula::exists(X0, Formula::rel(e, &[X0])));
        axioms.push(uniq(e, &x, &y));
        for f in &names[i + 1..] {
            axioms.push(distinct(e, f));
        }
    }
    axioms.push(closure_sentence(&names));
    let th = TheorySpec::with_origin(&format!("U-{}", source.name), sig, axioms, Origin::Diagram)?;
    Ok((th, names))
}

fn uniq(e: &str, x: &Term, y: &Term) -> Formula {
    Formula::forall(
        X0,
        Formula::forall(
            X1,
            Formula::imp(Formula::and(Formula::rel(e, &[X0]), Formula::rel(e, &[X1])), Formula::eq(x.clone(), y.clone())),
        ),
    )
}

fn distinct(e: &str, f: &str) -> Formula {
    Formula::forall(X0, Formula::not(Formula::and(Formula::rel(e, &[X0]), Formula::rel(f, &[X0]))))
}

/// The translation defining each source relation by its table in `n`.
pub fn diagram_translation(n: &Structure, source: &Signature, target: &TheorySpec, names: &[String]) -> Translation {
    let mut map = BTreeMap::new();
    map.insert(EQ.to_string(), Formula::eq(Term::Var(X0), Term::Var(X1)));
    for (r, k) in source.proper_relations() {
        let img = if k == 0 {
            if n.holds(r, &[]) {
                Formula::not(Formula::Bot)
            } else {
                Formula::Bot
            }
        } else {
            let rows: Vec<Formula> = index_tuples(n.size() as usize, k)
                .into_iter()
                .filter(|t| n.holds(r, &t.iter().map(|i| *i as Elem).collect::<Vec<_>>()))
                .map(|t| row(names, &t))
                .collect();
            Formula::disj(rows).unwrap_or(Formula::Bot)
        };
        map.insert(r.to_string(), img);
    }
    Translation::new(
        &format!("table-{}", source.name),
        source.clone(),
        target.signature.clone(),
        Formula::top_like(X0),
        map,
    )
    .expect("tables are a translation")
}

fn row(names: &[String], t: &[usize]) -> Formula {
    Formula::conj(t.iter().enumerate().map(|(i, e)| Formula::rel(&names[*e], &[Var(i as u32)])).collect())
        .expect("arity > 0")
}

/// A certificate that `U_N` interprets `V`: each axiom's translation
/// proved by following its evaluation in `n`.
pub fn interpretation_from_model(n: &Structure, v: &TheorySpec) -> Result<Certificate, HenkinError> {
    for (code, a) in v.axioms() {
        if !eval_sentence(n, a)? {
            return Err(HenkinError::AxiomFalse { code: code.to_string(), axiom: a.to_string() });
        }
    }
    let (target, names) = diagram_theory(n, &v.signature)?;
    let k = diagram_translation(n, &v.signature, &target, &names);
    let tracer = Tracer { n, k: &k, names: &names };
    let mut witnesses = BTreeMap::new();
    for (code, a) in v.axioms() {
        let a = rename_apart(a);
        witnesses.insert(code.clone(), tracer.prove(&a, &BTreeMap::new())?);
    }
    let domain = Proof::exists_i(k.nonempty_axiom(), Term::Var(X0), Proof::refl(Term::Var(X0)));
    Ok(Certificate {
        translation: k,
        source: v.clone(),
        target,
        x: v.max_code().cloned().unwrap_or_default(),
        witnesses,
        domain: Some(domain),
        theorems: vec![],
    })
}

/// Alpha-variant with every quantifier binding a distinct variable not free
/// in the formula.
fn rename_apart(f: &Formula) -> Formula {
    fn go(f: &Formula, next: &mut u32) -> Formula {
        match f {
            Formula::Bot | Formula::Atom(..) => f.clone(),
            Formula::Not(a) => Formula::not(go(a, next)),
            Formula::Bin(c, a, b) => Formula::Bin(*c, Box::new(go(a, next)), Box::new(go(b, next))),
            Formula::Quant { q, var, bound, body } => {
                let v = Var(*next);
                *next += 1;
                let body = substitute(body, *var, &Term::Var(v));
                Formula::Quant { q: *q, var: v, bound: bound.clone(), body: Box::new(go(&body, next)) }
            }
        }
    }
    let mut next = f.max_var().map_or(0, |m| m + 1);
    go(f, &mut next)
}

/// Evaluation-trace proofs in `U_N`. Each variable `v` in scope carries
/// the open assumption `E_a(v)` labelled `at-v`.
struct Tracer<'a> {
    n: &'a Structure,
    k: &'a Translation,
    names: &'a [String],
}

type Env = BTreeMap<Var, Elem>;

fn label(v: Var) -> String {
    format!("at-{}", var_name(v))
}

impl Tracer<'_> {
    fn t(&self, f: &Formula) -> Formula {
        translate_formula(self.k, f).expect("source formula")
    }

    fn named(&self, e: Elem, v: Var) -> Formula {
        Formula::rel(&self.names[e as usize], &[v])
    }

    fn hyp(&self, env: &Env, v: Var) -> Proof {
        Proof::assume(&label(v), self.named(env[&v], v))
    }

    fn truth(&self, f: &Formula, env: &Env) -> Result<bool, ModelError> {
        eval(self.n, f, env)
    }

    fn ax(&self, f: Formula) -> Proof {
        Proof::axiom(f)
    }

    /// `bot` from `E_a(v)` and `E_b(v)` with `a != b`.
    fn clash(&self, a: Elem, pa: Proof, b: Elem, pb: Proof, v: Var) -> Proof {
        let (lo, plo, hi, phi) = if a < b { (a, pa, b, pb) } else { (b, pb, a, pa) };
        let d = self.ax(distinct(&self.names[lo as usize], &self.names[hi as usize]));
        Proof::not_e(Proof::forall_e(d, Term::Var(v)), Proof::and_i(plo, phi))
    }

    /// Proof of `f^k` if `f` holds at `env`, else of `not f^k`.
    fn prove(&self, f: &Formula, env: &Env) -> Result<Proof, HenkinError> {
        let truth = self.truth(f, env)?;
        let tf = self.t(f);
        let refute = |inner: Proof| Proof::not_i("h", tf.clone(), inner);
        let h = || Proof::assume("h", tf.clone());
        Ok(match f {
            Formula::Bot => refute(h()),
            Formula::Atom(r, args) if r == EQ => {
                let (x, y) = (args[0].as_var().expect("var"), args[1].as_var().expect("var"));
                if truth && x == y {
                    Proof::refl(Term::Var(x))
                } else if truth {
                    let u = self.ax(uniq(&self.names[env[&x] as usize], &Term::Var(X0), &Term::Var(X1)));
                    Proof::imp_e(
                        Proof::forall_e_all(u, &[Term::Var(x), Term::Var(y)]),
                        Proof::and_i(self.hyp(env, x), self.hyp(env, y)),
                    )
                } else {
                    let z = crate::subst::fresh_var([&tf]);
                    let moved = Proof::eq_subst(z, self.named(env[&x], z), h(), self.hyp(env, x));
                    refute(self.clash(env[&x], moved, env[&y], self.hyp(env, y), y))
                }
            }
            Formula::Atom(r, args) => {
                let vars: Vec<Var> = args.iter().map(|t| t.as_var().expect("var")).collect();
                let arity = vars.len();
                let rows: Vec<Vec<usize>> = index_tuples(self.n.size() as usize, arity)
                    .into_iter()
                    .filter(|t| self.n.holds(r, &t.iter().map(|i| *i as Elem).collect::<Vec<_>>()))
                    .collect();
                let ds: Vec<Formula> = if arity == 0 { vec![] } else { rows.iter().map(|t| self.row_at(t, &vars)).collect() };
                if arity == 0 {
                    if truth {
                        Proof::not_i("b", Formula::Bot, Proof::assume("b", Formula::Bot))
                    } else {
                        refute(h())
                    }
                } else if truth {
                    let at: Vec<usize> = vars.iter().map(|v| env[v] as usize).collect();
                    let p = rows.iter().position(|t| *t == at).expect("row present");
                    let mut proof = self.row_proof(env, &vars);
                    if p + 1 < ds.len() {
                        proof = Proof::or_il(proof, Formula::disj(ds[p + 1..].to_vec()).expect("nonempty"));
                    }
                    for q in (0..p).rev() {
                        proof = Proof::or_ir(ds[q].clone(), proof);
                    }
                    proof
                } else if ds.is_empty() {
                    refute(h())
                } else {
                    refute(self.no_row(env, &vars, &rows, &ds, h()))
                }
            }
            Formula::Not(a) => {
                let pa = self.prove(a, env)?;
                if truth {
                    pa
                } else {
                    refute(Proof::not_e(h(), pa))
                }
            }
            Formula::Bin(c, a, b) => {
                let ta = self.truth(a, env)?;
                let (pa, pb) = (self.prove(a, env)?, self.prove(b, env)?);
                let (fa, fb) = (self.t(a), self.t(b));
                match (c, truth) {
                    (Conn::And, true) => Proof::and_i(pa, pb),
                    (Conn::And, false) if !ta => refute(Proof::not_e(pa, Proof::and_el(h()))),
                    (Conn::And, false) => refute(Proof::not_e(pb, Proof::and_er(h()))),
                    (Conn::Or, true) if ta => Proof::or_il(pa, fb),
                    (Conn::Or, true) => Proof::or_ir(fa, pb),
                    (Conn::Or, false) => refute(Proof::or_e(
                        "l",
                        h(),
                        Proof::not_e(pa, Proof::assume("l", fa)),
                        Proof::not_e(pb, Proof::assume("l", fb)),
                    )),
                    (Conn::Imp, true) if !ta => {
                        Proof::imp_i("l", fa.clone(), Proof::bot_e(Proof::not_e(pa, Proof::assume("l", fa)), fb))
                    }
                    (Conn::Imp, true) => Proof::imp_i("l", fa, pb),
                    (Conn::Imp, false) => refute(Proof::not_e(pb, Proof::imp_e(h(), pa))),
                }
            }
            Formula::Quant { q, var, body, .. } => {
                let v = *var;
                let at = |e: Elem| {
                    let mut env2 = env.clone();
                    env2.insert(v, e);
                    env2
                };
                let tb = self.t(body);
                let refl = Proof::refl(Term::Var(v));
                match (q, truth) {
                    (Quant::Forall, true) => {
                        let cases = self.cases(v, &tb, |e| self.prove(body, &at(e)))?;
                        Proof::forall_i(v, Proof::imp_i("d", self.k.delta_at(&Term::Var(v)), cases))
                    }
                    (Quant::Forall, false) => {
                        let e = self.first(body, env, v, false)?;
                        let inner = Proof::not_e(
                            self.prove(body, &at(e))?,
                            Proof::imp_e(Proof::forall_e(h(), Term::Var(v)), refl),
                        );
                        refute(self.exists_named(e, v, inner))
                    }
                    (Quant::Exists, true) => {
                        let e = self.first(body, env, v, true)?;
                        let intro = Proof::exists_i(
                            tf.clone(),
                            Term::Var(v),
                            Proof::and_i(refl, self.prove(body, &at(e))?),
                        );
                        self.exists_named(e, v, intro)
                    }
                    (Quant::Exists, false) => {
                        let inst = Formula::and(self.k.delta_at(&Term::Var(v)), tb);
                        let cases = self.cases(v, &Formula::Bot, |e| {
                            Ok(Proof::not_e(self.prove(body, &at(e))?, Proof::and_er(Proof::assume("w", inst.clone()))))
                        })?;
                        refute(Proof::exists_e(v, "w", h(), cases))
                    }
                }
            }
        })
    }

    /// Least element where `body` has truth value `want`.
    fn first(&self, body: &Formula, env: &Env, v: Var, want: bool) -> Result<Elem, HenkinError> {
        for e in self.n.domain() {
            let mut env2 = env.clone();
            env2.insert(v, e);
            if self.truth(body, &env2)? == want {
                return Ok(e);
            }
        }
        unreachable!("the quantifier's value has a witness")
    }

    /// `goal` from `exists x E_e(x)` and a proof of it using `E_e(v)`.
    fn exists_named(&self, e: Elem, v: Var, p: Proof) -> Proof {
        let ex = self.ax(Formula::exists(X0, Formula::rel(&self.names[e as usize], &[X0])));
        Proof::exists_e(v, &label(v), ex, p)
    }

    /// `goal` by cases on the closure axiom at `v`.
    fn cases(
        &self,
        v: Var,
        goal: &Formula,
        mut case: impl FnMut(Elem) -> Result<Proof, HenkinError>,
    ) -> Result<Proof, HenkinError> {
        let n = self.n.size();
        let ds: Vec<Formula> = (0..n).map(|e| self.named(e, v)).collect();
        let closure = Proof::forall_e(self.ax(closure_sentence(self.names)), Term::Var(v));
        let mut proofs = Vec::new();
        for e in 0..n {
            let p = case(e)?;
            debug_assert!(crate::subst::alpha_eq(&p.conclusion, goal) || *goal == Formula::Bot);
            proofs.push(p);
        }
        let l = label(v);
        let mut acc = proofs.pop().expect("nonempty domain");
        for e in (0..n as usize - 1).rev() {
            let major = if e == 0 {
                closure.clone()
            } else {
                Proof::assume(&l, Formula::disj(ds[e..].to_vec()).expect("nonempty"))
            };
            acc = Proof::or_e(&l, major, proofs.pop().expect("case"), acc);
        }
        if n == 1 {
            // closure is the single disjunct `E_0(v)`; name it
            acc = Proof::imp_e(Proof::imp_i(&l, ds[0].clone(), acc), closure);
        }
        Ok(acc)
    }

    fn row_at(&self, t: &[usize], vars: &[Var]) -> Formula {
        Formula::conj(t.iter().zip(vars).map(|(e, v)| self.named(*e as Elem, *v)).collect()).expect("arity > 0")
    }

    fn row_proof(&self, env: &Env, vars: &[Var]) -> Proof {
        let mut ps: Vec<Proof> = vars.iter().map(|v| self.hyp(env, *v)).collect();
        let mut acc = ps.pop().expect("arity > 0");
        while let Some(p) = ps.pop() {
            acc = Proof::and_i(p, acc);
        }
        acc
    }

    /// `bot` from the disjunction of `rows`, none of which is the row at `env`.
    fn no_row(&self, env: &Env, vars: &[Var], rows: &[Vec<usize>], ds: &[Formula], major: Proof) -> Proof {
        let mut refutations: Vec<Proof> = rows
            .iter()
            .zip(ds)
            .map(|(t, d)| {
                let i = t.iter().zip(vars).position(|(e, v)| *e as Elem != env[v]).expect("row differs");
                let mut p = Proof::assume("r", d.clone());
                for _ in 0..i {
                    p = Proof::and_er(p);
                }
                if i + 1 < vars.len() {
                    p = Proof::and_el(p);
                }
                self.clash(t[i] as Elem, p, env[&vars[i]], self.hyp(env, vars[i]), vars[i])
            })
            .collect();
        if refutations.len() == 1 {
            return Proof::imp_e(Proof::imp_i("r", ds[0].clone(), refutations.pop().expect("one")), major);
        }
        let mut acc = refutations.pop().expect("nonempty");
        for i in (0..ds.len() - 1).rev() {
            let m = if i == 0 {
                major.clone()
            } else {
                Proof::assume("r", Formula::disj(ds[i..].to_vec()).expect("nonempty"))
            };
            acc = Proof::or_e("r", m, refutations.pop().expect("row"), acc);
        }
        acc
    }
}

/// `henkin_complete`, `term_model` and `interpretation_from_model` in a row.
pub fn henkin_pipeline(
    v: &TheorySpec,
    b: &BigUint,
    oracle: &mut dyn ConsistencyOracle,
) -> Result<(HenkinState, TermModel, Certificate), HenkinError> {
    let state = henkin_complete(v, b, oracle)?;
    let tm = term_model(&state)?;
    let reduct = restrict(&tm.structure, &v.signature);
    let cert = interpretation_from_model(&reduct, v)?;
    Ok((state, tm, cert))
}

/// `m` restricted to the relations of `sig`.
pub fn restrict(m: &Structure, sig: &Signature) -> Structure {
    let mut out = Structure::new(sig.clone(), m.size());
    for (r, _) in sig.proper_relations() {
        if let Some(t) = m.table(r) {
            for tuple in t {
                out.set(r, tuple.clone(), true);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{verify_certificate, Notion};
    use crate::proof::check_closed;

    fn th(s: &str) -> TheorySpec {
        TheorySpec::parse(s).unwrap()
    }

    #[test]
    fn universe_is_sorted_and_exact() {
        let sig = Signature::relational("S", [("P", 1)]).unwrap();
        let b = bound_for_length(16);
        let u = sentence_universe(&sig, &b).unwrap();
        assert!(u.windows(2).all(|w| code_syntax(&w[0]) < code_syntax(&w[1])));
        assert!(u.iter().all(|f| f.is_sentence() && f.to_string().len() <= 16));
        assert!(u.contains(&parse_formula("(exists x (P x))").unwrap()));
        assert!(u.contains(&parse_formula("(not bot)").unwrap()));
        // strings of length <= 16 that parse as canonical sentences
        let expect = ["bot", "(not bot)", "(or bot bot)", "(-> bot bot)", "(and bot bot)", "(not (not bot))"];
        for e in expect {
            assert!(u.contains(&parse_formula(e).unwrap()), "{e}");
        }
        assert_eq!(u.len(), u.iter().map(code_syntax).collect::<BTreeSet<_>>().len());
    }

    #[test]
    fn add_witnesses_below_every_existential_is_the_identity() {
        let v = th("(theory V (signature (P 1)) (axiom (exists x (P x))))");
        let (ext, ws) = add_witnesses(&v, &bound_for_length(13)).unwrap();
        assert!(ws.is_empty());
        assert_eq!(ext.axiom_list(), v.axiom_list());
    }

    #[test]
    fn one_existential_one_witness() {
        let sig = Signature::relational("S", [("P", 1)]).unwrap();
        let target = code_syntax(&parse_formula("(exists x (P x))").unwrap());
        let existentials: Vec<_> =
            sentence_universe(&sig, &target).unwrap().into_iter().filter(is_existential).collect();
        let v = th("(theory V (signature (P 1)) (axiom (exists x (P x))))");
        let (ext, ws) = add_witnesses(&v, &target).unwrap();
        assert_eq!(ws.len(), existentials.len());
        assert_eq!(ws.last().unwrap().sentence.to_string(), "(exists x (P x))");
        let names: BTreeSet<_> = ws.iter().map(|w| w.name.clone()).collect();
        assert_eq!(names.len(), ws.len());
        assert_eq!(ext.len(), v.len() + 2 * ws.len());
    }

    #[test]
    fn existential_is_discharged_and_modelled() {
        let v = th("(theory V (signature (P 1)) (axiom (exists x (P x))))");
        let b = code_syntax(&parse_formula("(exists x (P x))").unwrap());
        let s = henkin_complete(&v, &b, &mut FiniteModelOracle::new(3)).unwrap();
        assert!(s.truncated.is_none());
        let w = s.witnesses.iter().find(|w| w.sentence == v.axiom_list()[0]).unwrap();
        assert!(s.contains(&instance(&w.sentence, &w.name).unwrap()));
        assert!(s.decides_universe().unwrap());
        let tm = term_model(&s).unwrap();
        assert_eq!(tm.structure.size(), 1);
        assert!(tm.structure.holds("P", &[0]));
    }

    #[test]
    fn empty_theory_gets_a_one_point_model() {
        let v = th("(theory E (signature (P 1)))");
        let s = henkin_complete(&v, &bound_for_length(12), &mut FiniteModelOracle::new(2)).unwrap();
        let tm = term_model(&s).unwrap();
        assert_eq!(tm.structure.size(), 1);
        let cert = interpretation_from_model(&restrict(&tm.structure, &v.signature), &v).unwrap();
        assert!(cert.witnesses.is_empty());
        assert!(verify_certificate(&cert, Notion::Sa).certified);
    }

    #[test]
    fn inconsistent_base_is_refused() {
        let v = th("(theory B (signature (P 0)) (axiom P) (axiom (not P)))");
        assert_eq!(
            henkin_complete(&v, &bound_for_length(8), &mut FiniteModelOracle::new(3)),
            Err(HenkinError::BaseRejected("B".into()))
        );
    }

    #[test]
    fn identified_witnesses_collapse() {
        let v = th("(theory One (signature (P 1)) (axiom (forall x (forall y (= x y)))) (axiom (exists x (P x))))");
        let s = henkin_complete(&v, &bound_for_length(16), &mut FiniteModelOracle::new(2)).unwrap();
        let tm = term_model(&s).unwrap();
        assert_eq!(tm.structure.size(), 1);
        assert!(tm.classes[0].len() > 1);
    }

    #[test]
    fn closure_adds_witnesses_until_named() {
        let v = th("(theory Two (signature (P 1)) (axiom (exists x (P x))) (axiom (exists x (not (P x)))))");
        let s = henkin_complete(&v, &bound_for_length(16), &mut FiniteModelOracle::new(3)).unwrap();
        let tm = term_model(&s).unwrap();
        assert_eq!(tm.structure.size(), 2);
        for a in v.axiom_list() {
            assert!(eval_sentence(&tm.structure, &a).unwrap());
        }
    }

    #[test]
    fn evaluation_trace_proofs_check() {
        let v = th("(theory Ord (signature (R 2)) \
            (axiom (forall x (not (R x x)))) \
            (axiom (forall x (forall y (forall z (-> (and (R x y) (R y z)) (R x z)))))) \
            (axiom (exists x (exists y (R x y)))) \
            (axiom (forall x (exists y (or (R x y) (R y x))))))");
        let mut n = Structure::new(v.signature.clone(), 3);
        n.set("R", vec![0, 1], true);
        n.set("R", vec![1, 2], true);
        n.set("R", vec![0, 2], true);
        let cert = interpretation_from_model(&n, &v).unwrap();
        for (code, w) in &cert.witnesses {
            let got = check_closed(w, &cert.target).unwrap();
            let want = translate_formula(&cert.translation, &v.axiom_list().into_iter().find(|a| code_syntax(a) == *code).unwrap()).unwrap();
            assert!(crate::subst::alpha_eq(&got, &want));
        }
        let r = verify_certificate(&cert, Notion::Sa);
        assert!(r.certified, "{r:?}");
        let mut bad = n.clone();
        bad.set("R", vec![1, 1], true);
        assert!(matches!(interpretation_from_model(&bad, &v), Err(HenkinError::AxiomFalse { .. })));
    }

    #[test]
    fn state_json_round_trip_and_determinism() {
        let v = th("(theory V (signature (P 1) (Q 0)) (axiom (exists x (P x))) (axiom (-> Q (forall x (P x)))))");
        let b = bound_for_length(16);
        let s1 = henkin_complete(&v, &b, &mut FiniteModelOracle::new(3)).unwrap();
        let s2 = henkin_complete(&v, &b, &mut FiniteModelOracle::new(3)).unwrap();
        assert_eq!(s1.to_json(), s2.to_json());
        let back = HenkinState::from_json(&s1.to_json()).unwrap();
        assert_eq!(back, s1);
    }

    #[test]
    fn query_budget_truncates() {
        let v = th("(theory Two (signature (P 1)) (axiom (exists x (P x))) (axiom (exists x (not (P x)))))");
        let mut o = FiniteModelOracle { max_domain: 3, max_queries: Some(1), queries: 0 };
        let s = henkin_complete(&v, &bound_for_length(16), &mut o).unwrap();
        assert!(s.truncated.is_some());
        assert!(matches!(term_model(&s), Err(HenkinError::Truncated { partial: Some(_), .. })));
    }
}
