//! Theories: a signature and an axiom set, recognized and enumerated by code.

use crate::coding::code_syntax;
use crate::sexp::{self, ParseError, SExp};
use crate::syntax::{Formula, Signature, SignatureError};
use num_bigint::BigUint;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("axiom is not a sentence: {0}")]
    OpenAxiom(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Where an axiom set came from. Recorded so derived theories stay explicit
/// about how they were built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Listed,
    /// Translations of a source theory's axioms plus nonemptiness of the domain.
    Translated { source: String },
    /// Axioms of `source` that survive a bounded refutation search.
    Feferman { source: String, max_nodes: usize },
    /// Witness extension at a code bound.
    Henkin { source: String, bound: BigUint },
    Union(Vec<String>),
    /// Atomic diagram of a finite structure.
    Diagram,
}

/// A theory with a finite axiom list stored by ascending code. The
/// recognizer and the enumerator read the same table, so they agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheorySpec {
    pub name: String,
    pub signature: Signature,
    axioms: BTreeMap<BigUint, Formula>,
    pub origin: Origin,
}

impl TheorySpec {
    pub fn finite(name: &str, signature: Signature, axioms: Vec<Formula>) -> Result<TheorySpec, TheoryError> {
        TheorySpec::with_origin(name, signature, axioms, Origin::Listed)
    }

    pub fn with_origin(
        name: &str,
        signature: Signature,
        axioms: Vec<Formula>,
        origin: Origin,
    ) -> Result<TheorySpec, TheoryError> {
        let mut table = BTreeMap::new();
        for a in axioms {
            if !a.is_sentence() {
                return Err(TheoryError::OpenAxiom(a.to_string()));
            }
            signature.check_formula(&a)?;
            table.insert(code_syntax(&a), a);
        }
        Ok(TheorySpec { name: name.to_string(), signature, axioms: table, origin })
    }

    pub fn recognizes(&self, f: &Formula) -> bool {
        self.axioms.get(&code_syntax(f)).is_some_and(|a| a == f)
    }

    pub fn axiom_at(&self, code: &BigUint) -> Option<&Formula> {
        self.axioms.get(code)
    }

    pub fn recognizes_code(&self, code: &BigUint) -> bool {
        self.axioms.contains_key(code)
    }

    /// All axioms by ascending code.
    pub fn axioms(&self) -> impl Iterator<Item = (&BigUint, &Formula)> {
        self.axioms.iter()
    }

    /// Axioms of code `<= bound`, ascending.
    pub fn axioms_upto<'a>(&'a self, bound: &BigUint) -> impl Iterator<Item = (&'a BigUint, &'a Formula)> {
        self.axioms.range(..=bound.clone())
    }

    pub fn axiom_list(&self) -> Vec<Formula> {
        self.axioms.values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn max_code(&self) -> Option<&BigUint> {
        self.axioms.keys().next_back()
    }

    /// Same signature, additional axioms.
    pub fn extend(&self, name: &str, more: Vec<Formula>) -> Result<TheorySpec, TheoryError> {
        let mut all = self.axiom_list();
        all.extend(more);
        TheorySpec::with_origin(name, self.signature.clone(), all, Origin::Union(vec![self.name.clone()]))
    }

    pub fn union(&self, other: &TheorySpec, name: &str) -> Result<TheorySpec, TheoryError> {
        let sig = self.signature.union(&other.signature, name)?;
        let mut all = self.axiom_list();
        all.extend(other.axiom_list());
        TheorySpec::with_origin(name, sig, all, Origin::Union(vec![self.name.clone(), other.name.clone()]))
    }

    /// Theory file:
    /// `(theory NAME (signature (P 1) ...) (axiom A) ...)`; use `arithmetic`
    /// instead of `signature` for the arithmetic signature.
    pub fn from_sexp(e: &SExp) -> Result<TheorySpec, TheoryError> {
        let xs = e.as_list().filter(|xs| xs.len() >= 3 && xs[0].as_atom() == Some("theory")).ok_or_else(|| {
            ParseError::new(e.pos(), "expected (theory NAME (signature ...) (axiom ...) ...)")
        })?;
        let name = xs[1].as_atom().ok_or_else(|| ParseError::new(xs[1].pos(), "expected a theory name"))?;
        let sig = signature_from_sexp(&xs[2], name)?;
        let mut axioms = Vec::new();
        for a in &xs[3..] {
            let ys = a
                .as_list()
                .filter(|ys| ys.len() == 2 && ys[0].as_atom() == Some("axiom"))
                .ok_or_else(|| ParseError::new(a.pos(), "expected (axiom FORMULA)"))?;
            axioms.push(sexp::formula_from_sexp(&ys[1], Some(&sig))?);
        }
        TheorySpec::finite(name, sig, axioms)
    }

    pub fn parse(src: &str) -> Result<TheorySpec, TheoryError> {
        TheorySpec::from_sexp(&sexp::read_one(src)?)
    }

    pub fn to_sexp_string(&self) -> String {
        let mut s = format!("(theory {}\n  {}", self.name, signature_to_string(&self.signature));
        for a in self.axioms.values() {
            s.push_str(&format!("\n  (axiom {a})"));
        }
        s.push_str(")\n");
        s
    }
}

pub fn signature_from_sexp(e: &SExp, name: &str) -> Result<Signature, TheoryError> {
    let xs = e.as_list().ok_or_else(|| ParseError::new(e.pos(), "expected a signature"))?;
    let kind = xs.first().and_then(SExp::as_atom);
    let mut rels = Vec::new();
    for r in xs.iter().skip(1) {
        let pair = r
            .as_list()
            .filter(|p| p.len() == 2)
            .and_then(|p| Some((p[0].as_atom()?.to_string(), p[1].as_atom()?.parse::<usize>().ok()?)))
            .ok_or_else(|| ParseError::new(r.pos(), "expected (SYMBOL ARITY)"))?;
        rels.push(pair);
    }
    match kind {
        Some("signature") => Ok(Signature::relational(name, rels)?),
        Some("arithmetic") => Ok(Signature::arithmetic(name, rels)?),
        _ => Err(ParseError::new(e.pos(), "expected (signature ...) or (arithmetic ...)").into()),
    }
}

pub fn signature_to_string(sig: &Signature) -> String {
    let head = if sig.is_arithmetic() { "arithmetic" } else { "signature" };
    let skip = |r: &str| r == crate::syntax::EQ || sig.is_arithmetic() && (r == crate::syntax::LT || r == crate::syntax::LE);
    let rels: Vec<String> =
        sig.relations().filter(|(r, _)| !skip(r)).map(|(r, n)| format!("({r} {n})")).collect();
    if rels.is_empty() {
        format!("({head})")
    } else {
        format!("({head} {})", rels.join(" "))
    }
}
