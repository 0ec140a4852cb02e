//! Finite structures as semantic oracles.
//!
//! Elements are `0..size`. Over the arithmetic signature the first
//! `numbers` elements are the naturals `0..numbers`; the function symbols
//! are partial there. An atom containing an undefined term is false, so a
//! bounded quantifier with an undefined bound is vacuous, exactly as its
//! definitional unfolding would be.
//!
//! Identity, `<` and `<=` are native unless a table for them is given.

use crate::interp::{translate_formula, Translation};
use crate::syntax::{Formula, Func, Quant, Signature, Term, Var, EQ, LE, LT};
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub type Elem = u32;
pub type Assignment = BTreeMap<Var, Elem>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("variable {0} has no value")]
    Unassigned(String),
    #[error("element {0} is outside the domain")]
    OutOfDomain(Elem),
    #[error("symbol mismatch: {0}")]
    Symbol(String),
    #[error("structure file: {0}")]
    File(String),
    #[error("=^j is not an equivalence on the domain: {0}")]
    NotEquivalence(String),
    #[error("the domain formula is satisfied by no element")]
    EmptyDomain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub signature: Signature,
    size: u32,
    numbers: u32,
    tables: BTreeMap<String, BTreeSet<Vec<Elem>>>,
}

fn is_native(sig: &Signature, rel: &str) -> bool {
    rel == EQ || sig.is_arithmetic() && (rel == LT || rel == LE)
}

impl Structure {
    /// Empty tables for every non-native relation.
    pub fn new(signature: Signature, size: u32) -> Structure {
        let numbers = if signature.is_arithmetic() { size } else { 0 };
        Structure::with_numbers(signature, size, numbers)
    }

    /// `numbers <= size` leading elements are naturals.
    pub fn with_numbers(signature: Signature, size: u32, numbers: u32) -> Structure {
        assert!(numbers <= size);
        let tables = signature
            .relations()
            .filter(|(r, _)| !is_native(&signature, r))
            .map(|(r, _)| (r.to_string(), BTreeSet::new()))
            .collect();
        let numbers = if signature.is_arithmetic() { numbers } else { 0 };
        Structure { signature, size, numbers, tables }
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn numbers(&self) -> u32 {
        self.numbers
    }

    pub fn domain(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    /// Replaces a native relation by an explicit table.
    pub fn override_native(&mut self, rel: &str) {
        self.tables.entry(rel.to_string()).or_default();
    }

    pub fn set(&mut self, rel: &str, tuple: Vec<Elem>, value: bool) {
        assert_eq!(self.signature.arity(rel), Some(tuple.len()), "arity of {rel}");
        assert!(tuple.iter().all(|e| *e < self.size), "element outside the domain");
        let t = self.tables.get_mut(rel).unwrap_or_else(|| panic!("`{rel}` is native; override it first"));
        if value {
            t.insert(tuple);
        } else {
            t.remove(&tuple);
        }
    }

    pub fn table(&self, rel: &str) -> Option<&BTreeSet<Vec<Elem>>> {
        self.tables.get(rel)
    }

    pub fn holds(&self, rel: &str, args: &[Elem]) -> bool {
        if let Some(t) = self.tables.get(rel) {
            return t.contains(args);
        }
        match rel {
            EQ => args[0] == args[1],
            LT => args[0] < self.numbers && args[1] < self.numbers && args[0] < args[1],
            LE => args[0] < self.numbers && args[1] < self.numbers && args[0] <= args[1],
            _ => false,
        }
    }

    /// Identity is an equivalence respected by every table.
    pub fn is_normal(&self) -> bool {
        let Some(eq) = self.tables.get(EQ) else { return true };
        let n = self.size;
        let e = |a: Elem, b: Elem| eq.contains(&vec![a, b]);
        for a in 0..n {
            if !e(a, a) {
                return false;
            }
            for b in 0..n {
                if e(a, b) != e(b, a) {
                    return false;
                }
                for c in 0..n {
                    if e(a, b) && e(b, c) && !e(a, c) {
                        return false;
                    }
                }
            }
        }
        for (r, t) in &self.tables {
            for tuple in t {
                for (i, x) in tuple.iter().enumerate() {
                    for y in 0..n {
                        if e(*x, y) {
                            let mut u = tuple.clone();
                            u[i] = y;
                            if !self.holds(r, &u) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Value of a function symbol on naturals; `None` when undefined.
    pub fn apply(&self, f: Func, args: &[Elem]) -> Option<Elem> {
        let k = self.numbers as u64;
        if args.iter().any(|a| (*a as u64) >= k) {
            return None;
        }
        let a = |i: usize| args[i] as u64;
        let v: u64 = match f {
            Func::Zero => 0,
            Func::Succ => a(0) + 1,
            Func::Add => a(0) + a(1),
            Func::Mul => a(0) * a(1),
            Func::Smash => {
                let e = (64 - a(0).leading_zeros() as u64) * (64 - a(1).leading_zeros() as u64);
                if e >= 32 {
                    return None;
                }
                1u64 << e
            }
            Func::Len => 64 - a(0).leading_zeros() as u64,
            Func::Half => a(0) / 2,
        };
        (v < k).then_some(v as Elem)
    }

    fn check_formula(&self, f: &Formula) -> Result<(), ModelError> {
        self.signature.check_formula(f).map_err(|e| ModelError::Symbol(e.to_string()))
    }

    /// JSON: `{"signature": ..., "domain": [0, 1, ...], "numbers": k,
    /// "relations": {"P": [[0], ...], ...}}`.
    pub fn to_json(&self) -> String {
        let file = StructureFile {
            signature: self.signature.clone(),
            domain: self.domain().collect(),
            numbers: self.signature.is_arithmetic().then_some(self.numbers),
            relations: self.tables.iter().map(|(r, t)| (r.clone(), t.iter().cloned().collect())).collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }

    pub fn from_json(src: &str) -> Result<Structure, ModelError> {
        let file: StructureFile = serde_json::from_str(src).map_err(|e| ModelError::File(e.to_string()))?;
        let size = file.domain.len() as u32;
        if file.domain.iter().enumerate().any(|(i, e)| *e != i as Elem) {
            return Err(ModelError::File("domain must list 0, 1, ..., n-1 in order".into()));
        }
        if size == 0 {
            return Err(ModelError::File("domain is empty".into()));
        }
        let numbers = file.numbers.unwrap_or(if file.signature.is_arithmetic() { size } else { 0 });
        if numbers > size {
            return Err(ModelError::File("more numbers than elements".into()));
        }
        let mut m = Structure::with_numbers(file.signature, size, numbers);
        for (r, tuples) in file.relations {
            let arity = m.signature.arity(&r).ok_or_else(|| ModelError::File(format!("unknown relation `{r}`")))?;
            m.override_native(&r);
            for t in tuples {
                if t.len() != arity {
                    return Err(ModelError::File(format!("tuple of `{r}` has {} entries, arity is {arity}", t.len())));
                }
                if let Some(e) = t.iter().find(|e| **e >= size) {
                    return Err(ModelError::OutOfDomain(*e));
                }
                m.set(&r, t, true);
            }
        }
        Ok(m)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct StructureFile {
    signature: Signature,
    domain: Vec<Elem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    numbers: Option<u32>,
    relations: BTreeMap<String, Vec<Vec<Elem>>>,
}

struct Ev<'a> {
    m: &'a Structure,
    env: Vec<Elem>,
}

impl Ev<'_> {
    fn term(&self, t: &Term) -> Option<Elem> {
        match t {
            Term::Var(v) => Some(self.env[v.0 as usize]),
            Term::App(f, args) => {
                let mut vals = [0; 2];
                for (i, a) in args.iter().enumerate() {
                    vals[i] = self.term(a)?;
                }
                self.m.apply(*f, &vals[..args.len()])
            }
        }
    }

    fn atom(&self, r: &str, args: &[Term]) -> bool {
        let mut vals = Vec::with_capacity(args.len());
        for a in args {
            match self.term(a) {
                Some(v) => vals.push(v),
                None => return false,
            }
        }
        self.m.holds(r, &vals)
    }

    /// A superset of the values of `x` satisfying `g`, when cheaply known.
    fn candidates(&self, x: Var, g: &Formula) -> Option<Vec<Elem>> {
        match g {
            Formula::Bin(crate::syntax::Conn::And, a, b) => match (self.candidates(x, a), self.candidates(x, b)) {
                (Some(p), Some(q)) => Some(if q.len() < p.len() { q } else { p }),
                (p, q) => p.or(q),
            },
            Formula::Atom(r, args) => {
                let table = self.m.tables.get(r.as_str());
                if table.is_none() && (r == EQ || r == LT || r == LE) {
                    let other = match (&args[0], &args[1]) {
                        (Term::Var(v), Term::Var(w)) if *v == x && *w == x => {
                            return Some(if r == LT { vec![] } else if r == EQ { self.m.domain().collect() } else {
                                (0..self.m.numbers).collect()
                            });
                        }
                        (Term::Var(v), t) if *v == x && !t.contains_var(x) => t,
                        (t, Term::Var(v)) if *v == x && !t.contains_var(x) && r == EQ => t,
                        _ => return None,
                    };
                    let Some(v) = self.term(other) else { return Some(vec![]) };
                    return Some(match r.as_str() {
                        EQ => vec![v],
                        LT => (0..v.min(self.m.numbers)).collect(),
                        _ => (0..(v + 1).min(self.m.numbers)).collect(),
                    });
                }
                let table = table?;
                let xs: Vec<usize> = (0..args.len()).filter(|i| args[*i] == Term::Var(x)).collect();
                if xs.is_empty() {
                    return None;
                }
                let mut fixed = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    if !a.contains_var(x) {
                        match self.term(a) {
                            Some(v) => fixed.push((i, v)),
                            None => return Some(vec![]),
                        }
                    }
                }
                // fixed leading positions narrow the scan to a range of the sorted table
                let prefix: Vec<Elem> =
                    fixed.iter().enumerate().take_while(|(k, (i, _))| k == i).map(|(_, (_, v))| *v).collect();
                let keep = |t: &&Vec<Elem>| fixed.iter().all(|(i, v)| t[*i] == *v) && xs.iter().all(|i| t[*i] == t[xs[0]]);
                let mut out: Vec<Elem> = if prefix.is_empty() {
                    table.iter().filter(keep).map(|t| t[xs[0]]).collect()
                } else {
                    let mut hi = prefix.clone();
                    *hi.last_mut().expect("nonempty") += 1;
                    table.range(prefix..hi).filter(keep).map(|t| t[xs[0]]).collect()
                };
                out.sort_unstable();
                out.dedup();
                Some(out)
            }
            _ => None,
        }
    }

    fn formula(&mut self, f: &Formula) -> bool {
        use crate::syntax::Conn::*;
        match f {
            Formula::Bot => false,
            Formula::Atom(r, args) => self.atom(r, args),
            Formula::Not(a) => !self.formula(a),
            Formula::Bin(And, a, b) => self.formula(a) && self.formula(b),
            Formula::Bin(Or, a, b) => self.formula(a) || self.formula(b),
            Formula::Bin(Imp, a, b) => !self.formula(a) || self.formula(b),
            Formula::Quant { q, var, bound, body } => {
                let forall = *q == Quant::Forall;
                let range: Vec<Elem> = match bound {
                    Some(b) => match self.term(&b.limit()) {
                        None => return forall,
                        Some(v) => (0..v.min(self.m.numbers)).collect(),
                    },
                    None => {
                        let guard = match (&**body, q) {
                            (Formula::Bin(Imp, g, _), Quant::Forall) | (Formula::Bin(And, g, _), Quant::Exists) => {
                                self.candidates(*var, g)
                            }
                            _ => None,
                        };
                        guard.unwrap_or_else(|| self.m.domain().collect())
                    }
                };
                let i = var.0 as usize;
                let saved = self.env[i];
                let mut result = forall;
                for e in range {
                    self.env[i] = e;
                    if self.formula(body) != forall {
                        result = !forall;
                        break;
                    }
                }
                self.env[i] = saved;
                result
            }
        }
    }
}

fn prepare(m: &Structure, f: &Formula, a: &Assignment) -> Result<Vec<Elem>, ModelError> {
    m.check_formula(f)?;
    for v in f.free_vars() {
        if !a.contains_key(&v) {
            return Err(ModelError::Unassigned(crate::sexp::var_name(v)));
        }
    }
    if let Some(e) = a.values().find(|e| **e >= m.size) {
        return Err(ModelError::OutOfDomain(*e));
    }
    let top = f.max_var().max(a.keys().map(|v| v.0).max()).map_or(0, |v| v as usize + 1);
    let mut env = vec![0; top];
    for (v, e) in a {
        env[v.0 as usize] = *e;
    }
    Ok(env)
}

/// Tarskian truth of `f` in `m` under `a`.
pub fn eval(m: &Structure, f: &Formula, a: &Assignment) -> Result<bool, ModelError> {
    let env = prepare(m, f, a)?;
    Ok(Ev { m, env }.formula(f))
}

pub fn eval_sentence(m: &Structure, f: &Formula) -> Result<bool, ModelError> {
    eval(m, f, &Assignment::new())
}

/// A deliberately plain evaluator: no guards, assignment maps cloned at
/// every binder. Used as an independent oracle for [`eval`].
pub fn naive_eval(m: &Structure, f: &Formula, a: &Assignment) -> Result<bool, ModelError> {
    prepare(m, f, a)?;
    Ok(naive(m, f, a))
}

fn naive_term(m: &Structure, t: &Term, a: &Assignment) -> Option<Elem> {
    match t {
        Term::Var(v) => a.get(v).copied(),
        Term::App(f, args) => {
            let vals: Option<Vec<Elem>> = args.iter().map(|x| naive_term(m, x, a)).collect();
            m.apply(*f, &vals?)
        }
    }
}

fn naive(m: &Structure, f: &Formula, a: &Assignment) -> bool {
    use crate::syntax::Conn::*;
    match f {
        Formula::Bot => false,
        Formula::Atom(r, args) => {
            let vals: Option<Vec<Elem>> = args.iter().map(|t| naive_term(m, t, a)).collect();
            vals.is_some_and(|v| m.holds(r, &v))
        }
        Formula::Not(x) => !naive(m, x, a),
        Formula::Bin(And, x, y) => naive(m, x, a) && naive(m, y, a),
        Formula::Bin(Or, x, y) => naive(m, x, a) || naive(m, y, a),
        Formula::Bin(Imp, x, y) => !naive(m, x, a) || naive(m, y, a),
        Formula::Quant { q, var, bound, body } => {
            let inst = |e: Elem| {
                let mut b = a.clone();
                b.insert(*var, e);
                let in_range = match bound {
                    None => true,
                    Some(bd) => {
                        let lim = naive_term(m, &bd.limit(), a);
                        lim.is_some_and(|l| m.holds(LT, &[e, l]))
                    }
                };
                (in_range, naive(m, body, &b))
            };
            match q {
                Quant::Forall => m.domain().all(|e| {
                    let (r, v) = inst(e);
                    !r || v
                }),
                Quant::Exists => m.domain().any(|e| {
                    let (r, v) = inst(e);
                    r && v
                }),
            }
        }
    }
}

/// `M^j` with the bookkeeping needed to relate it back to `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InternalModel {
    pub structure: Structure,
    /// Each domain-satisfying element of `M` to its class.
    pub class_of: BTreeMap<Elem, Elem>,
    /// Members of each class, ascending.
    pub classes: Vec<Vec<Elem>>,
    /// Relation tuples whose truth depends on the choice of representatives.
    pub violations: Vec<String>,
}

fn one(v: Var, e: Elem) -> Assignment {
    Assignment::from([(v, e)])
}

fn tuples(n: u32, arity: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = (n as usize).pow(arity as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut() {
            *slot = (i % n as usize) as Elem;
            i /= n as usize;
        }
        t
    })
}

/// Domain: elements satisfying `delta`, modulo `=^j`. A relation holds of
/// classes when its image holds of some representatives.
pub fn internal_model(m: &Structure, j: &Translation) -> Result<InternalModel, ModelError> {
    if !m.signature.relations().eq(j.target.relations()) && !j.target.relations().all(|(r, n)| m.signature.arity(r) == Some(n)) {
        return Err(ModelError::Symbol(format!("`{}` does not map into `{}`", j.name, m.signature.name)));
    }
    let dv = j.delta_var();
    let mut dsat = Vec::new();
    for e in m.domain() {
        if eval(m, j.delta(), &one(dv, e))? {
            dsat.push(e);
        }
    }
    if dsat.is_empty() {
        return Err(ModelError::EmptyDomain);
    }
    let eqf = j.image(EQ).expect("identity is mapped");
    let (x, y) = (Var(0), Var(1));
    let mut eqt: HashMap<(Elem, Elem), bool> = HashMap::new();
    for &a in &dsat {
        for &b in &dsat {
            eqt.insert((a, b), eval(m, eqf, &Assignment::from([(x, a), (y, b)]))?);
        }
    }
    let e = |a: Elem, b: Elem| eqt[&(a, b)];
    for &a in &dsat {
        if !e(a, a) {
            return Err(ModelError::NotEquivalence(format!("not reflexive at {a}")));
        }
        for &b in &dsat {
            if e(a, b) != e(b, a) {
                return Err(ModelError::NotEquivalence(format!("not symmetric at ({a}, {b})")));
            }
            for &c in &dsat {
                if e(a, b) && e(b, c) && !e(a, c) {
                    return Err(ModelError::NotEquivalence(format!("not transitive at ({a}, {b}, {c})")));
                }
            }
        }
    }
    let mut classes: Vec<Vec<Elem>> = Vec::new();
    let mut class_of = BTreeMap::new();
    for &a in &dsat {
        match classes.iter().position(|c| e(c[0], a)) {
            Some(i) => {
                classes[i].push(a);
                class_of.insert(a, i as Elem);
            }
            None => {
                class_of.insert(a, classes.len() as Elem);
                classes.push(vec![a]);
            }
        }
    }
    let n = classes.len() as u32;
    let mut out = Structure::new(j.source.clone(), n);
    let mut violations = Vec::new();
    for (r, arity) in j.source.relations() {
        if r == EQ {
            continue;
        }
        let img = j.image(r).expect("total");
        for ct in tuples(n, arity) {
            let mut some = false;
            let mut all = true;
            for reps in tuples(dsat.len() as u32, arity) {
                let elems: Vec<Elem> = reps.iter().map(|i| dsat[*i as usize]).collect();
                if elems.iter().zip(&ct).any(|(el, c)| class_of[el] != *c) {
                    continue;
                }
                let asg: Assignment = elems.iter().enumerate().map(|(i, el)| (Var(i as u32), *el)).collect();
                if eval(m, img, &asg)? {
                    some = true;
                } else {
                    all = false;
                }
            }
            if some {
                out.set(r, ct.clone(), true);
                if !all {
                    violations.push(format!("{r}{ct:?} depends on representatives"));
                }
            }
        }
    }
    Ok(InternalModel { structure: out, class_of, classes, violations })
}

/// Orbit-minimal serialization over all permutations of the domain.
/// Factorial cost; meant for domains of at most about 6 elements.
pub fn canonical_form(m: &Structure) -> Vec<(String, Vec<Vec<Elem>>)> {
    let n = m.size as usize;
    let mut perm: Vec<Elem> = (0..n as Elem).collect();
    let mut best: Option<Vec<(String, Vec<Vec<Elem>>)>> = None;
    loop {
        let img: Vec<(String, Vec<Vec<Elem>>)> = m
            .tables
            .iter()
            .map(|(r, t)| {
                let mut ts: Vec<Vec<Elem>> = t.iter().map(|tu| tu.iter().map(|e| perm[*e as usize]).collect()).collect();
                ts.sort();
                (r.clone(), ts)
            })
            .collect();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [Elem]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn isomorphic(a: &Structure, b: &Structure) -> bool {
    a.size == b.size
        && a.numbers == 0
        && b.numbers == 0
        && a.signature.relations().eq(b.signature.relations())
        && canonical_form(a) == canonical_form(b)
}

/// Partial relation tables under Kleene's three-valued semantics.
struct Partial<'a> {
    sig: &'a Signature,
    n: u32,
    cells: BTreeMap<String, Vec<Option<bool>>>,
}

impl Partial<'_> {
    fn index(&self, args: &[Elem]) -> usize {
        args.iter().rev().fold(0, |acc, a| acc * self.n as usize + *a as usize)
    }

    fn eval(&self, f: &Formula, env: &mut Vec<Elem>) -> Option<bool> {
        use crate::syntax::Conn::*;
        match f {
            Formula::Bot => Some(false),
            Formula::Atom(r, args) => {
                let vals: Vec<Elem> = args.iter().map(|t| env[t.as_var().expect("relational").0 as usize]).collect();
                if r == EQ && !self.cells.contains_key(EQ) {
                    return Some(vals[0] == vals[1]);
                }
                self.cells[r.as_str()][self.index(&vals)]
            }
            Formula::Not(a) => self.eval(a, env).map(|b| !b),
            Formula::Bin(c, a, b) => {
                let x = self.eval(a, env);
                let (stop, x) = match c {
                    And => (Some(false), x),
                    Or => (Some(true), x),
                    Imp => (Some(true), x.map(|v| !v)),
                };
                if x == stop {
                    return stop;
                }
                let y = self.eval(b, env);
                if y == stop {
                    return stop;
                }
                if x.is_some() && y.is_some() {
                    return stop.map(|s| !s);
                }
                None
            }
            Formula::Quant { q, var, body, .. } => {
                let stop = Some(*q == Quant::Exists);
                let i = var.0 as usize;
                let saved = env[i];
                let mut unknown = false;
                let mut out = None;
                for e in 0..self.n {
                    env[i] = e;
                    match self.eval(body, env) {
                        v if v == stop => {
                            out = stop;
                            break;
                        }
                        None => unknown = true,
                        _ => {}
                    }
                }
                env[i] = saved;
                if out.is_some() {
                    return out;
                }
                if unknown {
                    None
                } else {
                    stop.map(|s| !s)
                }
            }
        }
        .filter(|_| self.sig.relations().count() > 0)
    }
}

/// A model of `axioms` with at most `max_domain` elements, smallest domain
/// first; `None` means none was found within that bound, nothing more.
/// Relational signatures only.
pub fn find_model_for(sig: &Signature, axioms: &[Formula], max_domain: u32) -> Option<Structure> {
    let mut found = None;
    for n in 1..=max_domain {
        for_each_model(sig, axioms, n, &mut |m| {
            found = Some(m.clone());
            true
        });
        if found.is_some() {
            break;
        }
    }
    found
}

/// Calls `visit` on the models of `axioms` with exactly `n` elements, in a
/// fixed order, until it returns `true`. Returns whether it did.
/// Relational signatures only; arithmetic ones yield no models.
pub fn for_each_model(sig: &Signature, axioms: &[Formula], n: u32, visit: &mut dyn FnMut(&Structure) -> bool) -> bool {
    if sig.is_arithmetic() || n == 0 {
        return false;
    }
    let top = axioms.iter().filter_map(Formula::max_var).max().map_or(0, |v| v as usize + 1);
    let rels: Vec<(String, usize)> =
        sig.relations().filter(|(r, _)| *r != EQ).map(|(r, n)| (r.to_string(), n)).collect();
    let mentions: Vec<BTreeSet<String>> = axioms
        .iter()
        .map(|a| {
            let mut m = BTreeMap::new();
            a.relations(&mut m);
            m.into_keys().collect()
        })
        .collect();
    let mut p = Partial { sig, n, cells: BTreeMap::new() };
    let mut order = Vec::new();
    for (r, arity) in &rels {
        let cells = (n as usize).pow(*arity as u32);
        p.cells.insert(r.clone(), vec![None; cells]);
        order.extend((0..cells).map(|i| (r.clone(), i)));
    }
    let mut env = vec![0; top];
    if axioms.iter().any(|a| p.eval(a, &mut env) == Some(false)) {
        return false;
    }
    let mut leaf = |p: &Partial<'_>| {
        let mut m = Structure::new(sig.clone(), n);
        for (r, arity) in &rels {
            for t in tuples(n, *arity) {
                if p.cells[r][p.index(&t)] == Some(true) {
                    m.set(r, t, true);
                }
            }
        }
        visit(&m)
    };
    let mut search = Search { order: &order, axioms, mentions: &mentions, env: &mut env, leaf: &mut leaf };
    search.run(&mut p, 0)
}

struct Search<'a, 'b> {
    order: &'a [(String, usize)],
    axioms: &'a [Formula],
    mentions: &'a [BTreeSet<String>],
    env: &'a mut Vec<Elem>,
    leaf: &'a mut dyn FnMut(&Partial<'b>) -> bool,
}

impl<'b> Search<'_, 'b> {
    fn run(&mut self, p: &mut Partial<'b>, k: usize) -> bool {
        if k == self.order.len() {
            return self.axioms.iter().all(|a| p.eval(a, self.env) == Some(true)) && (self.leaf)(p);
        }
        let (r, i) = &self.order[k];
        for v in [false, true] {
            p.cells.get_mut(r).expect("cell")[*i] = Some(v);
            let ok = self
                .axioms
                .iter()
                .zip(self.mentions)
                .all(|(a, ms)| !ms.contains(r) || p.eval(a, self.env) != Some(false));
            if ok && self.run(p, k + 1) {
                p.cells.get_mut(r).expect("cell")[*i] = None;
                return true;
            }
        }
        p.cells.get_mut(r).expect("cell")[*i] = None;
        false
    }
}

pub fn find_model(theory: &crate::theory::TheorySpec, max_domain: u32) -> Option<Structure> {
    find_model_for(&theory.signature, &theory.axiom_list(), max_domain)
}

/// Truth vectors over all assignments of `vars` variables, packed in bits.
pub type Bits = Vec<u64>;

fn bits_len(positions: usize) -> usize {
    positions.div_ceil(64)
}

fn get_bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

/// One side of a two-structure comparison: `n` elements, positions are
/// assignments of `vars` variables indexed `sum a_i * n^i`.
#[derive(Clone, Debug)]
pub struct Side {
    pub n: usize,
    pub vars: usize,
}

impl Side {
    pub fn positions(&self) -> usize {
        self.n.pow(self.vars as u32)
    }

    pub fn decode(&self, mut p: usize) -> Vec<usize> {
        (0..self.vars)
            .map(|_| {
                let d = p % self.n;
                p /= self.n;
                d
            })
            .collect()
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().rev().fold(0, |acc, d| acc * self.n + d)
    }

    /// Truth vector of a predicate on positions.
    pub fn vector(&self, mut f: impl FnMut(&[usize]) -> bool) -> Bits {
        let mut b = vec![0; bits_len(self.positions())];
        for p in 0..self.positions() {
            if f(&self.decode(p)) {
                set_bit(&mut b, p);
            }
        }
        b
    }

    fn not(&self, a: &Bits) -> Bits {
        let n = self.positions();
        let mut out: Bits = a.iter().map(|w| !w).collect();
        if n % 64 != 0 {
            let last = out.len() - 1;
            out[last] &= (1u64 << (n % 64)) - 1;
        }
        out
    }

    /// `forall x_i (g -> a)` or `exists x_i (g and a)`.
    fn quantify(&self, a: &Bits, var: usize, forall: bool, guard: Option<&Bits>) -> Bits {
        let stride = self.n.pow(var as u32);
        let mut out = vec![0; a.len()];
        for p in 0..self.positions() {
            let digit = (p / stride) % self.n;
            let base = p - digit * stride;
            let mut acc = forall;
            for e in 0..self.n {
                let q = base + e * stride;
                let g = guard.is_none_or(|g| get_bit(g, q));
                let v = get_bit(a, q);
                if forall && g && !v {
                    acc = false;
                    break;
                }
                if !forall && g && v {
                    acc = true;
                    break;
                }
            }
            if acc {
                set_bit(&mut out, p);
            }
        }
        out
    }
}

/// A quantifier step available to the enumeration: quantify variable `var`,
/// optionally guarded by an atom given with its truth vectors.
#[derive(Clone, Debug)]
pub struct QuantStep {
    pub var: usize,
    pub guard: Option<(Formula, Bits, Bits)>,
}

/// A formula on which the two sides disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub formula: Formula,
    /// Left-side element indices per variable.
    pub assignment: Vec<usize>,
    pub left: bool,
    pub right: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub classes: usize,
    pub depth: usize,
}

/// Compares two structures on every formula built from `atoms` by the
/// boolean connectives and `steps`, up to `depth`. Formulas are enumerated
/// up to equality of their truth-vector pairs, which is exact for this
/// question because every construction acts on vectors alone. Position `p`
/// on the left is compared with `map[p]` on the right.
pub fn compare_definable(
    left: &Side,
    right: &Side,
    map: &[usize],
    atoms: Vec<(Formula, Bits, Bits)>,
    steps: &[QuantStep],
    depth: usize,
) -> Result<EnumerationStats, Disagreement> {
    let check = |f: &Formula, l: &Bits, r: &Bits| -> Result<(), Disagreement> {
        for (p, q) in map.iter().enumerate() {
            let (a, b) = (get_bit(l, p), get_bit(r, *q));
            if a != b {
                return Err(Disagreement { formula: f.clone(), assignment: left.decode(p), left: a, right: b });
            }
        }
        Ok(())
    };
    let mut seen: HashMap<(Bits, Bits), usize> = HashMap::new();
    let mut all: Vec<(Formula, Bits, Bits)> = Vec::new();
    let mut levels: Vec<std::ops::Range<usize>> = Vec::new();
    let mut add = |f: Formula, l: Bits, r: Bits, all: &mut Vec<(Formula, Bits, Bits)>| -> Result<(), Disagreement> {
        if seen.contains_key(&(l.clone(), r.clone())) {
            return Ok(());
        }
        check(&f, &l, &r)?;
        seen.insert((l.clone(), r.clone()), all.len());
        all.push((f, l, r));
        Ok(())
    };
    for (f, l, r) in atoms {
        add(f, l, r, &mut all)?;
    }
    levels.push(0..all.len());
    for d in 1..=depth {
        let start = all.len();
        let prev = levels[d - 1].clone();
        let last = d == depth;
        for i in prev.clone() {
            for s in steps {
                for forall in [true, false] {
                    let (f, l, r) = &all[i];
                    let gl = s.guard.as_ref().map(|g| &g.1);
                    let gr = s.guard.as_ref().map(|g| &g.2);
                    let nl = left.quantify(l, s.var, forall, gl);
                    let nr = right.quantify(r, s.var, forall, gr);
                    let x = Var(s.var as u32);
                    let nf = match (&s.guard, forall) {
                        (None, true) => Formula::forall(x, f.clone()),
                        (None, false) => Formula::exists(x, f.clone()),
                        (Some(g), true) => Formula::forall(x, Formula::imp(g.0.clone(), f.clone())),
                        (Some(g), false) => Formula::exists(x, Formula::and(g.0.clone(), f.clone())),
                    };
                    add(nf, nl, nr, &mut all)?;
                }
            }
        }
        // Boolean combinations of agreeing classes agree pointwise, so the
        // last level needs only the quantifier steps.
        if !last {
            for i in prev.clone() {
                let (f, l, r) = all[i].clone();
                add(Formula::not(f.clone()), left.not(&l), right.not(&r), &mut all)?;
                for k in 0..prev.end {
                    let (g, l2, r2) = all[k].clone();
                    let and = |a: &Bits, b: &Bits| a.iter().zip(b).map(|(x, y)| x & y).collect::<Bits>();
                    let or = |a: &Bits, b: &Bits| a.iter().zip(b).map(|(x, y)| x | y).collect::<Bits>();
                    add(Formula::and(f.clone(), g.clone()), and(&l, &l2), and(&r, &r2), &mut all)?;
                    add(Formula::or(f.clone(), g.clone()), or(&l, &l2), or(&r, &r2), &mut all)?;
                    add(
                        Formula::imp(f.clone(), g.clone()),
                        or(&left.not(&l), &l2),
                        or(&right.not(&r), &r2),
                        &mut all,
                    )?;
                    add(
                        Formula::imp(g.clone(), f.clone()),
                        or(&left.not(&l2), &l),
                        or(&right.not(&r2), &r),
                        &mut all,
                    )?;
                }
            }
        }
        levels.push(start..all.len());
    }
    Ok(EnumerationStats { classes: all.len(), depth })
}

/// Result of the translation/model duality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub classes: usize,
    pub disagreement: Option<Disagreement>,
    /// Representatives re-evaluated directly, and how many of them matched.
    pub spot_checked: usize,
    pub spot_mismatches: Vec<String>,
}

/// Source atoms over `Var(0) .. Var(vars-1)`, plus `bot`.
pub fn atoms_over(sig: &Signature, vars: usize) -> Vec<Formula> {
    let mut out = vec![Formula::Bot];
    for (r, arity) in sig.relations() {
        for t in tuples(vars as u32, arity) {
            out.push(Formula::Atom(r.to_string(), t.iter().map(|v| Term::Var(Var(*v))).collect()));
        }
    }
    out
}

/// `eval(M, A^j) = eval(M^j, A)` for all formulas over `vars` variables up
/// to `depth`, at every assignment of domain-satisfying elements.
pub fn check_duality(m: &Structure, j: &Translation, vars: usize, depth: usize) -> Result<DualityReport, ModelError> {
    let im = internal_model(m, j)?;
    let dsat: Vec<Elem> = im.class_of.keys().copied().collect();
    let left = Side { n: dsat.len(), vars };
    let right = Side { n: im.classes.len(), vars };
    let class_idx: Vec<usize> = dsat.iter().map(|e| im.class_of[e] as usize).collect();
    let map: Vec<usize> = (0..left.positions())
        .map(|p| right.encode(&left.decode(p).iter().map(|d| class_idx[*d]).collect::<Vec<_>>()))
        .collect();
    let asg_left = |digits: &[usize]| -> Assignment {
        digits.iter().enumerate().map(|(i, d)| (Var(i as u32), dsat[*d])).collect()
    };
    let asg_right =
        |digits: &[usize]| -> Assignment { digits.iter().enumerate().map(|(i, d)| (Var(i as u32), *d as Elem)).collect() };
    let mut atoms = Vec::new();
    for a in atoms_over(&j.source, vars) {
        let t = translate_formula(j, &a).map_err(|e| ModelError::Symbol(e.to_string()))?;
        let mut err = None;
        let l = left.vector(|d| eval(m, &t, &asg_left(d)).unwrap_or_else(|e| {
            err = Some(e);
            false
        }));
        let r = right.vector(|d| eval(&im.structure, &a, &asg_right(d)).unwrap_or(false));
        if let Some(e) = err {
            return Err(e);
        }
        atoms.push((a, l, r));
    }
    let steps: Vec<QuantStep> = (0..vars).map(|v| QuantStep { var: v, guard: None }).collect();
    let res = compare_definable(&left, &right, &map, atoms, &steps, depth);
    let (classes, disagreement) = match res {
        Ok(s) => (s.classes, None),
        Err(d) => (0, Some(d)),
    };
    let mut report = DualityReport { classes, disagreement, spot_checked: 0, spot_mismatches: vec![] };
    if let Some(d) = &report.disagreement {
        let tf = translate_formula(j, &d.formula).map_err(|e| ModelError::Symbol(e.to_string()))?;
        let l = eval(m, &tf, &asg_left(&d.assignment))?;
        let r = eval(&im.structure, &d.formula, &asg_right(&d.assignment.iter().map(|x| class_idx[*x]).collect::<Vec<_>>()))?;
        if l == r {
            report.spot_mismatches.push(format!("reported disagreement on {} does not reproduce", d.formula));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_formula;
    use crate::theory::signature_to_string;
    use rand::{Rng, SeedableRng};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn order(n: u32) -> Structure {
        let sig = Signature::relational("Ord", [("L", 2)]).unwrap();
        let mut m = Structure::new(sig, n);
        for a in 0..n {
            for b in a..n {
                m.set("L", vec![a, b], true);
            }
        }
        m
    }

    #[test]
    fn bot_is_never_true() {
        assert!(!eval_sentence(&order(2), &Formula::Bot).unwrap());
    }

    #[test]
    fn two_element_order_has_upper_bounds() {
        assert!(eval_sentence(&order(2), &f("(forall x (exists y (L x y)))")).unwrap());
        assert!(!eval_sentence(&order(2), &f("(forall x (exists y (and (L x y) (not (= x y)))))")).unwrap());
    }

    #[test]
    fn missing_assignment_is_an_error() {
        assert!(matches!(eval(&order(2), &f("(L x y)"), &one(Var(0), 0)), Err(ModelError::Unassigned(_))));
        assert!(matches!(eval(&order(2), &f("(P x)"), &one(Var(0), 0)), Err(ModelError::Symbol(_))));
    }

    fn random_formula(rng: &mut impl Rng, depth: usize) -> Formula {
        let v = |rng: &mut dyn rand::RngCore| Var(rng.gen_range(0..3));
        if depth == 0 || rng.gen_bool(0.25) {
            return match rng.gen_range(0..4) {
                0 => Formula::Bot,
                1 => Formula::rel("P", &[v(rng)]),
                2 => Formula::rel("=", &[v(rng), v(rng)]),
                _ => Formula::rel("R", &[v(rng), v(rng)]),
            };
        }
        match rng.gen_range(0..6) {
            0 => Formula::not(random_formula(rng, depth - 1)),
            1 => Formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
            2 => Formula::or(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
            3 => Formula::imp(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
            4 => Formula::forall(v(rng), random_formula(rng, depth - 1)),
            _ => Formula::exists(v(rng), random_formula(rng, depth - 1)),
        }
    }

    fn random_structure(rng: &mut impl Rng) -> Structure {
        let sig = Signature::relational("PR", [("P", 1), ("R", 2)]).unwrap();
        let n = rng.gen_range(1..5);
        let mut m = Structure::new(sig, n);
        for a in 0..n {
            m.set("P", vec![a], rng.gen_bool(0.5));
            for b in 0..n {
                m.set("R", vec![a, b], rng.gen_bool(0.4));
            }
        }
        m
    }

    #[test]
    fn guarded_evaluator_matches_plain_one() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let m = random_structure(&mut rng);
            let phi = random_formula(&mut rng, 4);
            let a: Assignment = (0..3).map(|i| (Var(i), rng.gen_range(0..m.size()))).collect();
            assert_eq!(eval(&m, &phi, &a).unwrap(), naive_eval(&m, &phi, &a).unwrap(), "{phi}");
        }
    }

    #[test]
    fn arithmetic_prefix_is_partial() {
        let sig = Signature::arithmetic("A", Vec::<(String, usize)>::new()).unwrap();
        let m = Structure::new(sig, 5);
        assert!(eval_sentence(&m, &f("(= (+ (S (S 0)) (S (S 0))) (S (S (S (S 0)))))")).unwrap());
        assert!(!eval_sentence(&m, &f("(= (S (S (S (S (S 0))))) (S (S (S (S (S 0))))))")).unwrap());
        assert!(eval_sentence(&m, &f("(ball x (S (S (S (S (S 0))))) (= x x))")).unwrap());
        let bounded = f("(forall y (bex x y (= (S x) y)))");
        assert_eq!(eval_sentence(&m, &bounded).unwrap(), naive_eval(&m, &bounded, &Assignment::new()).unwrap());
    }

    fn trans(src: &Signature, tgt: &Signature, body: &str) -> Translation {
        Translation::parse(&format!(
            "(translation j (source {}) (target {}) {body})",
            signature_to_string(src),
            signature_to_string(tgt)
        ))
        .unwrap()
    }

    #[test]
    fn identity_internal_model_is_isomorphic() {
        let m = order(3);
        let j = Translation::identity(&m.signature);
        let im = internal_model(&m, &j).unwrap();
        assert!(isomorphic(&im.structure, &m));
        assert!(im.violations.is_empty());
    }

    #[test]
    fn domain_selection_and_collapse() {
        let sig = Signature::relational("DP", [("D", 1), ("P", 1), ("E", 2)]).unwrap();
        let src = Signature::relational("P", [("P", 1)]).unwrap();
        let mut m = Structure::new(sig.clone(), 3);
        m.set("D", vec![0], true);
        m.set("D", vec![2], true);
        m.set("P", vec![2], true);
        let j = trans(&src, &sig, "(delta (D x)) (rel P (P x))");
        let im = internal_model(&m, &j).unwrap();
        assert_eq!(im.structure.size(), 2);
        assert_eq!(im.classes, vec![vec![0], vec![2]]);
        let mut m2 = m.clone();
        for a in 0..3 {
            for b in 0..3 {
                m2.set("E", vec![a, b], true);
            }
        }
        let j2 = trans(&src, &sig, "(delta (D x)) (rel P (P x)) (rel = (E x y))");
        let im2 = internal_model(&m2, &j2).unwrap();
        assert_eq!(im2.structure.size(), 1);
        assert_eq!(im2.violations.len(), 1, "P holds of 2 but not of 0");
        let mut m3 = m.clone();
        m3.set("E", vec![0, 2], true);
        let bad = internal_model(&m3, &j2);
        assert!(matches!(bad, Err(ModelError::NotEquivalence(_))));
    }

    #[test]
    fn find_model_examples() {
        let sig = Signature::relational("P", [("P", 1)]).unwrap();
        let m = find_model_for(&sig, &[], 3).unwrap();
        assert_eq!(m.size(), 1);
        let contra = [f("(exists x (P x))"), f("(forall x (not (P x)))")];
        assert!(find_model_for(&sig, &contra, 4).is_none());
        let two = [f("(exists x (P x))"), f("(exists x (not (P x)))")];
        let m = find_model_for(&sig, &two, 4).unwrap();
        assert_eq!(m.size(), 2);
        assert!(two.iter().all(|a| eval_sentence(&m, a).unwrap()));
    }

    #[test]
    fn duality_on_a_relativizing_translation() {
        let sig = Signature::relational("DE", [("D", 1), ("E", 2)]).unwrap();
        let src = Signature::relational("R", [("R", 2)]).unwrap();
        let mut m = Structure::new(sig.clone(), 4);
        for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 3), (1, 1)] {
            m.set("E", vec![a, b], true);
        }
        for a in [0, 1, 2] {
            m.set("D", vec![a], true);
        }
        let j = trans(&src, &sig, "(delta (D x)) (rel R (exists z (and (E x z) (E z y))))");
        let r = check_duality(&m, &j, 2, 2).unwrap();
        assert!(r.disagreement.is_none(), "{:?}", r.disagreement);
        assert!(r.classes > 10);
    }

    #[test]
    fn json_round_trip() {
        let m = order(3);
        assert_eq!(Structure::from_json(&m.to_json()).unwrap(), m);
        assert!(Structure::from_json("{\"signature\": 1}").is_err());
    }
}
