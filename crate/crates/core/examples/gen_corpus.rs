//! Writes the fixture corpus under `corpus/` at the workspace root.
//!
//! `cargo run -p workbench-core --example gen_corpus [DIR]`
//!
//! Output is a pure function of this file: proofs come from the bounded
//! prover or the builders below, structures and mutation sites from a fixed
//! seed. Every artifact is re-checked before it is written.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use workbench_core::henkin::{henkin_pipeline, FiniteModelOracle, bound_for_length};
use workbench_core::interp::{translate_proof, translated_theory, Translation};
use workbench_core::model::{internal_model, Structure};
use workbench_core::proof::{check_closed, eq, parse_proof, pretty_proof, Proof, Rule};
use workbench_core::search::{search_proof, SearchBudget};
use workbench_core::sexp::parse_formula;
use workbench_core::syntax::{Formula, Term, Var};
use workbench_core::theory::TheorySpec;

const SEED: u64 = 0x5eed_c0de;

const THEORIES: &[&str] = &[
    "(theory Prop (signature (A 0) (B 0) (C 0)) (axiom A) (axiom (-> A B)))",
    "(theory Mono (signature (P 1) (Q 1)) (axiom (forall x (-> (P x) (Q x)))) (axiom (exists x (P x))))",
    "(theory Order (signature (R 2)) (axiom (forall x (not (R x x)))) \
     (axiom (forall x (forall y (forall z (-> (R x y) (-> (R y z) (R x z))))))))",
    "(theory Graph (signature (E 2)) (axiom (forall x (forall y (-> (E x y) (E y x))))) \
     (axiom (exists x (exists y (E x y)))))",
];

const GOALS: &[(&str, &[&str])] = &[
    ("Prop", &[
        "(-> C C)", "(-> (and A C) (and C A))", "(-> (or C A) (or A C))", "(-> C (-> B C))",
        "(-> (-> A C) (-> (-> C B) (-> A B)))", "(-> (not (not C)) C)", "(or C (not C))",
        "(-> (-> (-> C A) C) C)", "(-> (and A (or B C)) (or (and A B) (and A C)))",
        "(-> (-> C B) (-> (not B) (not C)))", "(-> bot C)", "(not (and C (not C)))",
        "(-> (not (or B C)) (and (not B) (not C)))", "(-> (or (not B) (not C)) (not (and B C)))",
        "B", "(and A B)", "(or C B)", "(-> C B)", "(not (not B))", "(-> (not B) C)",
    ]),
    ("Mono", &[
        "(exists x (Q x))", "(forall x (-> (P x) (P x)))", "(-> (forall x (Q x)) (exists x (Q x)))",
        "(-> (forall x (and (P x) (Q x))) (forall x (P x)))",
        "(-> (exists x (and (Q x) (P x))) (exists x (Q x)))",
        "(-> (not (exists x (Q x))) (forall x (not (Q x))))",
        "(-> (forall x (not (Q x))) (not (exists x (Q x))))",
        "(-> (exists x (not (Q x))) (not (forall x (Q x))))",
        "(-> (not (forall x (Q x))) (exists x (not (Q x))))",
        "(-> (forall x (-> (Q x) (P x))) (-> (forall x (Q x)) (forall x (P x))))",
        "(-> (or (exists x (P x)) (exists x (Q x))) (exists x (or (P x) (Q x))))",
        "(-> (and (forall x (P x)) (forall x (Q x))) (forall x (and (P x) (Q x))))",
        "(forall x (-> (not (Q x)) (not (P x))))", "(exists x (and (P x) (Q x)))",
        "(not (forall x (not (P x))))", "(exists x (-> (Q x) (forall y (Q y))))",
    ]),
    ("Order", &[
        "(forall x (forall y (-> (R x y) (not (R y x)))))", "(not (exists x (R x x)))",
        "(-> (forall x (exists y (R x y))) (exists x (exists y (R x y))))",
        "(-> (exists x (forall y (R x y))) (forall y (exists x (R x y))))",
        "(forall x (forall y (or (R x y) (not (R x y)))))",
        "(forall x (not (forall y (R x y))))", "(not (exists x (forall y (R y x))))",
    ]),
    ("Graph", &[
        "(exists x (exists y (E y x)))", "(forall x (forall y (-> (not (E x y)) (not (E y x)))))",
        "(exists x (exists y (and (E x y) (E y x))))",
        "(-> (forall x (forall y (E x y))) (forall y (forall x (E x y))))",
        "(forall x (-> (forall y (E x y)) (forall y (E y x))))",
        "(exists x (exists y (exists z (and (E x y) (E y z)))))",
        "(not (forall x (forall y (not (E x y)))))", "(-> (exists x (E x x)) (exists x (exists y (E x y))))",
    ]),
];

const TRANSLATIONS: &[&str] = &[
    "(translation prop-id (source (signature (A 0) (B 0) (C 0))) (target (signature (A 0) (B 0) (C 0))) \
     (delta (= x x)) (rel A A) (rel B B) (rel C C))",
    "(translation prop-mono (source (signature (A 0) (B 0) (C 0))) (target (signature (P 1) (Q 1))) \
     (delta (= x x)) (rel A (exists x (P x))) (rel B (forall x (Q x))) (rel C (exists x (and (P x) (Q x)))))",
    "(translation prop-flip (source (signature (A 0) (B 0) (C 0))) (target (signature (A 0) (B 0) (C 0))) \
     (delta (= x x)) (rel A (not A)) (rel B (and (not B) C)) (rel C (or A C)))",
    "(translation mono-swap (source (signature (P 1) (Q 1))) (target (signature (P 1) (Q 1))) \
     (delta (= x x)) (rel P (Q x)) (rel Q (P x)))",
    "(translation mono-rel (source (signature (P 1) (Q 1))) (target (signature (D 1) (P 1) (Q 1))) \
     (delta (D x)) (rel P (P x)) (rel Q (Q x)))",
    "(translation mono-order (source (signature (P 1) (Q 1))) (target (signature (R 2))) \
     (delta (= x x)) (rel P (exists y (R x y))) (rel Q (exists y (or (R x y) (R y x)))))",
    "(translation mono-classes (source (signature (P 1) (Q 1))) (target (signature (E 2) (P 1) (Q 1))) \
     (delta (E x x)) (rel = (E x y)) (rel P (P x)) (rel Q (Q x)))",
    "(translation order-converse (source (signature (R 2))) (target (signature (R 2))) \
     (delta (= x x)) (rel R (R y x)))",
    "(translation order-strict (source (signature (R 2))) (target (signature (L 2))) \
     (delta (= x x)) (rel R (and (L x y) (not (= x y)))))",
    "(translation order-rel (source (signature (R 2))) (target (signature (D 1) (R 2))) \
     (delta (or (D x) (exists y (R x y)))) (rel R (R x y)))",
    "(translation graph-complement (source (signature (E 2))) (target (signature (E 2))) \
     (delta (= x x)) (rel E (and (not (E x y)) (not (= x y)))))",
    "(translation graph-cut (source (signature (E 2))) (target (signature (P 1))) \
     (delta (= x x)) (rel E (or (and (P x) (not (P y))) (and (not (P x)) (P y)))))",
    "(translation graph-square (source (signature (E 2))) (target (signature (E 2))) \
     (delta (= x x)) (rel E (exists z (and (E x z) (E z y)))))",
];

const HENKIN: &[&str] = &[
    "(theory Empty (signature (P 1)))",
    "(theory Exists (signature (P 1)) (axiom (exists x (P x))))",
    "(theory Colours (signature (P 1)) (axiom (exists x (P x))) (axiom (exists x (not (P x)))))",
    "(theory Switches (signature (P 0) (Q 0)) (axiom (or P Q)) (axiom (not (and P Q))))",
    "(theory Chain (signature (R 2)) \
     (axiom (forall x (forall y (forall z (-> (and (R x y) (R y z)) (R x z)))))) \
     (axiom (and (forall x (not (R x x))) (exists x (exists y (exists z (and (R x y) (R y z))))))))",
    "(theory Serial (signature (R 2)) (axiom (forall x (exists y (R x y)))) (axiom (forall x (not (R x x)))))",
];

const INCONSISTENT: &[&str] = &[
    "(theory Contra (signature (P 0)) (axiom P) (axiom (not P)))",
    "(theory Void (signature (P 1)) (axiom (exists x (P x))) (axiom (forall x (not (P x)))))",
];

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn v(i: u32) -> Term {
    Term::Var(Var(i))
}

fn all(p: Proof, vars: &[u32]) -> Proof {
    vars.iter().rev().fold(p, |p, i| Proof::forall_i(Var(*i), p))
}

/// Proofs outside the reach of the bounded prover, mostly equality.
fn handwritten() -> Vec<(&'static str, Proof)> {
    let irr = || Proof::axiom(f("(forall x (not (R x x)))"));
    let tr = |a: Proof, b: Proof, x: u32, y: u32, z: u32| {
        let ax = Proof::axiom(f("(forall x (forall y (forall z (-> (R x y) (-> (R y z) (R x z))))))"));
        Proof::imp_e(Proof::imp_e(Proof::forall_e_all(ax, &[v(x), v(y), v(z)]), a), b)
    };
    let h = |l: &str, s: &str| Proof::assume(l, f(s));
    let mut out = Vec::new();

    let chain4 = Proof::imp_i(
        "h1",
        f("(R x y)"),
        Proof::imp_i(
            "h2",
            f("(R y z)"),
            Proof::imp_i(
                "h3",
                f("(R z u)"),
                tr(tr(h("h1", "(R x y)"), h("h2", "(R y z)"), 0, 1, 2), h("h3", "(R z u)"), 0, 2, 3),
            ),
        ),
    );
    out.push(("Order", all(chain4, &[0, 1, 2, 3])));

    let pair = "(and (R x y) (R y x))";
    let asym = Proof::not_i(
        "h",
        f("(exists x (exists y (and (R x y) (R y x))))"),
        Proof::exists_e(
            Var(0),
            "h1",
            h("h", "(exists x (exists y (and (R x y) (R y x))))"),
            Proof::exists_e(
                Var(1),
                "h2",
                h("h1", "(exists y (and (R x y) (R y x)))"),
                Proof::not_e(
                    Proof::forall_e(irr(), v(0)),
                    tr(Proof::and_el(h("h2", pair)), Proof::and_er(h("h2", pair)), 0, 1, 0),
                ),
            ),
        ),
    );
    out.push(("Order", asym));

    let cycle = Proof::imp_i(
        "h1",
        f("(R x y)"),
        Proof::imp_i(
            "h2",
            f("(R y z)"),
            Proof::not_i(
                "h3",
                f("(R z x)"),
                Proof::not_e(
                    Proof::forall_e(irr(), v(0)),
                    tr(tr(h("h1", "(R x y)"), h("h2", "(R y z)"), 0, 1, 2), h("h3", "(R z x)"), 0, 2, 0),
                ),
            ),
        ),
    );
    out.push(("Order", all(cycle, &[0, 1, 2])));

    let neq = Proof::imp_i(
        "h",
        f("(R x y)"),
        Proof::not_i(
            "e",
            f("(= x y)"),
            Proof::not_e(
                Proof::forall_e(irr(), v(1)),
                Proof::eq_subst(Var(2), f("(R z y)"), h("e", "(= x y)"), h("h", "(R x y)")),
            ),
        ),
    );
    out.push(("Order", all(neq, &[0, 1])));

    out.push(("Mono", all(Proof::refl(v(0)), &[0])));
    out.push(("Mono", all(Proof::imp_i("h", f("(= x y)"), eq::sym(h("h", "(= x y)"))), &[0, 1])));
    let trans = Proof::imp_i(
        "h1",
        f("(= x y)"),
        Proof::imp_i("h2", f("(= y z)"), eq::trans(h("h1", "(= x y)"), h("h2", "(= y z)"))),
    );
    out.push(("Mono", all(trans, &[0, 1, 2])));
    let leibniz = Proof::imp_i(
        "h1",
        f("(= x y)"),
        Proof::imp_i("h2", f("(P x)"), Proof::eq_subst(Var(2), f("(P z)"), h("h1", "(= x y)"), h("h2", "(P x)"))),
    );
    out.push(("Mono", all(leibniz, &[0, 1])));
    out.push(("Mono", Proof::exists_i(f("(exists x (= x x))"), v(0), Proof::refl(v(0)))));
    out.push(("Mono", all(Proof::exists_i(f("(exists y (= y x))"), v(0), Proof::refl(v(0))), &[0])));
    let loop_ = Proof::imp_i(
        "h1",
        f("(= x y)"),
        Proof::imp_i("h2", f("(E x y)"), Proof::eq_subst(Var(2), f("(E z y)"), h("h1", "(= x y)"), h("h2", "(E x y)"))),
    );
    out.push(("Graph", all(loop_, &[0, 1])));
    let collapse = Proof::imp_i(
        "h",
        f("(forall x (forall y (= x y)))"),
        Proof::forall_e_all(h("h", "(forall x (forall y (= x y)))"), &[v(1), v(0)]),
    );
    out.push(("Graph", all(collapse, &[0, 1])));
    out
}

fn tuples(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}

fn random_structure(t: &Translation, n: u32, density: f64, rng: &mut ChaCha8Rng) -> Structure {
    let mut m = Structure::new(t.target.clone(), n);
    for (r, k) in t.target.proper_relations().map(|(r, k)| (r.to_string(), k)).collect::<Vec<_>>() {
        for tup in tuples(n, k) {
            if rng.gen_bool(density) {
                m.set(&r, tup, true);
            }
        }
    }
    m
}

/// `E` a partial equivalence, unary relations unions of its classes.
fn classes_structure(t: &Translation, n: u32, density: f64, rng: &mut ChaCha8Rng) -> Structure {
    let mut m = Structure::new(t.target.clone(), n);
    let block: Vec<Option<u32>> = (0..n).map(|_| rng.gen_bool(0.8).then(|| rng.gen_range(0..n.max(2) / 2 + 1))).collect();
    let blocks: Vec<u32> = block.iter().flatten().copied().collect();
    let unary: Vec<String> = t.target.proper_relations().filter(|(_, k)| *k == 1).map(|(r, _)| r.to_string()).collect();
    let chosen: Vec<(String, u32)> =
        unary.iter().flat_map(|r| blocks.iter().map(move |b| (r.clone(), *b))).filter(|_| rng.gen_bool(density)).collect();
    for a in 0..n {
        for b in 0..n {
            if block[a as usize].is_some() && block[a as usize] == block[b as usize] {
                m.set("E", vec![a, b], true);
            }
        }
        if let Some(blk) = block[a as usize] {
            for (r, _) in chosen.iter().filter(|(_, c)| *c == blk) {
                m.set(r, vec![a], true);
            }
        }
    }
    m
}

/// A structure whose internal model exists and is well defined.
fn fixture_structure(t: &Translation, n: u32, density: f64, rng: &mut ChaCha8Rng) -> Structure {
    loop {
        let m = if t.preserves_identity() {
            random_structure(t, n, density, rng)
        } else {
            classes_structure(t, n, density, rng)
        };
        if internal_model(&m, t).is_ok_and(|im| im.violations.is_empty()) {
            return m;
        }
    }
}

/// Deterministic mutation operators; `None` when the operator has no site.
fn mutate(p: &Proof, op: &str, rng: &mut ChaCha8Rng) -> Option<Proof> {
    let nodes: Vec<Vec<usize>> = p.nodes().into_iter().map(|(path, _)| path).collect();
    let pick = |rng: &mut ChaCha8Rng, sites: Vec<Vec<usize>>| -> Option<Vec<usize>> {
        (!sites.is_empty()).then(|| sites[rng.gen_range(0..sites.len())].clone())
    };
    let mut q = p.clone();
    match op {
        "conclusion-negated" => {
            let site = pick(rng, nodes)?;
            let n = q.at_mut(&site)?;
            n.conclusion = Formula::not(n.conclusion.clone());
        }
        "premise-dropped" => {
            let site = pick(rng, nodes.into_iter().filter(|s| !p.at(s).unwrap().premises.is_empty()).collect())?;
            q.at_mut(&site)?.premises.pop();
        }
        "axiom-forged" => {
            let site = pick(rng, nodes.into_iter().filter(|s| matches!(p.at(s).unwrap().rule, Rule::Axiom(_))).collect())?;
            let n = q.at_mut(&site)?;
            *n = Proof::axiom(Formula::not(n.conclusion.clone()));
        }
        "label-broken" => {
            let site = pick(
                rng,
                nodes
                    .into_iter()
                    .filter(|s| matches!(p.at(s).unwrap().rule, Rule::ImpI(_) | Rule::NotI(_) | Rule::Raa(_)))
                    .collect(),
            )?;
            let n = q.at_mut(&site)?;
            n.rule = match &n.rule {
                Rule::ImpI(l) => Rule::ImpI(format!("{l}x")),
                Rule::NotI(l) => Rule::NotI(format!("{l}x")),
                Rule::Raa(l) => Rule::Raa(format!("{l}x")),
                _ => unreachable!(),
            };
        }
        "premises-swapped" => {
            let site = pick(
                rng,
                nodes
                    .into_iter()
                    .filter(|s| {
                        let n = p.at(s).unwrap();
                        n.premises.len() == 2 && n.premises[0].conclusion != n.premises[1].conclusion
                    })
                    .collect(),
            )?;
            q.at_mut(&site)?.premises.swap(0, 1);
        }
        "atom-renamed" => {
            let site = pick(
                rng,
                nodes.into_iter().filter(|s| matches!(p.at(s).unwrap().conclusion, Formula::Atom(..))).collect(),
            )?;
            let n = q.at_mut(&site)?;
            if let Formula::Atom(r, args) = &n.conclusion {
                let args = args.clone();
                n.conclusion = if r == "=" {
                    Formula::eq(args[1].clone(), Term::Var(Var(7)))
                } else {
                    Formula::Atom(format!("{r}{r}"), args)
                };
            }
        }
        "eigenvariable-clash" => {
            let site = pick(
                rng,
                nodes.into_iter().filter(|s| matches!(p.at(s).unwrap().rule, Rule::ForallE(_) | Rule::ExistsI(_))).collect(),
            )?;
            let n = q.at_mut(&site)?;
            n.rule = match &n.rule {
                Rule::ForallE(_) => Rule::ForallE(Term::Var(Var(9))),
                Rule::ExistsI(_) => Rule::ExistsI(Term::Var(Var(9))),
                _ => unreachable!(),
            };
        }
        _ => unreachable!("unknown operator {op}"),
    }
    (q != *p).then_some(q)
}

const OPERATORS: &[&str] = &[
    "conclusion-negated",
    "premise-dropped",
    "axiom-forged",
    "label-broken",
    "premises-swapped",
    "atom-renamed",
    "eigenvariable-clash",
];

fn write(path: &Path, body: &str) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, body).unwrap();
}

fn main() {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"));
    if root.exists() {
        fs::remove_dir_all(&root).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let theories: BTreeMap<String, TheorySpec> = THEORIES
        .iter()
        .map(|s| {
            let t = TheorySpec::parse(s).unwrap();
            (t.name.clone(), t)
        })
        .collect();
    for t in theories.values() {
        write(&root.join("theories").join(format!("{}.theory", t.name)), &t.to_sexp_string());
    }

    let mut proofs: Vec<(String, String, Proof)> = Vec::new();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    let mut push = |th: &str, p: Proof, proofs: &mut Vec<(String, String, Proof)>| {
        let c = counters.entry(th.to_string()).or_default();
        *c += 1;
        let concl = check_closed(&p, &theories[th]).unwrap_or_else(|e| panic!("{th}: {e}\n{}", pretty_proof(&p)));
        assert!(concl.is_sentence(), "{concl}");
        proofs.push((th.to_string(), format!("{:02}", c), p));
    };
    for (th, goals) in GOALS {
        for g in *goals {
            let p = search_proof(&theories[*th], &f(g), &SearchBudget { max_nodes: 15 })
                .unwrap_or_else(|| panic!("no proof of {g}"));
            push(th, p, &mut proofs);
        }
    }
    for (th, p) in handwritten() {
        push(th, p, &mut proofs);
    }
    for (th, name, p) in &proofs {
        write(&root.join("proofs").join(th).join(format!("{name}.proof")), &pretty_proof(p));
    }

    let translations: Vec<Translation> = TRANSLATIONS.iter().map(|s| Translation::parse(s).unwrap()).collect();
    for t in &translations {
        write(&root.join("translations").join(format!("{}.translation", t.name)), &t.to_sexp_string());
    }

    let mut mutants = 0usize;
    let mut emit = |kind: &str, th: &TheorySpec, tname: Option<&str>, src: &str, op: &str, q: &Proof| {
        if check_closed(q, th).is_ok() || parse_proof(&pretty_proof(q)).ok().as_ref() != Some(q) {
            return;
        }
        mutants += 1;
        let tr = tname.map(|t| format!("\n  (translation {t})")).unwrap_or_default();
        let body = format!(
            "(mutant {kind}-{mutants:03}\n  (theory {}){tr}\n  (from {src})\n  (operator {op})\n  (proof\n{}))\n",
            th.name.split('^').next().unwrap(),
            pretty_proof(q).lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
        );
        write(&root.join("mutations").join(format!("{kind}-{mutants:03}.sexp")), &body);
    };
    for (i, (th, name, p)) in proofs.iter().enumerate() {
        let op = OPERATORS[i % OPERATORS.len()];
        let op2 = OPERATORS[(i + 3) % OPERATORS.len()];
        for op in [op, op2] {
            if let Some(q) = mutate(p, op, &mut rng) {
                emit("source", &theories[th], None, &format!("{th}/{name}"), op, &q);
            }
        }
    }
    for (i, (th, name, p)) in proofs.iter().enumerate().step_by(2) {
        let applicable: Vec<&Translation> = translations
            .iter()
            .filter(|t| translated_theory(t, &theories[th]).is_ok() && translate_proof(t, p).is_ok())
            .collect();
        let t = applicable[i % applicable.len()];
        let tp = translate_proof(t, p).unwrap();
        let tt = translated_theory(t, &theories[th]).unwrap();
        let op = OPERATORS[(i / 2) % OPERATORS.len()];
        if let Some(q) = mutate(&tp, op, &mut rng) {
            emit("translated", &tt, Some(&t.name), &format!("{th}/{name}"), op, &q);
        }
    }

    for t in &translations {
        for n in 1..=5u32 {
            for (i, density) in [0.3, 0.6].into_iter().enumerate() {
                let m = fixture_structure(t, n, density, &mut rng);
                write(&root.join("structures").join(&t.name).join(format!("n{n}-{i}.json")), &m.to_json());
            }
        }
    }

    for (dir, srcs) in [("henkin", HENKIN), ("inconsistent", INCONSISTENT)] {
        for s in srcs {
            let t = TheorySpec::parse(s).unwrap();
            write(&root.join(dir).join(format!("{}.theory", t.name)), &t.to_sexp_string());
        }
    }
    let exists = TheorySpec::parse(HENKIN[1]).unwrap();
    let (_, _, cert) = henkin_pipeline(&exists, &bound_for_length(16), &mut FiniteModelOracle::new(4)).unwrap();
    cert.save_bundle(&root.join("certificates").join("exists")).unwrap();

    println!("{} proofs, {} translations, {} mutants", proofs.len(), translations.len(), mutants);
}
