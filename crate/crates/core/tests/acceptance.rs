//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p workbench-core --test acceptance`.

mod common;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};
use workbench_core::coding::{code_syntax, count_up_to, decode, encode, eval_closed, numeral, Alphabet};
use workbench_core::cut::{
    build_host, build_pudlak, build_pudlak_relative, check_confinement, check_delta0_agreement, check_term_law,
    feferman_restrict, floor_half_fixture, identity_fixture, prove_cut_membership, pudlak_tables, MembershipProver, ChainStarts,
    CutSpec,
};
use workbench_core::henkin::{bound_for_length, henkin_complete, henkin_pipeline, FiniteModelOracle, HenkinError};
use workbench_core::interp::{
    size_bound, translate_closure, translate_proof, translated_theory, verify_certificate, InterpError, Notion,
};
use workbench_core::model::check_duality;
use workbench_core::proof::{check_closed, check_restricted, restriction_level, Proof};
use workbench_core::search::{search_refutation, SearchBudget, SearchOutcome};
use workbench_core::sexp::{parse_formula, print_term};
use workbench_core::subst::{alpha_eq, substitute};
use workbench_core::syntax::{Formula, Term, Var};
use workbench_core::theory::TheorySpec;

// Fitted constants. Each is the smallest round value the measured data
// clears; the measured maxima are printed alongside.

/// `code(s) <= C3 * a^|s|`.
const C3: u32 = 2;
/// `code(st) <= K(a) * code(s) * code(t)` for nonempty `s`, `t`, with `K(a) = a + KONST`.
const KONST: usize = 1;
/// Bits of `code(A[x:=t])` at most `C6 * bits(code A) * bits(code t)`.
const C6: u64 = 1;
/// Printed length of `numeral(n)` at most `C_NUM * (floor(log2 n) + 1)`.
const C_NUM: usize = 20;
/// Membership proof nodes at most `C_MEM * (floor(log2 n) + 1)`.
const C_MEM: usize = 120;

const SEED: u64 = 20_061_203;

type Outcome = Result<String, String>;

fn bits(n: u64) -> usize {
    (64 - n.leading_zeros() as usize).max(1)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    check(start.elapsed() <= limit, || format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

/// All strings over `a` letters of length at most `max`, in
/// length-then-alphabetic order, built without the coder.
fn enumerate(a: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for d in 0..a {
                let mut t = s.clone();
                t.push(d);
                next.push(t);
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn corpus_formulas() -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let proofs = common::proofs();
    let mut roots: Vec<Formula> = proofs.iter().flat_map(|p| p.proof.nodes().into_iter().map(|(_, n)| n.conclusion.clone())).collect();
    roots.extend(workbench_core::arith::base_axioms());
    for r in &roots {
        for f in r.subformulas() {
            if seen.insert(f.to_string()) {
                out.push(f.clone());
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for a in 2..=4usize {
        let alpha = Alphabet::letters(a);
        let all = enumerate(a, 8);
        for n in 0..=8u32 {
            let exact = all.iter().filter(|s| s.len() == n as usize).count() as u64;
            let upto = all.iter().filter(|s| s.len() <= n as usize).count() as u64;
            check(exact == (a as u64).pow(n), || format!("a={a}: {exact} strings of length {n}"))?;
            let printed = ((a as u64).pow(n + 1) - 1) / (a as u64 - 1);
            check(upto == printed, || format!("a={a}: {upto} strings of length <= {n}"))?;
            check(count_up_to(a, n) == BigUint::from(printed), || format!("count_up_to({a}, {n})"))?;
        }
        for (i, s) in all.iter().enumerate() {
            let text: String = s.iter().map(|d| alpha.symbols()[*d]).collect();
            check(encode(&text, &alpha).unwrap() == BigUint::from(i), || format!("a={a}: code of {text:?}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let syn = Alphabet::syntax();
    for _ in 0..100_000 {
        let words: Vec<u32> = (0..rng.gen_range(1..8)).map(|_| rng.gen()).collect();
        let c = BigUint::new(words);
        check(encode(&decode(&c, &syn), &syn).unwrap() == c, || format!("round trip of {c}"))?;
    }
    let mut k_seen = 0f64;
    for a in [2usize, 3, 4, 95] {
        let alpha = Alphabet::letters(a.min(26)).symbols().len().eq(&a).then(|| Alphabet::letters(a)).unwrap_or_else(Alphabet::syntax);
        let a = alpha.size();
        for _ in 0..2_000 {
            let mut word = |lo: usize| -> String {
                (0..rng.gen_range(lo..12)).map(|_| alpha.symbols()[rng.gen_range(0..a)]).collect()
            };
            let (s, t) = (word(1), word(1));
            let (cs, ct) = (encode(&s, &alpha).unwrap(), encode(&t, &alpha).unwrap());
            let st = encode(&format!("{s}{t}"), &alpha).unwrap();
            let k = BigUint::from(a + KONST);
            check(st <= &k * &cs * &ct, || format!("concatenation law at a={a}: {s:?}, {t:?}"))?;
            k_seen = k_seen.max(ratio(&st, &(&cs * &ct)));
            check(cs <= BigUint::from(C3) * BigUint::from(a).pow(s.chars().count() as u32), || format!("size law for {s:?}"))?;
            let chars: Vec<char> = s.chars().collect();
            for i in 0..chars.len() {
                for j in i + 1..=chars.len() {
                    if j - i < chars.len() {
                        let sub: String = chars[i..j].iter().collect();
                        check(encode(&sub, &alpha).unwrap() < cs, || format!("substring {sub:?} of {s:?}"))?;
                    }
                }
            }
        }
    }
    let formulas = corpus_formulas();
    for f in &formulas {
        let c = code_syntax(f);
        for g in f.subformulas().into_iter().skip(1) {
            check(code_syntax(g) < c, || format!("subformula {g} of {f}"))?;
        }
    }
    let mut terms: Vec<Term> = (0..4).map(|i| Term::Var(Var(i))).collect();
    terms.extend([0u64, 1, 2, 5, 17, 64, 1000].map(numeral));
    terms.push(Term::add(Term::Var(Var(0)), Term::mul(Term::Var(Var(1)), Term::succ(Term::zero()))));
    let mut subst_pairs = 0;
    let mut c6_seen = 0f64;
    for f in &formulas {
        let bf = code_syntax(f).bits();
        for x in f.free_vars() {
            for t in &terms {
                let r = substitute(f, x, t);
                let bt = code_syntax(t).bits();
                let br = code_syntax(&r).bits();
                check(br <= C6 * bf * bt, || format!("substitution law: {f} [{x:?} := {}]", print_term(t)))?;
                c6_seen = c6_seen.max(br as f64 / (bf * bt) as f64);
                subst_pairs += 1;
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "counting a=2..4 to length 8, 1e5 round trips, {} formulas, {subst_pairs} substitutions; K-a max {:.2}, C6 max {:.3}; {:.1?}",
        formulas.len(),
        k_seen,
        c6_seen,
        start.elapsed()
    ))
}

fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = a.bits().max(b.bits()).saturating_sub(60);
    let (a, b) = (a >> shift, b >> shift);
    a.to_string().parse::<f64>().unwrap() / b.to_string().parse::<f64>().unwrap().max(1.0)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut num_seen = 0f64;
    for n in 0..=1_000_000u64 {
        let t = numeral(n);
        check(eval_closed(&t).ok() == Some(BigUint::from(n)), || format!("numeral({n}) evaluates wrongly"))?;
        let len = print_term(&t).len();
        check(len <= C_NUM * bits(n), || format!("numeral({n}) has length {len}"))?;
        num_seen = num_seen.max(len as f64 / bits(n) as f64);
    }
    let c = CutSpec::axiomatic();
    let mut mem_seen = 0f64;
    let prover = MembershipProver::new(&c).map_err(|e| format!("doubling lemmas: {e}"))?;
    for n in 0..=100_000u64 {
        let p = prover.prove(n).map_err(|e| format!("membership {n}: {e}"))?;
        if n % 9973 == 0 {
            let direct = prove_cut_membership(&c, n).map_err(|e| format!("membership {n}: {e}"))?;
            check(direct == p, || format!("membership {n}: prover and one-shot proof differ"))?;
        }
        check(p.size() <= C_MEM * bits(n), || format!("membership {n}: {} nodes", p.size()))?;
        mem_seen = mem_seen.max(p.size() as f64 / bits(n) as f64);
        let got = check_closed(&p, &c.host).map_err(|e| format!("membership {n}: {e}"))?;
        check(alpha_eq(&got, &c.at(&numeral(n))), || format!("membership {n} proves {got}"))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "numerals to 1e6 (length/bit max {num_seen:.1}), membership to 1e5 re-checked (nodes/bit max {mem_seen:.1}); {:.1?}",
        start.elapsed()
    ))
}

struct Translated {
    theory: String,
    translation: String,
    source: Proof,
    target: Proof,
}

fn translate_corpus() -> Result<(Vec<Translated>, usize), String> {
    let theories = common::theories();
    let mut out = Vec::new();
    let mut inapplicable = 0;
    for k in common::translations() {
        for cp in common::proofs() {
            let v = &theories[&cp.theory];
            let Ok(tv) = translated_theory(&k, v) else { continue };
            let concl = check_closed(&cp.proof, v).map_err(|e| format!("{}: {e}", cp.name))?;
            match translate_proof(&k, &cp.proof) {
                Err(InterpError::EqualityNotPreserved) if !k.preserves_identity() => {
                    inapplicable += 1;
                    continue;
                }
                Err(e) => return Err(format!("{} under {}: {e}", cp.name, k.name)),
                Ok(tp) => {
                    let got = check_closed(&tp, &tv).map_err(|e| format!("{} under {}: {e}", cp.name, k.name))?;
                    let want = translate_closure(&k, &concl).map_err(|e| e.to_string())?;
                    check(alpha_eq(&got, &want), || format!("{} under {} concludes {got}", cp.name, k.name))?;
                    out.push(Translated { theory: cp.theory.clone(), translation: k.name.clone(), source: cp.proof, target: tp });
                }
            }
        }
    }
    Ok((out, inapplicable))
}

fn criterion_3() -> Outcome {
    let proofs = common::proofs();
    let translations = common::translations();
    check(proofs.len() >= 50, || format!("only {} corpus proofs", proofs.len()))?;
    check(translations.len() >= 10, || format!("only {} translations", translations.len()))?;
    let (pairs, inapplicable) = translate_corpus()?;
    let theories = common::theories();
    let mutants = common::mutants();
    check(mutants.len() >= 100, || format!("only {} mutants", mutants.len()))?;
    for m in &mutants {
        let v = &theories[&m.theory];
        let th = match &m.translation {
            None => v.clone(),
            Some(t) => {
                let k = translations.iter().find(|k| &k.name == t).ok_or(format!("{}: unknown translation", m.name))?;
                translated_theory(k, v).map_err(|e| e.to_string())?
            }
        };
        check(check_closed(&m.proof, &th).is_err(), || format!("mutant {} ({}) accepted", m.name, m.operator))?;
    }
    Ok(format!(
        "{} proofs x {} translations: {} translated and re-checked, {inapplicable} equality proofs outside identity-free translations; {} mutants rejected",
        proofs.len(),
        translations.len(),
        pairs.len(),
        mutants.len()
    ))
}

fn criterion_4() -> Outcome {
    let (pairs, _) = translate_corpus()?;
    let translations = common::translations();
    let mut gap = u64::MAX;
    for t in &pairs {
        let k = translations.iter().find(|k| k.name == t.translation).unwrap();
        let n = restriction_level(&t.source);
        let bound = size_bound(&n, k);
        let r = check_restricted(&t.target, &BigUint::zero());
        let code = r.max_axiom_code.unwrap_or_default();
        check(code <= bound, || format!("{}/{}: axiom code exceeds f(n, k)", t.theory, t.translation))?;
        check(BigUint::from(r.max_rho) <= bound, || format!("{}/{}: rho {} exceeds f(n, k)", t.theory, t.translation, r.max_rho))?;
        gap = gap.min(bound.bits() - code.max(BigUint::from(r.max_rho)).bits());
    }
    Ok(format!("{} translated proofs within size_bound, smallest gap below the bound {gap} bits", pairs.len()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut triples = 0;
    let mut classes = 0;
    for k in common::translations() {
        let structures = common::structures(&k.name);
        check(!structures.is_empty(), || format!("no structures for {}", k.name))?;
        for (name, m) in structures {
            check(m.size() <= 5, || format!("{}/{name} has {} elements", k.name, m.size()))?;
            let r = check_duality(&m, &k, 3, 3).map_err(|e| format!("{}/{name}: {e}", k.name))?;
            if let Some(d) = r.disagreement {
                return Err(format!("{}/{name}: {d:?}", k.name));
            }
            check(r.spot_mismatches.is_empty(), || format!("{}/{name}: {:?}", k.name, r.spot_mismatches))?;
            triples += 1;
            classes += r.classes;
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{triples} structure/translation pairs, 3 variables, depth 3, {classes} definable classes compared; {:.1?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut instances = 0;
    for j in [identity_fixture(), floor_half_fixture()] {
        let art = build_pudlak(&j).map_err(|e| e.to_string())?;
        for size in 2..=12u32 {
            let host = build_host(&j, size, ChainStarts::Every).map_err(|e| e.to_string())?;
            let r = check_delta0_agreement(&host, &art, 2, 2).map_err(|e| e.to_string())?;
            check(r.is_empty(), || format!("{} at {size}: {r:?}", j.name))?;
            check(r.functional, || format!("{} at {size}: H not functional", j.name))?;
            instances += check_term_law(&host, &art, 5).map_err(|e| format!("{} at {size}: {e}", j.name))?;
        }
    }
    let j = identity_fixture();
    let i = parse_formula("(not (exists u (exists v (exists w (and (One u) (and (Add u u v) (and (Add v v w) (Le w x))))))))")
        .map_err(|e| e.to_string())?;
    let art = build_pudlak_relative(&j, &i).map_err(|e| e.to_string())?;
    let mut confined = 0;
    for size in 6..=12u32 {
        let host = build_host(&j, size, ChainStarts::Every).map_err(|e| e.to_string())?;
        confined += check_confinement(&host, &art).map_err(|e| format!("confinement at {size}: {e}"))?;
        let t = pudlak_tables(&host, &art).map_err(|e| e.to_string())?;
        check(t.jprime.len() < size as usize, || format!("I is not proper at {size}"))?;
    }
    within(start, Duration::from_secs(600))?;
    Ok(format!(
        "identity and floor-half fixtures on prefixes 2..12: agreement, H functional, {instances} term-law instances; {confined} H-pairs confined to I; {:.1?}",
        start.elapsed()
    ))
}

fn criterion_7() -> Outcome {
    let b = bound_for_length(16);
    let fixtures = common::henkin_fixtures();
    check(fixtures.len() >= 5, || format!("only {} fixtures", fixtures.len()))?;
    let mut sizes = Vec::new();
    for v in &fixtures {
        let run = || henkin_pipeline(v, &b, &mut FiniteModelOracle::new(4)).map_err(|e| format!("{}: {e}", v.name));
        let (s1, tm, c1) = run()?;
        let (s2, _, c2) = run()?;
        check(s1.to_json() == s2.to_json(), || format!("{}: state differs between runs", v.name))?;
        check(c1.translation.to_sexp_string() == c2.translation.to_sexp_string() && c1.witnesses == c2.witnesses, || {
            format!("{}: certificate differs between runs", v.name)
        })?;
        check(tm.structure.size() <= 4, || format!("{}: term model has {} elements", v.name, tm.structure.size()))?;
        let r = verify_certificate(&c1, Notion::Sa);
        check(r.certified, || format!("{}: {:?}", v.name, r.failures))?;
        sizes.push(format!("{}:{}", v.name, tm.structure.size()));
    }
    let bad = common::inconsistent_fixtures();
    check(bad.len() >= 2, || "fewer than 2 inconsistent fixtures".into())?;
    for v in &bad {
        match henkin_complete(v, &b, &mut FiniteModelOracle::new(4)) {
            Err(HenkinError::BaseRejected(_)) => {}
            Err(e) => return Err(format!("{}: refused for the wrong reason: {e}", v.name)),
            Ok(_) => return Err(format!("{}: produced a state", v.name)),
        }
    }
    Ok(format!("certified at sa: {}; {} inconsistent fixtures refused; repeat runs byte-identical", sizes.join(" "), bad.len()))
}

fn criterion_8() -> Outcome {
    let budget = SearchBudget::default();
    let contra = common::inconsistent_fixtures().into_iter().find(|t| t.name == "Contra").ok_or("no Contra fixture")?;
    let p = parse_formula("P").unwrap();
    let np = Formula::not(p.clone());
    let refutation = Proof::not_e(Proof::axiom(np), Proof::axiom(p));
    check(check_closed(&refutation, &contra).ok() == Some(Formula::Bot), || "hand refutation fails".into())?;
    let fits = restriction_level(&refutation);
    check(refutation.size() <= budget.max_nodes, || "hand refutation exceeds the budget".into())?;
    let expected: Vec<Formula> = contra.axioms().filter(|(c, _)| **c < fits).map(|(_, a)| a.clone()).collect();
    let got = feferman_restrict(&contra, &budget).map_err(|e| e.to_string())?;
    check(got.axiom_list() == expected, || format!("kept {:?}, expected {:?}", got.axiom_list(), expected))?;
    check(got.len() + 1 == contra.len(), || "exactly one axiom should go".into())?;
    let mut consistent: Vec<TheorySpec> = common::theories().into_values().collect();
    consistent.extend(common::henkin_fixtures());
    for v in &consistent {
        let r = feferman_restrict(v, &budget).map_err(|e| e.to_string())?;
        check(r.axiom_list() == v.axiom_list(), || format!("{}: axioms dropped", v.name))?;
    }
    Ok(format!("Contra keeps {} of {} axioms (cut at code {fits}); {} consistent fixtures unchanged", got.len(), contra.len(), consistent.len()))
}

fn criterion_9() -> Outcome {
    let (pairs, _) = translate_corpus()?;
    let mut proofs: Vec<Proof> = common::proofs().into_iter().map(|p| p.proof).collect();
    proofs.extend(pairs.into_iter().map(|t| t.target));
    for p in &proofs {
        let level = restriction_level(p);
        let mut probes: Vec<BigUint> = (0u32..8).map(BigUint::from).collect();
        for d in [-2i64, -1, 0, 1, 2] {
            if d < 0 && level < BigUint::from((-d) as u64) {
                continue;
            }
            probes.push(if d < 0 { &level - BigUint::from((-d) as u64) } else { &level + BigUint::from(d as u64) });
        }
        probes.push(&level * 2u32 + BigUint::one());
        probes.sort();
        let verdicts: Vec<bool> = probes.iter().map(|n| check_restricted(p, n).ok).collect();
        check(verdicts.windows(2).all(|w| !w[0] || w[1]), || format!("not monotone on {}", p.conclusion))?;
        for (n, ok) in probes.iter().zip(&verdicts) {
            check(*ok == (*n >= level), || format!("threshold wrong at {n} for {}", p.conclusion))?;
        }
    }
    let mut theories: Vec<TheorySpec> = common::theories().into_values().collect();
    theories.extend(common::henkin_fixtures());
    theories.extend(common::inconsistent_fixtures());
    let budget = SearchBudget { max_nodes: 6 };
    let mut refutations = 0;
    let mut searches = 0;
    for v in &theories {
        let mut ns: Vec<BigUint> = v.axioms().map(|(c, _)| c.clone()).collect();
        ns.push(BigUint::from(10u32).pow(200));
        for n in &ns {
            let a = search_refutation(v, n, &budget);
            let b = search_refutation(v, n, &budget);
            check(a == b, || format!("{}: search differs between runs at {n}", v.name))?;
            searches += 1;
            if let SearchOutcome::Refutation(p) = a {
                check(check_closed(&p, v).ok() == Some(Formula::Bot), || format!("{}: refutation fails to check", v.name))?;
                check(check_restricted(&p, n).ok, || format!("{}: refutation exceeds {n}", v.name))?;
                refutations += 1;
            }
        }
    }
    let expected = common::inconsistent_fixtures().len();
    check(refutations >= expected, || format!("only {refutations} refutations found"))?;
    Ok(format!("{} proofs monotone with exact thresholds; {searches} searches repeatable, {refutations} refutations re-checked", proofs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("coding laws", criterion_1),
        ("efficient numerals and membership", criterion_2),
        ("proof translation corpus", criterion_3),
        ("translated size bound", criterion_4),
        ("translation/model duality", criterion_5),
        ("Pudlak agreement", criterion_6),
        ("Henkin pipeline", criterion_7),
        ("Feferman restriction", criterion_8),
        ("restricted provability", criterion_9),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
