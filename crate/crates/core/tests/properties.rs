mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use std::collections::BTreeMap;
use workbench_core::coding::{code_syntax, decode, encode, eval_closed, numeral, Alphabet};
use workbench_core::model::{eval, isomorphic, naive_eval, Assignment, Structure};
use workbench_core::proof::{check_closed, check_restricted, parse_proof, pretty_proof, restriction_level};
use workbench_core::sexp::{parse_formula, parse_term, print_formula, print_term};
use workbench_core::subst::{alpha_eq, rename, substitute};
use workbench_core::syntax::{Formula, Signature, Term, Var};

fn var() -> impl Strategy<Value = Var> {
    (0u32..4).prop_map(Var)
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![var().prop_map(Term::Var), Just(Term::zero())];
    leaf.prop_recursive(3, 12, 2, |t| {
        prop_oneof![
            t.clone().prop_map(Term::succ),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (t.clone(), t).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    })
}

/// Relational formulas over `P/1`, `R/2` and equality.
fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Bot),
        var().prop_map(|x| Formula::rel("P", &[x])),
        (var(), var()).prop_map(|(x, y)| Formula::rel("R", &[x, y])),
        (var(), var()).prop_map(|(x, y)| Formula::eq(Term::Var(x), Term::Var(y))),
    ];
    leaf.prop_recursive(4, 24, 2, |f| {
        prop_oneof![
            f.clone().prop_map(Formula::not),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (var(), f.clone()).prop_map(|(x, b)| Formula::forall(x, b)),
            (var(), f).prop_map(|(x, b)| Formula::exists(x, b)),
        ]
    })
}

fn structure() -> impl Strategy<Value = Structure> {
    (1u32..4).prop_flat_map(|n| {
        let cells = (n + n * n) as usize;
        proptest::collection::vec(any::<bool>(), cells).prop_map(move |bits| {
            let sig = Signature::relational("S", [("P", 1), ("R", 2)]).unwrap();
            let mut m = Structure::new(sig, n);
            let mut it = bits.into_iter();
            for a in 0..n {
                m.set("P", vec![a], it.next().unwrap());
            }
            for a in 0..n {
                for b in 0..n {
                    m.set("R", vec![a, b], it.next().unwrap());
                }
            }
            m
        })
    })
}

fn assignment(m: &Structure, seed: u32) -> Assignment {
    (0..4).map(|i| (Var(i), (seed >> (2 * i)) % m.size())).collect()
}

fn permuted(m: &Structure, shift: u32) -> Structure {
    let n = m.size();
    let f = |a: u32| (a + shift) % n;
    let mut out = Structure::new(m.signature.clone(), n);
    for (rel, _) in [("P", 1), ("R", 2)] {
        for t in m.table(rel).unwrap() {
            out.set(rel, t.iter().map(|&a| f(a)).collect(), true);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decode_inverts_encode(s in "[a-c]{0,24}") {
        let alpha = Alphabet::letters(3);
        let c = encode(&s, &alpha).unwrap();
        prop_assert_eq!(decode(&c, &alpha), s);
    }

    #[test]
    fn encode_inverts_decode(n in any::<u64>()) {
        let alpha = Alphabet::letters(4);
        let c = BigUint::from(n);
        prop_assert_eq!(encode(&decode(&c, &alpha), &alpha).unwrap(), c);
    }

    #[test]
    fn codes_respect_length(a in "[ab]{0,12}", b in "[ab]{0,12}") {
        let alpha = Alphabet::letters(2);
        let (ca, cb) = (encode(&a, &alpha).unwrap(), encode(&b, &alpha).unwrap());
        if a.len() < b.len() {
            prop_assert!(ca < cb);
        }
        prop_assert_eq!(ca == cb, a == b);
    }

    #[test]
    fn numerals_evaluate(n in any::<u64>()) {
        prop_assert_eq!(eval_closed(&numeral(n)).unwrap(), BigUint::from(n));
    }

    #[test]
    fn terms_round_trip(t in term()) {
        prop_assert_eq!(parse_term(&print_term(&t)).unwrap(), t);
    }

    #[test]
    fn formulas_round_trip(f in formula()) {
        prop_assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
    }

    #[test]
    fn codes_are_injective(f in formula(), g in formula()) {
        prop_assert_eq!(code_syntax(&f) == code_syntax(&g), f == g);
    }

    #[test]
    fn subformulas_code_below(f in formula()) {
        let c = code_syntax(&f);
        for s in f.subformulas() {
            prop_assert!(code_syntax(s) <= c);
        }
    }

    #[test]
    fn substituting_absent_variable_is_identity(f in formula(), t in term()) {
        let x = Var(7);
        prop_assert_eq!(substitute(&f, x, &t), f);
    }

    #[test]
    fn free_vars_after_substitution(f in formula(), x in var(), y in var()) {
        let g = substitute(&f, x, &Term::Var(y));
        let mut expect = f.free_vars();
        if expect.remove(&x) {
            expect.insert(y);
        }
        prop_assert_eq!(g.free_vars(), expect);
    }

    #[test]
    fn alpha_eq_survives_bound_renaming(f in formula()) {
        let fresh: BTreeMap<Var, Var> = (0..4).map(|i| (Var(i), Var(i + 10))).collect();
        let g = rename(&f, &fresh);
        prop_assert!(alpha_eq(&g, &g));
        if f.is_sentence() {
            prop_assert!(alpha_eq(&f, &g));
        }
    }

    #[test]
    fn evaluators_agree(m in structure(), f in formula(), seed in any::<u32>()) {
        let a = assignment(&m, seed);
        prop_assert_eq!(eval(&m, &f, &a).unwrap(), naive_eval(&m, &f, &a).unwrap());
    }

    #[test]
    fn substitution_lemma(m in structure(), f in formula(), x in var(), y in var(), seed in any::<u32>()) {
        let a = assignment(&m, seed);
        let mut b = a.clone();
        b.insert(x, a[&y]);
        let lhs = eval(&m, &substitute(&f, x, &Term::Var(y)), &a).unwrap();
        prop_assert_eq!(lhs, eval(&m, &f, &b).unwrap());
    }

    #[test]
    fn isomorphism_invariance(m in structure(), f in formula(), shift in 0u32..3, seed in any::<u32>()) {
        let p = permuted(&m, shift);
        prop_assert!(isomorphic(&m, &p));
        let a = assignment(&m, seed);
        let n = m.size();
        let b: Assignment = a.iter().map(|(v, e)| (*v, (e + shift) % n)).collect();
        prop_assert_eq!(eval(&m, &f, &a).unwrap(), eval(&p, &f, &b).unwrap());
    }
}

#[test]
fn corpus_proofs_round_trip_and_threshold() {
    let theories = common::theories();
    for cp in common::proofs() {
        let q = parse_proof(&pretty_proof(&cp.proof)).unwrap();
        assert_eq!(q, cp.proof, "{}", cp.name);
        check_closed(&q, &theories[&cp.theory]).unwrap();
        let n = restriction_level(&q);
        assert!(check_restricted(&q, &n).ok, "{}", cp.name);
    }
}
