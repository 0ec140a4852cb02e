//! Syntactic formula classes and the quantifier-alternation measure `rho`.

use crate::syntax::{BoundKind, Conn, Formula, Quant};
use serde::{Deserialize, Serialize};

/// Formula classes, listed in the order used to pick the least class.
///
/// `Delta0` is the sharply bounded class: no unbounded quantifier and every
/// bounded quantifier of the form `x < |t|`. `Sigma1b` adds bounded
/// existential quantification, `Pi1b` dually. `AllPi1b` is a block of
/// unbounded universals over a `Pi1b` matrix. `Sigma1`/`Pi1` are an
/// unbounded existential/universal block over a matrix with only bounded
/// quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FormulaClass {
    Delta0,
    Sigma1b,
    Pi1b,
    AllPi1b,
    Sigma1,
    Pi1,
    Unclassified,
}

fn no_unbounded(f: &Formula) -> bool {
    f.subformulas().iter().all(|g| !matches!(g, Formula::Quant { bound: None, .. }))
}

fn sharply_bounded_only(f: &Formula) -> bool {
    f.subformulas().iter().all(|g| match g {
        Formula::Quant { bound: None, .. } => false,
        Formula::Quant { bound: Some(b), .. } => b.kind == BoundKind::Sharp,
        _ => true,
    })
}

/// Checks that every plain-bounded quantifier acts as `want` once polarity is
/// taken into account, and that there are no unbounded quantifiers.
fn bounded_with_polarity(f: &Formula, positive: bool, want: Quant) -> bool {
    match f {
        Formula::Bot | Formula::Atom(..) => true,
        Formula::Not(g) => bounded_with_polarity(g, !positive, want),
        Formula::Bin(Conn::Imp, a, b) => {
            bounded_with_polarity(a, !positive, want) && bounded_with_polarity(b, positive, want)
        }
        Formula::Bin(_, a, b) => bounded_with_polarity(a, positive, want) && bounded_with_polarity(b, positive, want),
        Formula::Quant { q, bound, body, .. } => match bound {
            None => false,
            Some(b) => {
                let effective = if positive { *q } else { q.dual() };
                (b.kind == BoundKind::Sharp || effective == want) && bounded_with_polarity(body, positive, want)
            }
        },
    }
}

fn strip_unbounded(f: &Formula, q: Quant) -> (usize, &Formula) {
    let mut n = 0;
    let mut cur = f;
    while let Formula::Quant { q: q2, bound: None, body, .. } = cur {
        if *q2 != q {
            break;
        }
        n += 1;
        cur = body;
    }
    (n, cur)
}

/// Every class that syntactically contains `f`, in class order.
pub fn memberships(f: &Formula) -> Vec<FormulaClass> {
    let mut out = Vec::new();
    let delta0 = sharply_bounded_only(f);
    let sigma1b = bounded_with_polarity(f, true, Quant::Exists);
    let pi1b = bounded_with_polarity(f, true, Quant::Forall);
    if delta0 {
        out.push(FormulaClass::Delta0);
    }
    if sigma1b {
        out.push(FormulaClass::Sigma1b);
    }
    if pi1b {
        out.push(FormulaClass::Pi1b);
    }
    let (_, m) = strip_unbounded(f, Quant::Forall);
    if bounded_with_polarity(m, true, Quant::Forall) {
        out.push(FormulaClass::AllPi1b);
    }
    let (_, m) = strip_unbounded(f, Quant::Exists);
    if no_unbounded(m) {
        out.push(FormulaClass::Sigma1);
    }
    let (_, m) = strip_unbounded(f, Quant::Forall);
    if no_unbounded(m) {
        out.push(FormulaClass::Pi1);
    }
    out
}

/// The least class containing `f`.
pub fn classify(f: &Formula) -> FormulaClass {
    memberships(f).first().copied().unwrap_or(FormulaClass::Unclassified)
}

/// Alternation profile of a formula: `rho` itself, and the value obtained
/// by putting a universal (`under_forall`) or existential (`under_exists`)
/// block on top.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Profile {
    rho: usize,
    under_forall: usize,
    under_exists: usize,
}

fn profile(f: &Formula) -> Profile {
    match f {
        Formula::Bot | Formula::Atom(..) => Profile { rho: 0, under_forall: 1, under_exists: 1 },
        Formula::Not(g) => {
            let p = profile(g);
            Profile { rho: p.rho, under_forall: p.under_exists, under_exists: p.under_forall }
        }
        Formula::Bin(Conn::Imp, a, b) => {
            let (pa, pb) = (profile(a), profile(b));
            Profile {
                rho: pa.rho.max(pb.rho),
                under_forall: pa.under_exists.max(pb.under_forall),
                under_exists: pa.under_forall.max(pb.under_exists),
            }
        }
        Formula::Bin(_, a, b) => {
            let (pa, pb) = (profile(a), profile(b));
            Profile {
                rho: pa.rho.max(pb.rho),
                under_forall: pa.under_forall.max(pb.under_forall),
                under_exists: pa.under_exists.max(pb.under_exists),
            }
        }
        Formula::Quant { q: Quant::Forall, body, .. } => {
            let p = profile(body);
            Profile { rho: p.under_forall, under_forall: p.under_forall, under_exists: p.under_forall + 1 }
        }
        Formula::Quant { q: Quant::Exists, body, .. } => {
            let p = profile(body);
            Profile { rho: p.under_exists, under_forall: p.under_exists + 1, under_exists: p.under_exists }
        }
    }
}

/// Quantifier-alternation complexity.
///
/// Zero on quantifier-free formulas; a maximal block of like quantifiers
/// counts once and each alternation adds one. Negation flips polarity, so
/// `not (exists x P)` counts as a universal block, and the antecedent of an
/// implication is read with flipped polarity. Bounded quantifiers count like
/// unbounded ones. This is a working stand-in for the measure in the
/// literature; any measure with the same stability properties would do.
pub fn rho(f: &Formula) -> usize {
    profile(f).rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn atoms_are_delta0() {
        assert_eq!(classify(&p("(= x y)")), FormulaClass::Delta0);
        assert_eq!(classify(&p("(sball x y (P x))")), FormulaClass::Delta0);
    }

    #[test]
    fn bounded_existential_is_sigma1b() {
        assert_eq!(classify(&p("(bex z y (P z x))")), FormulaClass::Sigma1b);
        assert_eq!(classify(&p("(ball z y (P z x))")), FormulaClass::Pi1b);
        assert_eq!(classify(&p("(not (ball z y (P z x)))")), FormulaClass::Sigma1b);
    }

    #[test]
    fn unbounded_prefixes() {
        assert_eq!(classify(&p("(forall x (bex y x (R x y)))")), FormulaClass::Pi1);
        assert_eq!(classify(&p("(forall x (ball y x (R x y)))")), FormulaClass::AllPi1b);
        assert_eq!(classify(&p("(exists x (ball y x (bex z x (R y z))))")), FormulaClass::Sigma1);
        assert_eq!(classify(&p("(forall x (exists y (R x y)))")), FormulaClass::Unclassified);
    }

    #[test]
    fn delta0_is_in_sigma1_and_pi1() {
        let m = memberships(&p("(ball y x (bex z x (R y z)))"));
        assert!(m.contains(&FormulaClass::Sigma1) && m.contains(&FormulaClass::Pi1));
        let m = memberships(&p("(= x y)"));
        assert!(m.contains(&FormulaClass::Sigma1) && m.contains(&FormulaClass::Pi1));
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(&p("(R x y)")), 0);
        assert_eq!(rho(&p("(forall x (exists y (R x y)))")), 2);
        assert_eq!(rho(&p("(forall x (forall y (R x y)))")), 1);
        assert_eq!(rho(&p("(not (exists x (forall y (R x y))))")), 2);
        assert_eq!(rho(&p("(forall x (not (exists y (R x y))))")), 1);
        assert_eq!(rho(&p("(-> (exists x (P x)) (forall y (P y)))")), 1);
        assert_eq!(rho(&p("(forall z (-> (forall x (P x)) (P z)))")), 2);
    }
}
