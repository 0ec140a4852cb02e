//! Pseudo-lexicographic Gödel coding, efficient numerals and the growth
//! functions `|x|`, `x # y`, `omega1`.
//!
//! Strings of length `n` over an alphabet of size `a` are enumerated by
//! length first and then alphabetically; a string's code is its position.
//! This is bijective base-`a` notation with digits `1..=a`.

use crate::syntax::{Func, Term, Var};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodingError {
    #[error("symbol {0:?} at offset {1} is not in the alphabet")]
    OutsideAlphabet(char, usize),
    #[error("alphabet needs at least two symbols")]
    AlphabetTooSmall,
    #[error("symbol {0:?} listed twice")]
    DuplicateSymbol(char),
    #[error("alphabet line {0} is not a single symbol")]
    BadAlphabetLine(usize),
    #[error("result needs {needed} bits, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("variable {0} has no value")]
    Unbound(Var),
}

/// An ordered finite alphabet of characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    index: BTreeMap<char, usize>,
    /// `index` restricted to ASCII; `u8::MAX` marks absence.
    ascii: Vec<u8>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Alphabet, CodingError> {
        if symbols.len() < 2 {
            return Err(CodingError::AlphabetTooSmall);
        }
        let mut index = BTreeMap::new();
        for (i, c) in symbols.iter().enumerate() {
            if index.insert(*c, i).is_some() {
                return Err(CodingError::DuplicateSymbol(*c));
            }
        }
        let mut ascii = vec![u8::MAX; 128];
        if symbols.len() < u8::MAX as usize {
            for (c, i) in &index {
                if c.is_ascii() {
                    ascii[*c as usize] = *i as u8;
                }
            }
        }
        Ok(Alphabet { symbols, index, ascii })
    }

    /// First `a` lowercase letters.
    pub fn letters(a: usize) -> Alphabet {
        Alphabet::new((0..a as u8).map(|i| (b'a' + i) as char).collect()).expect("a >= 2")
    }

    /// Printable ASCII `0x20..=0x7E` in byte order; the alphabet for syntax.
    pub fn syntax() -> Alphabet {
        Alphabet::new((0x20u8..=0x7e).map(char::from).collect()).expect("95 symbols")
    }

    /// One symbol per line; blank lines and `#` comments are skipped, a line
    /// consisting of `space` stands for the space character.
    pub fn from_lines(text: &str) -> Result<Alphabet, CodingError> {
        let mut symbols = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim_end_matches('\r');
            if t.is_empty() || t.starts_with('#') && t.len() > 1 {
                continue;
            }
            if t == "space" {
                symbols.push(' ');
                continue;
            }
            let mut cs = t.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => symbols.push(c),
                _ => return Err(CodingError::BadAlphabetLine(i + 1)),
            }
        }
        Alphabet::new(symbols)
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn position(&self, c: char) -> Option<usize> {
        match self.ascii.get(c as usize) {
            Some(&i) if i != u8::MAX => Some(i as usize),
            _ if c.is_ascii() && self.symbols.len() < u8::MAX as usize => None,
            _ => self.index.get(&c).copied(),
        }
    }
}

/// Position of `s` in the length-then-alphabetic enumeration.
pub fn encode(s: &str, alpha: &Alphabet) -> Result<BigUint, CodingError> {
    // digits are gathered in machine words; the chunk stays below 2 * scale
    let a = alpha.size() as u64;
    let limit = u64::MAX / (4 * a);
    let mut acc = BigUint::zero();
    let (mut chunk, mut scale) = (0u64, 1u64);
    for (i, c) in s.chars().enumerate() {
        let d = alpha.position(c).ok_or(CodingError::OutsideAlphabet(c, i))? as u64;
        if scale >= limit {
            acc = acc * scale + chunk;
            (chunk, scale) = (0, 1);
        }
        chunk = chunk * a + d + 1;
        scale *= a;
    }
    Ok(acc * scale + chunk)
}

pub fn decode(code: &BigUint, alpha: &Alphabet) -> String {
    let a = BigUint::from(alpha.size());
    let mut c = code.clone();
    let mut out = Vec::new();
    while !c.is_zero() {
        c -= 1u32;
        let d = (&c % &a).to_usize().expect("digit < a");
        out.push(alpha.symbols[d]);
        c /= &a;
    }
    out.iter().rev().collect()
}

/// Number of strings of length at most `n`: `(a^(n+1) - 1) / (a - 1)`.
pub fn count_up_to(a: usize, n: u32) -> BigUint {
    let a = BigUint::from(a);
    (a.pow(n + 1) - 1u32) / (a - 1u32)
}

/// Objects with a canonical printed form over the syntax alphabet.
pub trait Syntax {
    fn render(&self) -> String;
}

impl Syntax for Term {
    fn render(&self) -> String {
        crate::sexp::print_term(self)
    }
}

impl Syntax for crate::syntax::Formula {
    fn render(&self) -> String {
        crate::sexp::print_formula(self)
    }
}

/// Code of the printed form over [`Alphabet::syntax`].
pub fn code_syntax<T: Syntax + ?Sized>(x: &T) -> BigUint {
    static SYNTAX: std::sync::OnceLock<Alphabet> = std::sync::OnceLock::new();
    encode(&x.render(), SYNTAX.get_or_init(Alphabet::syntax)).expect("printer emits printable ASCII")
}

/// The efficient numeral: `0`, `(SS0)*num(n)` for `2n`, `S((SS0)*num(n))` for `2n+1`.
pub fn numeral(n: u64) -> Term {
    if n == 0 {
        return Term::zero();
    }
    let two = Term::unary(2);
    let half = Term::mul(two, numeral(n / 2));
    if n % 2 == 0 {
        half
    } else {
        Term::succ(half)
    }
}

/// Numeral for an arbitrary-precision value.
pub fn numeral_big(n: &BigUint) -> Term {
    if n.is_zero() {
        return Term::zero();
    }
    let half = Term::mul(Term::unary(2), numeral_big(&(n >> 1u32)));
    if n.bit(0) {
        Term::succ(half)
    } else {
        half
    }
}

/// Default cap on the size of values produced by `#` and `omega1`.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// Binary length `ceil(log2(x+1))`.
pub fn len(x: &BigUint) -> u64 {
    x.bits()
}

/// `x # y = 2^(|x|*|y|)`.
pub fn smash(x: &BigUint, y: &BigUint, budget: u64) -> Result<BigUint, CodingError> {
    let e = len(x).saturating_mul(len(y));
    let needed = e.saturating_add(1);
    if needed > budget {
        return Err(CodingError::BudgetExceeded { needed, budget });
    }
    Ok(BigUint::one() << e)
}

/// `omega1(x) = 2^(|x|^2)`.
pub fn omega1(x: &BigUint, budget: u64) -> Result<BigUint, CodingError> {
    smash(x, x, budget)
}

/// Value of a term in the standard model.
pub fn eval_term(t: &Term, env: &BTreeMap<Var, BigUint>, budget: u64) -> Result<BigUint, CodingError> {
    Ok(match t {
        Term::Var(v) => env.get(v).cloned().ok_or(CodingError::Unbound(*v))?,
        Term::App(f, args) => {
            let vals = args.iter().map(|a| eval_term(a, env, budget)).collect::<Result<Vec<_>, _>>()?;
            match f {
                Func::Zero => BigUint::zero(),
                Func::Succ => &vals[0] + 1u32,
                Func::Add => &vals[0] + &vals[1],
                Func::Mul => {
                    let needed = vals[0].bits() + vals[1].bits();
                    if needed > budget {
                        return Err(CodingError::BudgetExceeded { needed, budget });
                    }
                    &vals[0] * &vals[1]
                }
                Func::Smash => smash(&vals[0], &vals[1], budget)?,
                Func::Len => BigUint::from(len(&vals[0])),
                Func::Half => &vals[0] >> 1u32,
            }
        }
    })
}

/// Value of a closed term.
pub fn eval_closed(t: &Term) -> Result<BigUint, CodingError> {
    eval_term(t, &BTreeMap::new(), DEFAULT_BIT_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_term;

    fn brute_force(a: usize, max_len: usize) -> Vec<String> {
        let alpha = Alphabet::letters(a);
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &layer {
                for c in alpha.symbols() {
                    next.push(format!("{s}{c}"));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn encode_matches_enumeration() {
        for a in [2, 3] {
            let alpha = Alphabet::letters(a);
            for (i, s) in brute_force(a, 4).iter().enumerate() {
                assert_eq!(encode(s, &alpha).unwrap(), BigUint::from(i), "{s}");
                assert_eq!(decode(&BigUint::from(i), &alpha), *s);
            }
        }
    }

    #[test]
    fn cab_over_three_letters() {
        let alpha = Alphabet::letters(3);
        let pos = brute_force(3, 3).iter().position(|s| s == "cab").unwrap();
        assert_eq!(encode("cab", &alpha).unwrap(), BigUint::from(pos));
    }

    #[test]
    fn short_binary_strings_fill_fifteen_codes() {
        assert_eq!(count_up_to(2, 3), BigUint::from(15u32));
        let alpha = Alphabet::letters(2);
        assert_eq!(encode("bbb", &alpha).unwrap(), BigUint::from(14u32));
        assert_eq!(decode(&BigUint::from(1u32), &alpha), "a");
    }

    #[test]
    fn rejects_foreign_symbol() {
        assert_eq!(encode("abz", &Alphabet::letters(2)), Err(CodingError::OutsideAlphabet('z', 2)));
    }

    #[test]
    fn alphabet_file() {
        let a = Alphabet::from_lines("a\nb\nspace\n").unwrap();
        assert_eq!(a.symbols(), &['a', 'b', ' ']);
        assert!(Alphabet::from_lines("a\n").is_err());
        assert!(Alphabet::from_lines("a\na\n").is_err());
        assert!(Alphabet::from_lines("ab\nc\n").is_err());
    }

    #[test]
    fn numerals() {
        assert_eq!(numeral(0), Term::zero());
        assert_eq!(numeral(2), parse_term("(* (S (S 0)) (S (* (S (S 0)) 0)))").unwrap());
        for n in 0..300u64 {
            assert_eq!(eval_closed(&numeral(n)).unwrap(), BigUint::from(n));
            assert_eq!(numeral_big(&BigUint::from(n)), numeral(n));
        }
    }

    #[test]
    fn growth_functions() {
        assert_eq!(len(&BigUint::from(0u32)), 0);
        assert_eq!(len(&BigUint::from(1u32)), 1);
        assert_eq!(len(&BigUint::from(7u32)), 3);
        for x in 1..100u32 {
            let x = BigUint::from(x);
            assert_eq!(smash(&x, &BigUint::one(), DEFAULT_BIT_BUDGET).unwrap(), BigUint::one() << len(&x));
        }
        let big = BigUint::one() << 2000u32;
        assert!(matches!(omega1(&big, DEFAULT_BIT_BUDGET), Err(CodingError::BudgetExceeded { .. })));
    }
}
