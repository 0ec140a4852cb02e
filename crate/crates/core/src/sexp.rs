//! S-expression reader and printer for terms and formulas.
//!
//! Grammar (whitespace separated, `;` starts a line comment):
//!
//! ```text
//! term    ::= var | 0 | (S term) | (+ term term) | (* term term)
//!           | (# term term) | (len term) | (half term) | (num N)
//! formula ::= bot | R | (R term*) | (not f) | (and f f+) | (or f f+)
//!           | (-> f f+) | (forall var f) | (exists var f)
//!           | (ball var term f)    ; forall var < term
//!           | (bex var term f)     ; exists var < term
//!           | (sball var term f)   ; forall var < |term|
//!           | (sbex var term f)    ; exists var < |term|
//! var     ::= x | y | z | u | v | w | x[12]*
//! ```
//!
//! Variables are canonical indices: `x y z u v w` name 0 to 5 and `x` followed
//! by dyadic digits names any index (`x` is 0, `x1` is 1, `x2` is 2, `x11` is 3,
//! ...). Relation symbols start with an uppercase letter or are one of `=`,
//! `<`, `<=`. `(num N)` is read as the efficient numeral of `N`. N-ary `and`,
//! `or` and `->` nest to the right.

use crate::syntax::{BoundKind, Conn, Formula, Func, Quant, Signature, Term, Var, EQ, LE, LT};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExp {
    Atom(String, Pos),
    List(Vec<SExp>, Pos),
}

impl SExp {
    pub fn pos(&self) -> &Pos {
        match self {
            SExp::Atom(_, p) | SExp::List(_, p) => p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExp::Atom(s, _) => Some(s),
            SExp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExp]> {
        match self {
            SExp::List(xs, _) => Some(xs),
            SExp::Atom(..) => None,
        }
    }

    /// Head symbol of a list, if it is an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|xs| xs.first()).and_then(SExp::as_atom)
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Atom(s, _) => f.write_str(s),
            SExp::List(xs, _) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: &Pos, msg: impl Into<String>) -> ParseError {
        ParseError { pos: pos.clone(), msg: msg.into() }
    }
}

/// Reads every top-level s-expression in `src`.
pub fn read_all(src: &str) -> Result<Vec<SExp>, ParseError> {
    let mut reader = Reader { chars: src.chars().collect(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        reader.skip_ws();
        if reader.i >= reader.chars.len() {
            return Ok(out);
        }
        out.push(reader.read()?);
    }
}

/// Reads exactly one s-expression.
pub fn read_one(src: &str) -> Result<SExp, ParseError> {
    let mut all = read_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(ParseError::new(&Pos { line: 1, col: 1 }, "empty input")),
        _ => Err(ParseError::new(all[1].pos(), "trailing input after expression")),
    }
}

struct Reader {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Reader {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.i];
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while self.i < self.chars.len() {
            let c = self.chars[self.i];
            if c == ';' {
                while self.i < self.chars.len() && self.chars[self.i] != '\n' {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<SExp, ParseError> {
        self.skip_ws();
        let start = self.pos();
        if self.i >= self.chars.len() {
            return Err(ParseError::new(&start, "unexpected end of input"));
        }
        match self.chars[self.i] {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    if self.i >= self.chars.len() {
                        return Err(ParseError::new(&start, "unclosed parenthesis"));
                    }
                    if self.chars[self.i] == ')' {
                        self.bump();
                        return Ok(SExp::List(items, start));
                    }
                    items.push(self.read()?);
                }
            }
            ')' => Err(ParseError::new(&start, "unexpected `)`")),
            _ => {
                let mut s = String::new();
                while self.i < self.chars.len() {
                    let c = self.chars[self.i];
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(self.bump());
                }
                Ok(SExp::Atom(s, start))
            }
        }
    }
}

const LETTERS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// Dyadic digits (alphabet `1`, `2`) of `n`; empty for zero.
pub fn dyadic(mut n: u64) -> String {
    let mut digits = Vec::new();
    while n > 0 {
        if n % 2 == 1 {
            digits.push('1');
            n = (n - 1) / 2;
        } else {
            digits.push('2');
            n = (n - 2) / 2;
        }
    }
    digits.iter().rev().collect()
}

fn undyadic(s: &str) -> Option<u64> {
    s.chars().try_fold(0u64, |acc, c| {
        let d = match c {
            '1' => 1,
            '2' => 2,
            _ => return None,
        };
        acc.checked_mul(2)?.checked_add(d)
    })
}

pub fn var_name(v: Var) -> String {
    match LETTERS.get(v.0 as usize) {
        Some(l) => l.to_string(),
        None => format!("x{}", dyadic(v.0 as u64)),
    }
}

pub fn parse_var_name(s: &str) -> Option<Var> {
    if let Some(i) = LETTERS.iter().position(|l| *l == s) {
        return Some(Var(i as u32));
    }
    let rest = s.strip_prefix('x')?;
    undyadic(rest).and_then(|n| u32::try_from(n).ok()).map(Var)
}

const KEYWORDS: [&str; 11] = ["bot", "not", "and", "or", "->", "forall", "exists", "ball", "bex", "sball", "sbex"];

fn is_relation_name(s: &str) -> bool {
    if s == EQ || s == LT || s == LE {
        return true;
    }
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_ascii_uppercase() => {
            s != "S" && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        }
        _ => false,
    }
}

pub fn term_from_sexp(e: &SExp) -> Result<Term, ParseError> {
    match e {
        SExp::Atom(s, p) => {
            if s == "0" {
                return Ok(Term::zero());
            }
            parse_var_name(s)
                .map(Term::Var)
                .ok_or_else(|| ParseError::new(p, format!("`{s}` is not a variable or constant")))
        }
        SExp::List(xs, p) => {
            let head = xs.first().and_then(SExp::as_atom).ok_or_else(|| ParseError::new(p, "expected function symbol"))?;
            if head == "num" {
                let n = xs
                    .get(1)
                    .and_then(SExp::as_atom)
                    .and_then(|s| s.parse::<u64>().ok())
                    .filter(|_| xs.len() == 2)
                    .ok_or_else(|| ParseError::new(p, "`num` takes one decimal literal"))?;
                return Ok(crate::coding::numeral(n));
            }
            let f = Func::from_symbol(head).ok_or_else(|| ParseError::new(p, format!("unknown function symbol `{head}`")))?;
            if xs.len() - 1 != f.arity() {
                return Err(ParseError::new(
                    p,
                    format!("function `{head}` has arity {}, got {} arguments", f.arity(), xs.len() - 1),
                ));
            }
            let args = xs[1..].iter().map(term_from_sexp).collect::<Result<Vec<_>, _>>()?;
            Ok(Term::App(f, args))
        }
    }
}

/// Converts an s-expression to a formula, checking it against `sig` when
/// given.
pub fn formula_from_sexp(e: &SExp, sig: Option<&Signature>) -> Result<Formula, ParseError> {
    match e {
        SExp::Atom(s, p) => {
            if s == "bot" {
                Ok(Formula::Bot)
            } else if is_relation_name(s) {
                make_atom(s, vec![], p, sig)
            } else {
                Err(ParseError::new(p, format!("expected formula, found `{s}`")))
            }
        }
        SExp::List(xs, p) => {
            let head = xs.first().and_then(SExp::as_atom).ok_or_else(|| ParseError::new(p, "expected formula head"))?;
            let args = &xs[1..];
            let arity_err = |n: &str| ParseError::new(p, format!("`{head}` expects {n}"));
            match head {
                "bot" => Err(arity_err("no arguments; write `bot`")),
                "not" => {
                    if args.len() != 1 {
                        return Err(arity_err("one argument"));
                    }
                    Ok(Formula::not(formula_from_sexp(&args[0], sig)?))
                }
                "and" | "or" | "->" => {
                    if args.len() < 2 {
                        return Err(arity_err("at least two arguments"));
                    }
                    let conn = match head {
                        "and" => Conn::And,
                        "or" => Conn::Or,
                        _ => Conn::Imp,
                    };
                    let mut fs = args.iter().map(|a| formula_from_sexp(a, sig)).collect::<Result<Vec<_>, _>>()?;
                    let mut acc = fs.pop().unwrap();
                    while let Some(f) = fs.pop() {
                        acc = Formula::Bin(conn, Box::new(f), Box::new(acc));
                    }
                    Ok(acc)
                }
                "forall" | "exists" => {
                    if args.len() != 2 {
                        return Err(arity_err("a variable and a body"));
                    }
                    let v = var_of(&args[0])?;
                    let body = formula_from_sexp(&args[1], sig)?;
                    Ok(if head == "forall" { Formula::forall(v, body) } else { Formula::exists(v, body) })
                }
                "ball" | "bex" | "sball" | "sbex" => {
                    if args.len() != 3 {
                        return Err(arity_err("a variable, a bound term and a body"));
                    }
                    if let Some(sig) = sig {
                        if !sig.is_arithmetic() {
                            return Err(ParseError::new(p, "bounded quantifiers need the arithmetic signature"));
                        }
                    }
                    let v = var_of(&args[0])?;
                    let t = term_from_sexp(&args[1])?;
                    if t.contains_var(v) {
                        return Err(ParseError::new(args[1].pos(), "bound term mentions the bound variable"));
                    }
                    let body = formula_from_sexp(&args[2], sig)?;
                    let q = if head.ends_with("ball") { Quant::Forall } else { Quant::Exists };
                    let kind = if head.starts_with('s') { BoundKind::Sharp } else { BoundKind::Plain };
                    Ok(Formula::bounded(q, v, kind, t, body))
                }
                r if is_relation_name(r) => {
                    let terms = args.iter().map(term_from_sexp).collect::<Result<Vec<_>, _>>()?;
                    make_atom(r, terms, p, sig)
                }
                other => Err(ParseError::new(p, format!("unknown connective or relation `{other}`"))),
            }
        }
    }
}

fn make_atom(r: &str, terms: Vec<Term>, p: &Pos, sig: Option<&Signature>) -> Result<Formula, ParseError> {
    if let Some(sig) = sig {
        match sig.arity(r) {
            None => return Err(ParseError::new(p, format!("relation `{r}` not in signature `{}`", sig.name))),
            Some(n) if n != terms.len() => {
                return Err(ParseError::new(p, format!("relation `{r}` has arity {n}, got {} arguments", terms.len())))
            }
            _ => {}
        }
        if !sig.is_arithmetic() && terms.iter().any(Term::uses_functions) {
            return Err(ParseError::new(p, "function symbols need the arithmetic signature"));
        }
    } else if r == EQ && terms.len() != 2 {
        return Err(ParseError::new(p, "identity is binary"));
    }
    Ok(Formula::Atom(r.to_string(), terms))
}

fn var_of(e: &SExp) -> Result<Var, ParseError> {
    let s = e.as_atom().ok_or_else(|| ParseError::new(e.pos(), "expected variable"))?;
    if KEYWORDS.contains(&s) {
        return Err(ParseError::new(e.pos(), format!("`{s}` is a keyword")));
    }
    parse_var_name(s).ok_or_else(|| ParseError::new(e.pos(), format!("`{s}` is not a variable name")))
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    formula_from_sexp(&read_one(src)?, None)
}

pub fn parse_formula_in(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    formula_from_sexp(&read_one(src)?, Some(sig))
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    term_from_sexp(&read_one(src)?)
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(t, &mut s);
    s
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(&var_name(*v)),
        Term::App(Func::Zero, _) => out.push('0'),
        Term::App(f, args) => {
            out.push('(');
            out.push_str(f.symbol());
            for a in args {
                out.push(' ');
                write_term(a, out);
            }
            out.push(')');
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, &mut s);
    s
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Bot => out.push_str("bot"),
        Formula::Atom(r, args) => {
            out.push('(');
            out.push_str(r);
            for a in args {
                out.push(' ');
                write_term(a, out);
            }
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(g, out);
            out.push(')');
        }
        Formula::Bin(c, a, b) => {
            out.push_str(match c {
                Conn::And => "(and ",
                Conn::Or => "(or ",
                Conn::Imp => "(-> ",
            });
            write_formula(a, out);
            out.push(' ');
            write_formula(b, out);
            out.push(')');
        }
        Formula::Quant { q, var, bound, body } => {
            let head = match (q, bound.as_ref().map(|b| b.kind)) {
                (Quant::Forall, None) => "forall",
                (Quant::Exists, None) => "exists",
                (Quant::Forall, Some(BoundKind::Plain)) => "ball",
                (Quant::Exists, Some(BoundKind::Plain)) => "bex",
                (Quant::Forall, Some(BoundKind::Sharp)) => "sball",
                (Quant::Exists, Some(BoundKind::Sharp)) => "sbex",
            };
            out.push('(');
            out.push_str(head);
            out.push(' ');
            out.push_str(&var_name(*var));
            if let Some(b) = bound {
                out.push(' ');
                write_term(&b.term, out);
            }
            out.push(' ');
            write_formula(body, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_names_round_trip() {
        for i in 0..500u32 {
            let name = var_name(Var(i));
            assert_eq!(parse_var_name(&name), Some(Var(i)), "{name}");
            let canonical = format!("x{}", dyadic(i as u64));
            assert_eq!(parse_var_name(&canonical), Some(Var(i)));
        }
        assert_eq!(dyadic(0), "");
        assert_eq!(dyadic(5), "21");
        assert_eq!(parse_var_name("x3"), None);
    }

    #[test]
    fn parses_and_prints() {
        let src = "(forall x (-> (D x) (P x)))";
        let f = parse_formula(src).unwrap();
        assert_eq!(print_formula(&f), src);
        let g = parse_formula("(ball x (S y) (bex z (+ x y) (= z x)))").unwrap();
        assert_eq!(parse_formula(&print_formula(&g)).unwrap(), g);
    }

    #[test]
    fn nary_connectives_nest_right() {
        let f = parse_formula("(and P Q R)").unwrap();
        assert_eq!(f, parse_formula("(and P (and Q R))").unwrap());
    }

    #[test]
    fn arity_errors_carry_positions() {
        let sig = Signature::relational("T", [("P", 1)]).unwrap();
        let err = parse_formula_in("(forall x\n  (P x x))", &sig).unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 3 });
        assert!(err.msg.contains("arity"));
        let err = parse_formula_in("(Q x)", &sig).unwrap_err();
        assert!(err.msg.contains("not in signature"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_formula("(and P").is_err());
        assert!(parse_formula("(forall 0 P)").is_err());
        assert!(parse_formula("(ball x x (P x))").is_err());
        assert!(parse_formula("(P x) (Q x)").is_err());
        assert!(parse_formula("(S x)").is_err());
    }
}
