//! Metamathematics workbench: first-order syntax, Gödel coding, natural
//! deduction, relative interpretations, definable cuts, finite models and a
//! desk-scale Henkin completion.

pub mod arith;
pub mod classify;
pub mod coding;
pub mod cut;
pub mod henkin;
pub mod interp;
pub mod model;
pub mod proof;
pub mod search;
pub mod sexp;
pub mod subst;
pub mod syntax;
pub mod theory;

pub use classify::{classify, rho, FormulaClass};
pub use syntax::{Formula, Signature, Term, Var};
