use super::{big, Build};
use crate::report::{Report, Verdict};
use crate::workspace::{input_err, CliResult, Kind, Workspace};
use crate::CodeCmd;
use workbench_core::coding::{decode, encode, eval_closed, numeral_big, smash, Alphabet, CodingError};
use workbench_core::sexp::print_term;

fn alphabet(ws: &Workspace, b: &mut Build, name: Option<&str>) -> CliResult<Alphabet> {
    match name {
        None => Ok(Alphabet::syntax()),
        Some(n) => {
            let (text, input) = ws.text(Kind::Artifact, n)?;
            b.input(input);
            Alphabet::from_lines(&text).map_err(|e| input_err(n, e))
        }
    }
}

pub fn run(ws: &Workspace, cmd: &CodeCmd) -> CliResult<Report> {
    let mut b = Build::new();
    match cmd {
        CodeCmd::Encode { text, alphabet: a } => {
            let alpha = alphabet(ws, &mut b, a.as_deref())?;
            let code = encode(text, &alpha).map_err(|e| input_err("text", e))?;
            Ok(b.set("code", code.to_string()).set("bits", code.bits()).finish(Verdict::Found))
        }
        CodeCmd::Decode { code, alphabet: a } => {
            let alpha = alphabet(ws, &mut b, a.as_deref())?;
            let text = decode(&big("code", code)?, &alpha);
            Ok(b.set("text", text).finish(Verdict::Found))
        }
        CodeCmd::Numeral { n } => {
            let n = big("n", n)?;
            let t = numeral_big(&n);
            let shown = print_term(&t);
            let back = eval_closed(&t).map_err(|e| input_err("numeral", e))?;
            debug_assert_eq!(back, n);
            Ok(b.set("numeral", shown.clone()).set("length", shown.len()).set("bits", n.bits()).finish(Verdict::Found))
        }
        CodeCmd::Smash { x, y } => {
            let (x, y) = (big("x", x)?, big("y", y)?);
            match smash(&x, &y, ws.config.smash_bits) {
                Ok(v) => Ok(b.set("value", v.to_string()).set("bits", v.bits()).finish(Verdict::Found)),
                Err(CodingError::BudgetExceeded { needed, budget }) => Ok(b
                    .note(format!("needs {needed} bits, budget smash-bits={budget}"))
                    .finish(Verdict::Exhausted)),
                Err(e) => Err(input_err("smash", e)),
            }
        }
    }
}
