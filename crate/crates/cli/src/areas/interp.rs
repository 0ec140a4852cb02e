use super::{big, formula, Build};
use crate::areas::prove::proof_and_theory;
use crate::report::{Report, Verdict};
use crate::workspace::{input_err, CliError, CliResult, Kind, Workspace};
use crate::{InterpCmd, TranslateWhat};
use workbench_core::interp::{translate_closure, translate_proof, translated_theory, verify_certificate, Notion};
use workbench_core::proof::{check_closed, pretty_proof};

pub fn run(ws: &Workspace, cmd: &InterpCmd) -> CliResult<Report> {
    let mut b = Build::new();
    match cmd {
        InterpCmd::Translate { translation, what: TranslateWhat { formula: f, theory }, save } => {
            let (k, input) = ws.translation(translation)?;
            b.input(input);
            if let Some(f) = f {
                let phi = formula("formula", f)?;
                let out = translate_closure(&k, &phi).map_err(|e| input_err("translate", e))?;
                return Ok(b.set("translated", out.to_string()).finish(Verdict::Found));
            }
            let name = theory.as_deref().expect("clap group requires one");
            let (v, input) = ws.theory(name)?;
            b.input(input);
            let u = translated_theory(&k, &v).map_err(|e| input_err("translate", e))?;
            let text = u.to_sexp_string();
            if let Some(s) = save {
                let _lock = ws.lock()?;
                let path = ws.write(Kind::Theory, s, &text)?;
                b.set("saved", path.display().to_string());
            }
            Ok(b.set("axioms", u.len()).set("theory", text).finish(Verdict::Found))
        }
        InterpCmd::TranslateProof { translation, proof, theory, save } => {
            let (k, input) = ws.translation(translation)?;
            b.input(input);
            let (p, v) = proof_and_theory(ws, &mut b, proof, theory.as_deref())?;
            let concl = match check_closed(&p, &v) {
                Ok(c) => c,
                Err(e) => return Ok(b.note(format!("source proof: {e}")).finish(Verdict::Rejected)),
            };
            let u = translated_theory(&k, &v).map_err(|e| input_err("translated theory", e))?;
            let q = match translate_proof(&k, &p) {
                Ok(q) => q,
                Err(e) => return Ok(b.note(e.to_string()).finish(Verdict::Rejected)),
            };
            b.set("source-conclusion", concl.to_string()).set("source-size", p.size()).set("target-size", q.size());
            match check_closed(&q, &u) {
                Ok(c) => {
                    let text = pretty_proof(&q);
                    if let Some(s) = save {
                        let _lock = ws.lock()?;
                        let path = ws.write(Kind::Proof, &format!("{}/{s}", u.name), &text)?;
                        b.set("saved", path.display().to_string());
                    }
                    Ok(b.set("target-conclusion", c.to_string()).finish(Verdict::Certified))
                }
                Err(e) => Ok(b.note(format!("translated proof: {e}")).finish(Verdict::Rejected)),
            }
        }
        InterpCmd::Verify { certificate, notion, x } => {
            let notion: Notion = notion.parse().map_err(CliError::Usage)?;
            let (mut c, input) = ws.certificate(certificate)?;
            b.input(input);
            if let Some(x) = x {
                c.x = big("x", x)?;
            }
            let r = verify_certificate(&c, notion);
            for f in &r.failures {
                let at = match (&f.code, f.index) {
                    (Some(code), _) => format!("axiom {code}"),
                    (None, Some(i)) => format!("theorem {i}"),
                    (None, None) => "certificate".to_string(),
                };
                b.note(format!("{at}: {}", f.reason));
            }
            b.set("notion", notion.to_string())
                .set("x", r.x.clone())
                .set("y", r.y.clone())
                .set("checked", r.checked)
                .set("statement", r.statement.clone());
            Ok(b.finish(if r.certified { Verdict::Certified } else { Verdict::Rejected }))
        }
    }
}
