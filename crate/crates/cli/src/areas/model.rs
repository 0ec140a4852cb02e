use super::{formula, Build};
use crate::report::{Report, Verdict};
use crate::workspace::{input_err, CliResult, Kind, Workspace};
use crate::ModelCmd;
use workbench_core::model::{eval_sentence, find_model, internal_model};

pub fn run(ws: &Workspace, cmd: &ModelCmd) -> CliResult<Report> {
    let mut b = Build::new();
    match cmd {
        ModelCmd::Eval { structure, formula: f } => {
            let (m, input) = ws.structure(structure)?;
            b.input(input);
            let phi = formula("formula", f)?;
            let truth = eval_sentence(&m, &phi).map_err(|e| input_err("eval", e))?;
            Ok(b.set("size", m.size()).set("true", truth).finish(if truth {
                Verdict::Certified
            } else {
                Verdict::Rejected
            }))
        }
        ModelCmd::Internal { structure, translation, save } => {
            let (m, input) = ws.structure(structure)?;
            b.input(input);
            let (k, input) = ws.translation(translation)?;
            b.input(input);
            let im = internal_model(&m, &k).map_err(|e| input_err("internal model", e))?;
            b.set("classes", serde_json::to_value(&im.classes).unwrap());
            if !im.violations.is_empty() {
                for v in &im.violations {
                    b.note(v.clone());
                }
                return Ok(b.finish(Verdict::Rejected));
            }
            if let Some(s) = save {
                let _lock = ws.lock()?;
                let path = ws.write(Kind::Structure, s, &im.structure.to_json())?;
                b.set("saved", path.display().to_string());
            }
            Ok(b.set("size", im.structure.size()).finish(Verdict::Found))
        }
        ModelCmd::Find { theory, max_domain, save } => {
            let (t, input) = ws.theory(theory)?;
            b.input(input);
            let bound = max_domain.unwrap_or(ws.config.max_domain);
            b.set("max-domain", bound);
            match find_model(&t, bound) {
                Some(m) => {
                    if let Some(s) = save {
                        let _lock = ws.lock()?;
                        let path = ws.write(Kind::Structure, s, &m.to_json())?;
                        b.set("saved", path.display().to_string());
                    }
                    Ok(b.set("size", m.size()).set("structure", serde_json::from_str::<serde_json::Value>(&m.to_json()).unwrap()).finish(Verdict::Found))
                }
                None => Ok(b.note(format!("no model with at most {bound} elements")).finish(Verdict::NoneFound)),
            }
        }
    }
}
