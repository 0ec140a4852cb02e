use super::{big, Build};
use crate::report::{Report, Verdict};
use crate::workspace::{input_err, CliResult, Kind, Workspace};
use crate::HenkinCmd;
use num_bigint::BigUint;
use workbench_core::henkin::{
    bound_for_length, henkin_complete, interpretation_from_model, restrict, term_model, FiniteModelOracle, HenkinError,
    HenkinState,
};
use workbench_core::interp::{verify_certificate, Certificate, Notion};

pub(crate) fn bound(ws: &Workspace, flag: Option<&str>) -> CliResult<BigUint> {
    match flag {
        Some(s) => big("bound", s),
        None => Ok(bound_for_length(ws.config.bound_length)),
    }
}

pub(crate) fn oracle(ws: &Workspace, domain: Option<u32>) -> FiniteModelOracle {
    let mut o = FiniteModelOracle::new(domain.unwrap_or(ws.config.oracle_domain));
    o.max_queries = ws.config.max_queries;
    o
}

/// Term model reduct and its certificate, checked at `sa`.
pub(crate) fn certify(state: &HenkinState) -> Result<Certificate, HenkinError> {
    let tm = term_model(state)?;
    let reduct = restrict(&tm.structure, &state.base.signature);
    interpretation_from_model(&reduct, &state.base)
}

pub fn run(ws: &Workspace, cmd: &HenkinCmd) -> CliResult<Report> {
    let mut b = Build::new();
    match cmd {
        HenkinCmd::Run { theory, bound: bf, oracle_domain, save } => {
            let (v, input) = ws.theory(theory)?;
            b.input(input);
            let bnd = bound(ws, bf.as_deref())?;
            let mut o = oracle(ws, *oracle_domain);
            b.set("bound", bnd.to_string());
            let s = match henkin_complete(&v, &bnd, &mut o) {
                Ok(s) => s,
                Err(e @ HenkinError::BaseRejected(_)) => return Ok(b.note(e.to_string()).finish(Verdict::Rejected)),
                Err(e @ HenkinError::BaseInconclusive(_)) => return Ok(b.note(e.to_string()).finish(Verdict::Exhausted)),
                Err(e) => return Err(input_err("henkin", e)),
            };
            let _lock = ws.lock()?;
            let path = ws.write(Kind::State, save.as_deref().unwrap_or(&v.name), &s.to_json())?;
            b.set("saved", path.display().to_string())
                .set("oracle", s.oracle.clone())
                .set("witnesses", s.witnesses.len())
                .set("accepted", s.w.len())
                .set("queries", s.transcript.len());
            match &s.truncated {
                Some(why) => Ok(b.note(format!("truncated: {why}")).finish(Verdict::Exhausted)),
                None => Ok(b.finish(Verdict::Found)),
            }
        }
        HenkinCmd::Model { state, save } => {
            let (s, input) = ws.state(state)?;
            b.input(input);
            match term_model(&s) {
                Ok(tm) => {
                    if let Some(name) = save {
                        let _lock = ws.lock()?;
                        let path = ws.write(Kind::Structure, name, &tm.structure.to_json())?;
                        b.set("saved", path.display().to_string());
                    }
                    Ok(b.set("size", tm.structure.size())
                        .set("classes", serde_json::to_value(&tm.classes).unwrap())
                        .finish(Verdict::Found))
                }
                Err(e @ HenkinError::Truncated { .. }) => Ok(b.note(e.to_string()).finish(Verdict::Exhausted)),
                Err(e) => Err(input_err("term model", e)),
            }
        }
        HenkinCmd::Certify { state, save } => {
            let (s, input) = ws.state(state)?;
            b.input(input);
            let c = match certify(&s) {
                Ok(c) => c,
                Err(e @ HenkinError::Truncated { .. }) => return Ok(b.note(e.to_string()).finish(Verdict::Exhausted)),
                Err(e) => return Ok(b.note(e.to_string()).finish(Verdict::Rejected)),
            };
            let r = verify_certificate(&c, Notion::Sa);
            for f in &r.failures {
                b.note(f.reason.clone());
            }
            if r.certified {
                let _lock = ws.lock()?;
                let dir = ws.save_path(Kind::Certificate, save.as_deref().unwrap_or(&s.base.name));
                c.save_bundle(&dir).map_err(|e| input_err(dir.display(), e))?;
                b.set("saved", dir.display().to_string());
            }
            b.set("x", r.x.clone()).set("checked", r.checked).set("statement", r.statement.clone());
            Ok(b.finish(if r.certified { Verdict::Certified } else { Verdict::Rejected }))
        }
    }
}
