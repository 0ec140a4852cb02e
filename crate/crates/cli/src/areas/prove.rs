use super::{big, Build};
use crate::report::{Report, Verdict};
use crate::workspace::{CliError, CliResult, Kind, Workspace};
use crate::ProveCmd;
use workbench_core::proof::{check_closed, check_restricted, pretty_proof, restriction_level, Proof};
use workbench_core::search::{search_refutation, SearchBudget, SearchOutcome};
use workbench_core::theory::TheorySpec;

/// Loads a proof with its theory: `--theory`, else the proof's directory.
pub(crate) fn proof_and_theory(
    ws: &Workspace,
    b: &mut Build,
    proof: &str,
    theory: Option<&str>,
) -> CliResult<(Proof, TheorySpec)> {
    let (p, owner, input) = ws.proof(proof)?;
    b.input(input);
    let name = theory
        .map(str::to_string)
        .or(owner)
        .ok_or_else(|| CliError::Usage(format!("proof `{proof}` is outside proofs/<theory>/; pass --theory")))?;
    let (t, input) = ws.theory(&name)?;
    b.input(input);
    Ok((p, t))
}

pub fn run(ws: &Workspace, cmd: &ProveCmd) -> CliResult<Report> {
    let mut b = Build::new();
    match cmd {
        ProveCmd::Check { proof, theory } => {
            let (p, t) = proof_and_theory(ws, &mut b, proof, theory.as_deref())?;
            b.set("size", p.size());
            match check_closed(&p, &t) {
                Ok(c) => Ok(b
                    .set("conclusion", c.to_string())
                    .set("restriction-level", restriction_level(&p).to_string())
                    .finish(Verdict::Certified)),
                Err(e) => Ok(b.note(e.to_string()).finish(Verdict::Rejected)),
            }
        }
        ProveCmd::CheckRestricted { proof, n, theory } => {
            let n = big("n", n)?;
            let (p, t) = proof_and_theory(ws, &mut b, proof, theory.as_deref())?;
            if let Err(e) = check_closed(&p, &t) {
                return Ok(b.note(e.to_string()).finish(Verdict::Rejected));
            }
            let r = check_restricted(&p, &n);
            b.set("n", n.to_string())
                .set("max-axiom-code", r.max_axiom_code.map(|c| c.to_string()))
                .set("max-rho", r.max_rho);
            for (path, why) in &r.offending {
                b.note(format!("node {path:?}: {why}"));
            }
            Ok(b.finish(if r.ok { Verdict::Certified } else { Verdict::Rejected }))
        }
        ProveCmd::Refute { theory, max_nodes, max_code, save } => {
            let (t, input) = ws.theory(theory)?;
            b.input(input);
            let n = match max_code {
                Some(c) => big("max-code", c)?,
                None => t.max_code().cloned().unwrap_or_default(),
            };
            let budget = SearchBudget { max_nodes: max_nodes.unwrap_or(ws.config.max_nodes) };
            b.set("max-code", n.to_string()).set("max-nodes", budget.max_nodes);
            match search_refutation(&t, &n, &budget) {
                SearchOutcome::Refutation(p) => {
                    let text = pretty_proof(&p);
                    if let Some(name) = save {
                        let _lock = ws.lock()?;
                        let path = ws.write(Kind::Proof, &format!("{}/{name}", t.name), &text)?;
                        b.set("saved", path.display().to_string());
                    }
                    Ok(b.set("size", p.size()).set("refutation", text).finish(Verdict::Found))
                }
                SearchOutcome::Exhausted { max_nodes } => Ok(b
                    .note(format!("no refutation with at most {max_nodes} nodes; this is not a consistency proof"))
                    .finish(Verdict::Exhausted)),
            }
        }
    }
}
