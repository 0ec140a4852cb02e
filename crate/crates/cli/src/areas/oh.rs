//! Three bounded facets side by side: no short refutation, a certified
//! interpretation from a Henkin completion, and transfer of the universal
//! consequences in a proof corpus. Nothing here claims the unbounded
//! equivalences; each facet reports the bound it was probed at.

use super::Build;
use crate::areas::henkin::{bound, oracle};
use crate::report::{Report, Verdict};
use crate::workspace::{input_err, sha256, CliError, CliResult, Workspace};
use crate::OhArgs;
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use workbench_core::classify::{memberships, FormulaClass};
use workbench_core::coding::code_syntax;
use workbench_core::henkin::{bound_for_length, henkin_pipeline, HenkinError};
use workbench_core::interp::{substitute_witnesses, verify_certificate, Notion};
use workbench_core::proof::{check_closed, parse_proof, Proof};
use workbench_core::search::{search_refutation, SearchBudget, SearchOutcome};
use workbench_core::theory::TheorySpec;

/// Default length bound on the compared universal sentences.
const PI1_LENGTH: u32 = 64;

fn refutation_free(t: &TheorySpec, budget: &SearchBudget) -> (bool, String) {
    let n = t.max_code().cloned().unwrap_or_default();
    match search_refutation(t, &n, budget) {
        SearchOutcome::Refutation(p) => (false, format!("{}: refutation with {} nodes", t.name, p.size())),
        SearchOutcome::Exhausted { max_nodes } => {
            (true, format!("{}: no refutation with at most {max_nodes} nodes from all {} axioms", t.name, t.len()))
        }
    }
}

/// Proof files of a corpus directory, by name.
fn corpus(b: &mut Build, dir: &Path) -> CliResult<Vec<(String, Proof)>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| input_err(dir.display(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "proof"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let text = fs::read_to_string(&f).map_err(|e| input_err(f.display(), e))?;
        let name = f.file_stem().unwrap().to_string_lossy().into_owned();
        b.input(crate::report::Input { kind: "proof", name: name.clone(), sha256: sha256(text.as_bytes()) });
        out.push((name, parse_proof(&text).map_err(|e| input_err(f.display(), e))?));
    }
    Ok(out)
}

fn is_pi1(f: &workbench_core::syntax::Formula) -> bool {
    memberships(f).contains(&FormulaClass::Pi1)
}

pub fn run(ws: &Workspace, a: &OhArgs, seed: u64) -> CliResult<Report> {
    let mut b = Build::new();
    let (v, input) = ws.theory(&a.theory)?;
    b.input(input);
    let b_henkin = bound(ws, a.bound.as_deref())?;
    let x = match &a.x {
        Some(s) => super::big("x", s)?,
        None => bound_for_length(PI1_LENGTH),
    };
    let budget = SearchBudget { max_nodes: a.max_nodes.unwrap_or(ws.config.max_nodes) };
    b.set("bound", b_henkin.to_string()).set("x", x.to_string()).set("max-nodes", budget.max_nodes).set("seed", seed);

    // Consistency, first on the source alone.
    let (con_v, why_v) = refutation_free(&v, &budget);
    if !con_v {
        b.set("consistency", json!({ "positive": false, "source": why_v }));
        b.set("halted", "consistency");
        return Ok(b.finish(Verdict::Rejected));
    }

    // Interpretation from a Henkin completion.
    let mut o = oracle(ws, a.oracle_domain);
    let (state, _, cert) = match henkin_pipeline(&v, &b_henkin, &mut o) {
        Ok(r) => r,
        Err(e @ HenkinError::BaseRejected(_)) => {
            b.set("consistency", json!({ "positive": false, "source": why_v, "oracle": e.to_string() }));
            b.set("halted", "consistency");
            return Ok(b.finish(Verdict::Rejected));
        }
        Err(e) => return Err(CliError::Stage { stage: "interpretation", msg: e.to_string() }),
    };
    let (con_u, why_u) = refutation_free(&cert.target, &budget);
    b.set("consistency", json!({ "positive": con_u, "source": why_v, "target": why_u }));
    let r = verify_certificate(&cert, Notion::Sa);
    b.set(
        "interpretation",
        json!({
            "positive": r.certified,
            "oracle": state.oracle,
            "target": cert.target.name,
            "target-axioms": cert.target.len(),
            "checked": r.checked,
            "statement": r.statement,
        }),
    );
    for f in &r.failures {
        b.note(format!("interpretation: {}", f.reason));
    }

    // Universal consequences of code <= x: source proofs carried into the target.
    let dir = a.proofs.clone().unwrap_or_else(|| ws.root.join("proofs").join(&v.name));
    let source = if dir.is_dir() { corpus(&mut b, &dir)? } else { Vec::new() };
    let mut sentences = 0;
    let mut transferred = 0;
    for (name, p) in &source {
        let concl = match check_closed(p, &v) {
            Ok(c) => c,
            Err(e) => {
                b.note(format!("pi1: source proof {name} rejected: {e}"));
                continue;
            }
        };
        if !is_pi1(&concl) || code_syntax(&concl) > x {
            continue;
        }
        sentences += 1;
        match substitute_witnesses(&cert, p).map_err(|e| e.to_string()).and_then(|q| {
            check_closed(&q, &cert.target).map_err(|e| e.to_string())
        }) {
            Ok(_) => transferred += 1,
            Err(e) => {
                b.note(format!("pi1: {name} does not transfer: {e}"));
            }
        }
    }
    let mut target_sentences = 0;
    let mut target_ok = true;
    if let Some(tdir) = &a.target_proofs {
        for (name, p) in corpus(&mut b, tdir)? {
            match check_closed(&p, &cert.target) {
                Ok(c) if is_pi1(&c) && code_syntax(&c) <= x => target_sentences += 1,
                Ok(_) => {}
                Err(e) => {
                    target_ok = false;
                    b.note(format!("pi1: target proof {name} rejected: {e}"));
                }
            }
        }
    }
    let pi1 = transferred == sentences && target_ok;
    b.set(
        "pi1",
        json!({
            "positive": pi1,
            "source-sentences": sentences,
            "transferred": transferred,
            "target-sentences": target_sentences,
        }),
    );
    let all = con_u && r.certified && pi1;
    Ok(b.finish(if all { Verdict::Certified } else { Verdict::Rejected }))
}
