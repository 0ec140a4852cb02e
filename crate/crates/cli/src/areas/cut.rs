use super::{formula, Build};
use crate::report::{Report, Verdict};
use crate::workspace::{input_err, CliResult, Kind, Workspace};
use crate::CutCmd;
use workbench_core::cut::{
    build_host, build_pudlak, build_pudlak_relative, check_confinement, check_delta0_agreement, cut_obligations,
    feferman_restrict, floor_half_fixture, identity_fixture, ChainStarts, CutSpec, MembershipProver,
};
use workbench_core::proof::{check_closed, pretty_proof};
use workbench_core::search::SearchBudget;
use workbench_core::subst::alpha_eq;

pub fn run(ws: &Workspace, cmd: &CutCmd) -> CliResult<Report> {
    let mut b = Build::new();
    match cmd {
        CutCmd::Obligations { j, theory, save } => {
            let j = formula("cut formula", j)?;
            let u = match theory {
                Some(t) => {
                    let (u, input) = ws.theory(t)?;
                    b.input(input);
                    u
                }
                None => CutSpec::axiomatic().host,
            };
            let obs = cut_obligations(&j, &u).map_err(|e| input_err("cut", e))?;
            let text: Vec<String> = obs.iter().map(|f| f.to_string()).collect();
            if let Some(s) = save {
                let _lock = ws.lock()?;
                let body: String = text.iter().map(|f| format!("  {f}\n")).collect();
                let path = ws.write(Kind::Artifact, s, &format!("(obligations\n{body})\n"))?;
                b.set("saved", path.display().to_string());
            }
            Ok(b.set("theory", u.name.clone()).set("obligations", text).finish(Verdict::Found))
        }
        CutCmd::Membership { n, save } => {
            let c = CutSpec::axiomatic();
            let p = MembershipProver::new(&c)
                .and_then(|m| m.prove(*n))
                .map_err(|e| input_err("membership", e))?;
            b.set("n", *n).set("size", p.size()).set("bits", 64 - n.leading_zeros());
            match check_closed(&p, &c.host) {
                Ok(got) if alpha_eq(&got, &c.at(&workbench_core::coding::numeral(*n))) => {
                    if let Some(s) = save {
                        let _lock = ws.lock()?;
                        let path = ws.write(Kind::Proof, &format!("{}/{s}", c.host.name), &pretty_proof(&p))?;
                        b.set("saved", path.display().to_string());
                    }
                    Ok(b.set("conclusion", got.to_string()).finish(Verdict::Certified))
                }
                Ok(got) => Ok(b.note(format!("proof concludes {got}")).finish(Verdict::Rejected)),
                Err(e) => Ok(b.note(e.to_string()).finish(Verdict::Rejected)),
            }
        }
        CutCmd::Pudlak { translation, relative, save } => {
            let j = match translation.as_str() {
                "identity" => identity_fixture(),
                "floor-half" => floor_half_fixture(),
                name => {
                    let (j, input) = ws.translation(name)?;
                    b.input(input);
                    j
                }
            };
            let art = match relative {
                None => build_pudlak(&j),
                Some(f) => {
                    let (text, input) = ws.text(Kind::Artifact, f)?;
                    b.input(input);
                    build_pudlak_relative(&j, &formula(f, text.trim())?)
                }
            }
            .map_err(|e| input_err("pudlak", e))?;
            if let Some(s) = save {
                let _lock = ws.lock()?;
                let path = ws.write(Kind::Artifact, s, &art.to_sexp_string())?;
                b.set("saved", path.display().to_string());
            }
            let cfg = &ws.config;
            let host = build_host(&j, cfg.host_size, ChainStarts::Every).map_err(|e| input_err("host", e))?;
            let r = check_delta0_agreement(&host, &art, cfg.agreement_depth, cfg.agreement_vars)
                .map_err(|e| input_err("agreement", e))?;
            b.set("host-size", cfg.host_size)
                .set("jprime", r.jprime.clone())
                .set("functional", r.functional)
                .set("classes", r.classes);
            for d in &r.diagnosis {
                b.note(d.clone());
            }
            if let Some(d) = &r.disagreement {
                let w = format!("{} at {:?} (J' side {}, host side {})", d.formula, d.assignment, d.left, d.right);
                return Ok(b.finish(Verdict::Disagreement(w)));
            }
            if !r.functional {
                return Ok(b.finish(Verdict::Disagreement("H is not functional".into())));
            }
            if !r.diagnosis.is_empty() {
                return Ok(b.finish(Verdict::Disagreement(r.diagnosis[0].clone())));
            }
            if art.relative.is_some() {
                match check_confinement(&host, &art) {
                    Ok(n) => {
                        b.set("confined-pairs", n);
                    }
                    Err(e) => return Ok(b.finish(Verdict::Disagreement(e.to_string()))),
                }
            }
            Ok(b.finish(Verdict::Agreement))
        }
        CutCmd::Feferman { theory, save } => {
            let (t, input) = ws.theory(theory)?;
            b.input(input);
            let budget = SearchBudget { max_nodes: ws.config.max_nodes };
            let r = feferman_restrict(&t, &budget).map_err(|e| input_err("feferman", e))?;
            let dropped: Vec<String> =
                t.axioms().filter(|(c, _)| !r.recognizes_code(c)).map(|(_, a)| a.to_string()).collect();
            let text = r.to_sexp_string();
            if let Some(s) = save {
                let _lock = ws.lock()?;
                let path = ws.write(Kind::Theory, s, &text)?;
                b.set("saved", path.display().to_string());
            }
            Ok(b
                .set("max-nodes", budget.max_nodes)
                .set("kept", r.len())
                .set("dropped", dropped)
                .set("theory", text)
                .finish(Verdict::Found))
        }
    }
}
