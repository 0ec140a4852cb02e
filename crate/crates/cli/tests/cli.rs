use num_bigint::BigUint;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use workbench_core::proof::{pretty_proof, proof_from_sexp};
use workbench_core::sexp::read_one;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn bin(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interp-workbench"))
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .env_remove("WORKBENCH_HOME")
        .output()
        .expect("binary runs")
}

fn json(ws: &Path, args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = bin(ws, &all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{args:?}: {e}\nstdout: {}\nstderr: {}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    });
    (o.status.code().unwrap(), v)
}

/// A scratch workspace holding a copy of the corpus.
fn scratch() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&corpus(), dir.path());
    dir
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let target = to.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &target);
        } else {
            std::fs::copy(e.path(), target).unwrap();
        }
    }
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn verify_shipped_certificate() {
    let (code, v) = json(&corpus(), &["interp", "verify", "exists"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "certified");
    assert_eq!(v["command"], "interp verify");
    assert_eq!(v["inputs"][0]["kind"], "certificate");
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn refute_single_atom_is_exhausted() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("theories")).unwrap();
    std::fs::write(dir.path().join("theories/P.theory"), "(theory P (signature (P 0)) (axiom (P)))\n").unwrap();
    let (code, v) = json(dir.path(), &["prove", "refute", "P"]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "exhausted");
}

#[test]
fn refute_contradiction_is_found() {
    let (code, v) = json(&corpus(), &["prove", "refute", "Contra"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "found");
}

#[test]
fn no_arguments_prints_usage() {
    let o = Command::new(env!("CARGO_BIN_EXE_interp-workbench")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn unknown_subcommand_and_bad_workspace_exit_2() {
    assert_eq!(bin(&corpus(), &["prove", "frobnicate"]).status.code(), Some(2));
    let missing = corpus().join("no-such-dir");
    let o = bin(&missing, &["code", "numeral", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unreadable workspace"));
}

#[test]
fn workspace_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_interp-workbench"))
        .args(["--json", "prove", "check", "Prop/01"])
        .env("WORKBENCH_HOME", corpus())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn mutants_are_rejected() {
    let dir = corpus().join("mutations");
    let mut names: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    // Untranslated mutants only: these check against their own theory.
    let mut seen = 0;
    for path in names {
        let text = std::fs::read_to_string(&path).unwrap();
        if text.contains("(translation ") {
            continue;
        }
        let e = read_one(&text).unwrap();
        let field = |k: &str| e.as_list().unwrap().iter().find(|c| c.head() == Some(k)).unwrap().as_list().unwrap()[1].clone();
        let theory = field("theory").as_atom().unwrap().to_string();
        let proof = proof_from_sexp(&field("proof")).unwrap();
        let tmp = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(tmp.path(), pretty_proof(&proof)).unwrap();
        let (code, v) = json(&corpus(), &["prove", "check", tmp.path().to_str().unwrap(), "--theory", &theory]);
        assert_eq!((code, v["verdict"].as_str()), (1, Some("rejected")), "{}", path.display());
        seen += 1;
        if seen == 10 {
            break;
        }
    }
    assert_eq!(seen, 10);
}

#[test]
fn check_restricted_threshold() {
    let (_, v) = json(&corpus(), &["prove", "check", "Order/01"]);
    let level = v["result"]["restriction-level"].as_str().unwrap().to_string();
    let (code, _) = json(&corpus(), &["prove", "check-restricted", "Order/01", "--n", &level]);
    assert_eq!(code, 0);
    let below = (level.parse::<BigUint>().unwrap() - 1u32).to_string();
    let (code, v) = json(&corpus(), &["prove", "check-restricted", "Order/01", "--n", &below]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("rejected")));
}

#[test]
fn reports_are_reproducible() {
    let args = ["oh", "Mono"];
    let (c1, a) = json(&corpus(), &args);
    let (c2, b) = json(&corpus(), &args);
    assert_eq!(c1, 0);
    assert_eq!(c1, c2);
    assert_eq!(strip_timing(a), strip_timing(b));
}

#[test]
fn henkin_run_model_certify_round_trip() {
    let ws = scratch();
    let (code, v) = json(ws.path(), &["henkin", "run", "Colours", "--save", "col"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("found")), "{v}");
    let (code, v) = json(ws.path(), &["henkin", "model", "col", "--save", "col-model"]);
    assert_eq!(code, 0, "{v}");
    assert!(ws.path().join("structures/col-model.json").exists());
    let (code, v) = json(ws.path(), &["henkin", "certify", "col", "--save", "col"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("certified")), "{v}");
    let (code, v) = json(ws.path(), &["interp", "verify", "col"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("certified")), "{v}");
    assert!(!ws.path().join(".workbench.lock").exists());
}

#[test]
fn inconsistent_henkin_run_is_rejected() {
    let (code, v) = json(&corpus(), &["henkin", "run", "Void"]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("rejected")));
}

#[test]
fn locked_workspace_refuses_writes() {
    let ws = scratch();
    std::fs::write(ws.path().join(".workbench.lock"), "1\n").unwrap();
    let o = bin(ws.path(), &["henkin", "run", "Exists"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("locked"));
}

#[test]
fn oh_pipeline_on_fixtures() {
    let (code, v) = json(&corpus(), &["oh", "Mono"]);
    assert_eq!(code, 0, "{v}");
    for facet in ["consistency", "interpretation", "pi1"] {
        assert_eq!(v["result"][facet]["positive"], true, "{facet}: {v}");
    }
    assert!(v["result"]["pi1"]["source-sentences"].as_u64().unwrap() > 0);
    let (code, v) = json(&corpus(), &["oh", "Contra"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["consistency"]["positive"], false);
    assert_eq!(v["result"]["halted"], "consistency");
}

#[test]
fn raising_the_bound_keeps_certification() {
    for t in ["Exists", "Colours", "Order"] {
        let mut last = None;
        for len in ["12", "16"] {
            let (code, v) = json(&corpus(), &["--budget", &format!("bound-length={len}"), "oh", t]);
            let certified = v["result"]["interpretation"]["positive"] == true;
            if last == Some(true) {
                assert!(certified, "{t} lost certification at length {len}: {v}");
            }
            last = Some(certified);
            assert!(code == 0 || code == 1);
        }
    }
}

#[test]
fn code_commands() {
    let (_, v) = json(&corpus(), &["code", "encode", "(P x)"]);
    let code = v["result"]["code"].as_str().unwrap().to_string();
    let (_, v) = json(&corpus(), &["code", "decode", &code]);
    assert_eq!(v["result"]["text"], "(P x)");
    let (code, v) = json(&corpus(), &["code", "numeral", "1000000"]);
    assert_eq!(code, 0);
    assert!(v["result"]["length"].as_u64().unwrap() <= 20 * 20);
    let (code, v) = json(&corpus(), &["--budget", "smash-bits=64", "code", "smash", "1000", "1000"]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("exhausted")));
}

#[test]
fn model_and_interp_commands() {
    let ws = scratch();
    let (code, _) = json(ws.path(), &["model", "find", "Order", "--save", "o"]);
    assert_eq!(code, 0);
    let (code, _) = json(ws.path(), &["model", "eval", "o", "--formula", "(forall x (not (R x x)))"]);
    assert_eq!(code, 0);
    let (code, _) = json(ws.path(), &["model", "eval", "o", "--formula", "(exists x (R x x))"]);
    assert_eq!(code, 1);
    let (code, v) = json(ws.path(), &["model", "find", "Void", "--max-domain", "3"]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("none-found")));
    let (code, v) = json(ws.path(), &["interp", "translate-proof", "mono-rel", "Mono/01"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("certified")), "{v}");
    let (code, v) = json(ws.path(), &["interp", "translate", "order-converse", "--formula", "(forall x (not (R x x)))"]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn cut_commands() {
    let (code, v) = json(&corpus(), &["cut", "membership", "--n", "777"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("certified")));
    let (code, v) = json(&corpus(), &["--budget", "host-size=6", "cut", "pudlak", "--translation", "floor-half"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("agreement")), "{v}");
    let (code, v) = json(&corpus(), &["cut", "feferman", "Contra"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["kept"], 1);
    let (code, v) = json(&corpus(), &["cut", "obligations", "--j", "(= x x)"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["obligations"].as_array().unwrap().len(), 4);
}
