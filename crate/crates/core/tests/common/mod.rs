//! Loaders for the shipped corpus at the workspace root.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use workbench_core::interp::Translation;
use workbench_core::model::Structure;
use workbench_core::proof::{parse_proof, proof_from_sexp, Proof};
use workbench_core::sexp::{read_one, SExp};
use workbench_core::theory::TheorySpec;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn files(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .collect();
    out.sort();
    out
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn stem(p: &Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

fn theories_in(sub: &str) -> Vec<TheorySpec> {
    files(&corpus_dir().join(sub), "theory")
        .iter()
        .map(|p| TheorySpec::parse(&read(p)).unwrap_or_else(|e| panic!("{}: {e}", p.display())))
        .collect()
}

pub fn theories() -> BTreeMap<String, TheorySpec> {
    theories_in("theories").into_iter().map(|t| (t.name.clone(), t)).collect()
}

pub fn henkin_fixtures() -> Vec<TheorySpec> {
    theories_in("henkin")
}

pub fn inconsistent_fixtures() -> Vec<TheorySpec> {
    theories_in("inconsistent")
}

pub struct CorpusProof {
    pub theory: String,
    pub name: String,
    pub proof: Proof,
}

pub fn proofs() -> Vec<CorpusProof> {
    let mut out = Vec::new();
    for th in theories().keys() {
        for p in files(&corpus_dir().join("proofs").join(th), "proof") {
            let proof = parse_proof(&read(&p)).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            out.push(CorpusProof { theory: th.clone(), name: format!("{th}/{}", stem(&p)), proof });
        }
    }
    out
}

pub fn translations() -> Vec<Translation> {
    files(&corpus_dir().join("translations"), "translation")
        .iter()
        .map(|p| Translation::parse(&read(p)).unwrap_or_else(|e| panic!("{}: {e}", p.display())))
        .collect()
}

pub fn structures(translation: &str) -> Vec<(String, Structure)> {
    files(&corpus_dir().join("structures").join(translation), "json")
        .iter()
        .map(|p| (stem(p), Structure::from_json(&read(p)).unwrap_or_else(|e| panic!("{}: {e}", p.display()))))
        .collect()
}

pub struct Mutant {
    pub name: String,
    pub theory: String,
    pub translation: Option<String>,
    pub operator: String,
    pub proof: Proof,
}

fn clause<'a>(items: &'a [SExp], head: &str) -> Option<&'a SExp> {
    items.iter().find(|e| e.head() == Some(head)).and_then(|e| e.as_list()).map(|xs| &xs[1])
}

pub fn mutants() -> Vec<Mutant> {
    files(&corpus_dir().join("mutations"), "sexp")
        .iter()
        .map(|p| {
            let e = read_one(&read(p)).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            let items = e.as_list().expect("a list");
            let atom = |h: &str| clause(items, h).and_then(SExp::as_atom).map(str::to_string);
            Mutant {
                name: stem(p),
                theory: atom("theory").expect("theory clause"),
                translation: atom("translation"),
                operator: atom("operator").expect("operator clause"),
                proof: proof_from_sexp(clause(items, "proof").expect("proof clause")).expect("proof parses"),
            }
        })
        .collect()
}
