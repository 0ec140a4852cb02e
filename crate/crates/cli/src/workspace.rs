//! Workspace: a directory of named artifacts plus `workbench.json`.
//!
//! A name resolves to an existing path first, then to the kind's
//! directories. A name found in two directories of the same kind is an
//! error, so names stay unique per kind.

use crate::report::Input;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use workbench_core::interp::{Certificate, Translation};
use workbench_core::model::Structure;
use workbench_core::proof::{parse_proof, Proof};
use workbench_core::theory::TheorySpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("workspace is locked by {0}; remove it if no run is active")]
    Locked(PathBuf),
    #[error("stage {stage}: {msg}")]
    Stage { stage: &'static str, msg: String },
}

pub type CliResult<T> = Result<T, CliError>;

pub fn input_err(what: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{what}: {e}"))
}

/// Budgets and fitted constants. Every field has a default, so a partial
/// `workbench.json` is fine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Config {
    pub max_nodes: usize,
    pub max_domain: u32,
    pub oracle_domain: u32,
    pub bound_length: u32,
    pub max_queries: Option<usize>,
    pub smash_bits: u64,
    pub host_size: u32,
    pub agreement_depth: usize,
    pub agreement_vars: usize,
    pub constants: Constants,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Constants {
    pub c_num: usize,
    pub c_mem: usize,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { c_num: 20, c_mem: 120 }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_nodes: 7,
            max_domain: 4,
            oracle_domain: 4,
            bound_length: 16,
            max_queries: None,
            smash_bits: workbench_core::coding::DEFAULT_BIT_BUDGET,
            host_size: 8,
            agreement_depth: 2,
            agreement_vars: 2,
            constants: Constants::default(),
        }
    }
}

impl Config {
    /// Applies one `key=value` override.
    pub fn apply(&mut self, item: &str) -> CliResult<()> {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("budget override `{item}` is not KEY=VALUE")))?;
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> CliResult<T> {
            v.parse().map_err(|_| CliError::Usage(format!("budget `{k}` needs a number, got `{v}`")))
        }
        match k {
            "max-nodes" => self.max_nodes = num(k, v)?,
            "max-domain" => self.max_domain = num(k, v)?,
            "oracle-domain" => self.oracle_domain = num(k, v)?,
            "bound-length" => self.bound_length = num(k, v)?,
            "max-queries" => self.max_queries = Some(num(k, v)?),
            "smash-bits" => self.smash_bits = num(k, v)?,
            "host-size" => self.host_size = num(k, v)?,
            "agreement-depth" => self.agreement_depth = num(k, v)?,
            "agreement-vars" => self.agreement_vars = num(k, v)?,
            _ => return Err(CliError::Usage(format!("unknown budget `{k}`"))),
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Theory,
    Proof,
    Translation,
    Structure,
    Certificate,
    State,
    Artifact,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Theory => "theory",
            Kind::Proof => "proof",
            Kind::Translation => "translation",
            Kind::Structure => "structure",
            Kind::Certificate => "certificate",
            Kind::State => "state",
            Kind::Artifact => "artifact",
        }
    }

    /// Search directories; the first is where saves go.
    fn dirs(self) -> &'static [&'static str] {
        match self {
            Kind::Theory => &["theories", "henkin", "inconsistent"],
            Kind::Proof => &["proofs"],
            Kind::Translation => &["translations"],
            Kind::Structure => &["structures"],
            Kind::Certificate => &["certificates"],
            Kind::State => &["states"],
            Kind::Artifact => &["artifacts"],
        }
    }

    fn ext(self) -> &'static str {
        match self {
            Kind::Theory => "theory",
            Kind::Proof => "proof",
            Kind::Translation => "translation",
            Kind::Structure | Kind::State => "json",
            Kind::Certificate => "",
            Kind::Artifact => "sexp",
        }
    }
}

pub struct Workspace {
    pub root: PathBuf,
    pub config: Config,
}

/// Held while a command writes into the workspace.
pub struct Lock {
    path: PathBuf,
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub const LOCK_FILE: &str = ".workbench.lock";
pub const CONFIG_FILE: &str = "workbench.json";

impl Workspace {
    pub fn open(root: &Path) -> CliResult<Workspace> {
        if !root.is_dir() {
            return Err(CliError::Input(format!("unreadable workspace {}: not a directory", root.display())));
        }
        let cfg = root.join(CONFIG_FILE);
        let config = if cfg.exists() {
            let text = fs::read_to_string(&cfg).map_err(|e| input_err(cfg.display(), e))?;
            serde_json::from_str(&text).map_err(|e| input_err(cfg.display(), e))?
        } else {
            Config::default()
        };
        Ok(Workspace { root: root.to_path_buf(), config })
    }

    pub fn lock(&self) -> CliResult<Lock> {
        let path = self.root.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                use std::io::Write;
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Lock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked(path)),
            Err(e) => Err(input_err(path.display(), e)),
        }
    }

    /// Path of the artifact `name` of `kind`.
    pub fn locate(&self, kind: Kind, name: &str) -> CliResult<PathBuf> {
        let direct = Path::new(name);
        if direct.exists() {
            return Ok(direct.to_path_buf());
        }
        let rooted = self.root.join(name);
        if rooted.exists() && kind != Kind::Certificate || rooted.is_dir() && kind == Kind::Certificate {
            return Ok(rooted);
        }
        let file = if kind.ext().is_empty() { name.to_string() } else { format!("{name}.{}", kind.ext()) };
        let hits: Vec<PathBuf> =
            kind.dirs().iter().map(|d| self.root.join(d).join(&file)).filter(|p| p.exists()).collect();
        match hits.len() {
            0 => Err(CliError::Input(format!("no {} named `{name}` in {}", kind.label(), self.root.display()))),
            1 => Ok(hits.into_iter().next().unwrap()),
            _ => Err(CliError::Input(format!("{} name `{name}` is ambiguous: {hits:?}", kind.label()))),
        }
    }

    /// Where a saved artifact of `kind` called `name` goes.
    pub fn save_path(&self, kind: Kind, name: &str) -> PathBuf {
        let file = if kind.ext().is_empty() { name.to_string() } else { format!("{name}.{}", kind.ext()) };
        self.root.join(kind.dirs()[0]).join(file)
    }

    pub fn write(&self, kind: Kind, name: &str, text: &str) -> CliResult<PathBuf> {
        let path = self.save_path(kind, name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| input_err(dir.display(), e))?;
        }
        fs::write(&path, text).map_err(|e| input_err(path.display(), e))?;
        Ok(path)
    }

    fn read(&self, kind: Kind, name: &str) -> CliResult<(PathBuf, String, Input)> {
        let path = self.locate(kind, name)?;
        let text = fs::read_to_string(&path).map_err(|e| input_err(path.display(), e))?;
        let input = Input { kind: kind.label(), name: name.to_string(), sha256: sha256(text.as_bytes()) };
        Ok((path, text, input))
    }

    pub fn theory(&self, name: &str) -> CliResult<(TheorySpec, Input)> {
        let (path, text, input) = self.read(Kind::Theory, name)?;
        let t = TheorySpec::parse(&text).map_err(|e| input_err(path.display(), e))?;
        Ok((t, input))
    }

    /// The proof and the theory named by its directory, if any.
    pub fn proof(&self, name: &str) -> CliResult<(Proof, Option<String>, Input)> {
        let (path, text, input) = self.read(Kind::Proof, name)?;
        let p = parse_proof(&text).map_err(|e| input_err(path.display(), e))?;
        let owner = path
            .parent()
            .filter(|d| d.parent().and_then(|g| g.file_name()).is_some_and(|g| g == "proofs"))
            .and_then(|d| d.file_name())
            .map(|d| d.to_string_lossy().into_owned());
        Ok((p, owner, input))
    }

    pub fn translation(&self, name: &str) -> CliResult<(Translation, Input)> {
        let (path, text, input) = self.read(Kind::Translation, name)?;
        let k = Translation::parse(&text).map_err(|e| input_err(path.display(), e))?;
        Ok((k, input))
    }

    pub fn structure(&self, name: &str) -> CliResult<(Structure, Input)> {
        let (path, text, input) = self.read(Kind::Structure, name)?;
        let m = Structure::from_json(&text).map_err(|e| input_err(path.display(), e))?;
        Ok((m, input))
    }

    pub fn state(&self, name: &str) -> CliResult<(workbench_core::henkin::HenkinState, Input)> {
        let (path, text, input) = self.read(Kind::State, name)?;
        let s = workbench_core::henkin::HenkinState::from_json(&text).map_err(|e| input_err(path.display(), e))?;
        Ok((s, input))
    }

    pub fn text(&self, kind: Kind, name: &str) -> CliResult<(String, Input)> {
        let (_, text, input) = self.read(kind, name)?;
        Ok((text, input))
    }

    /// Loads a bundle; the hash covers every file, in name order.
    pub fn certificate(&self, name: &str) -> CliResult<(Certificate, Input)> {
        let dir = self.locate(Kind::Certificate, name)?;
        let c = Certificate::load_bundle(&dir).map_err(|e| input_err(dir.display(), e))?;
        let mut files: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| input_err(dir.display(), e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        let mut h = Sha256::new();
        for f in files {
            let bytes = fs::read(&f).map_err(|e| input_err(f.display(), e))?;
            h.update(f.file_name().unwrap().to_string_lossy().as_bytes());
            h.update([0u8]);
            h.update(&bytes);
        }
        let input = Input { kind: "certificate", name: name.to_string(), sha256: hex::encode(h.finalize()) };
        Ok((c, input))
    }
}

pub fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_and_reject_unknown_keys() {
        let mut c = Config::default();
        c.apply("max-nodes=9").unwrap();
        c.apply("max-queries=3").unwrap();
        assert_eq!((c.max_nodes, c.max_queries), (9, Some(3)));
        assert!(matches!(c.apply("colour=red"), Err(CliError::Usage(_))));
        assert!(matches!(c.apply("max-nodes"), Err(CliError::Usage(_))));
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = Config::default();
        let back: Config = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let partial: Config = serde_json::from_str("{\"max-nodes\": 5}").unwrap();
        assert_eq!(partial.max_nodes, 5);
        assert_eq!(partial.bound_length, Config::default().bound_length);
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path()).unwrap();
        let l = ws.lock().unwrap();
        assert!(matches!(ws.lock(), Err(CliError::Locked(_))));
        drop(l);
        assert!(ws.lock().is_ok());
    }

    #[test]
    fn names_resolve_per_kind_and_must_be_unique() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path()).unwrap();
        let t = "(theory T (signature (P 0)) (axiom (P)))";
        ws.write(Kind::Theory, "T", t).unwrap();
        assert_eq!(ws.theory("T").unwrap().0.name, "T");
        assert!(ws.locate(Kind::Proof, "T").is_err());
        fs::create_dir_all(dir.path().join("henkin")).unwrap();
        fs::write(dir.path().join("henkin/T.theory"), t).unwrap();
        assert!(ws.locate(Kind::Theory, "T").unwrap_err().to_string().contains("ambiguous"));
    }

    #[test]
    fn missing_workspace_is_an_input_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(Workspace::open(&dir.path().join("absent")), Err(CliError::Input(_))));
    }
}
