//! `interp-workbench`: one entry point over the workbench modules.
//!
//! Exit status: 0 on a positive verdict, 1 on a negative one, 2 on usage,
//! parse or workspace errors.

mod areas;
pub mod report;
pub mod workspace;

use clap::{Args, Parser, Subcommand};
use report::Report;
use std::path::PathBuf;
use std::time::Instant;
use workspace::{CliError, Workspace};

#[derive(Parser, Debug)]
#[command(name = "interp-workbench", version, about = "Interpretability workbench", arg_required_else_help = true)]
pub struct Cli {
    /// Emit the report as JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,

    /// Workspace directory (default: $WORKBENCH_HOME, then the current directory).
    #[arg(long, global = true, env = "WORKBENCH_HOME")]
    pub workspace: Option<PathBuf>,

    /// Seed for randomized helpers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Budget override KEY=VALUE (max-nodes, max-domain, oracle-domain,
    /// bound-length, max-queries, smash-bits, host-size, agreement-depth,
    /// agreement-vars). Repeatable.
    #[arg(long = "budget", global = true, value_name = "KEY=VALUE")]
    pub budgets: Vec<String>,

    #[command(subcommand)]
    pub area: Area,
}

#[derive(Subcommand, Debug)]
pub enum Area {
    /// Gödel coding of strings and efficient numerals.
    #[command(subcommand, arg_required_else_help = true)]
    Code(CodeCmd),
    /// Proof checking and bounded refutation search.
    #[command(subcommand, arg_required_else_help = true)]
    Prove(ProveCmd),
    /// Translations and interpretation certificates.
    #[command(subcommand, arg_required_else_help = true)]
    Interp(InterpCmd),
    /// Definable cuts.
    #[command(subcommand, arg_required_else_help = true)]
    Cut(CutCmd),
    /// Finite structures.
    #[command(subcommand, arg_required_else_help = true)]
    Model(ModelCmd),
    /// Henkin completion against a finite-model oracle.
    #[command(subcommand, arg_required_else_help = true)]
    Henkin(HenkinCmd),
    /// Bounded juxtaposition of interpretability, consistency and
    /// universal consequences for one theory.
    Oh(OhArgs),
}

#[derive(Subcommand, Debug)]
pub enum CodeCmd {
    /// Code of a string.
    Encode {
        text: String,
        /// Alphabet file, one symbol per line (default: the syntax alphabet).
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// String of a code.
    Decode {
        code: String,
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Dyadic numeral of `n`.
    Numeral { n: String },
    /// `x # y`.
    Smash { x: String, y: String },
}

#[derive(Subcommand, Debug)]
pub enum ProveCmd {
    /// Check a proof; prints its conclusion.
    Check {
        proof: String,
        /// Theory to check against (default: the proof's directory).
        #[arg(long)]
        theory: Option<String>,
    },
    /// Check a proof and its restriction to axioms and formulas of code/complexity `<= n`.
    CheckRestricted {
        proof: String,
        #[arg(long)]
        n: String,
        #[arg(long)]
        theory: Option<String>,
    },
    /// Search for a refutation using axioms of code `<= max-code`.
    Refute {
        theory: String,
        #[arg(long)]
        max_nodes: Option<usize>,
        /// Default: the largest axiom code.
        #[arg(long)]
        max_code: Option<String>,
        /// Save a refutation under this proof name.
        #[arg(long)]
        save: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum InterpCmd {
    /// Translate a formula or a whole theory.
    Translate {
        translation: String,
        #[command(flatten)]
        what: TranslateWhat,
        #[arg(long)]
        save: Option<String>,
    },
    /// Translate a proof and re-check it against the translated theory.
    TranslateProof {
        translation: String,
        proof: String,
        #[arg(long)]
        theory: Option<String>,
        #[arg(long)]
        save: Option<String>,
    },
    /// Verify a certificate bundle.
    Verify {
        certificate: String,
        #[arg(long, default_value = "sa")]
        notion: String,
        /// Axiom code bound (default: the bundle's own).
        #[arg(long)]
        x: Option<String>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct TranslateWhat {
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long)]
    pub theory: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CutCmd {
    /// Obligations of a cut formula over an arithmetical theory.
    Obligations {
        /// Cut formula in `x`.
        #[arg(long)]
        j: String,
        /// Default: the built-in arithmetic with the axiomatic cut.
        #[arg(long)]
        theory: Option<String>,
        #[arg(long)]
        save: Option<String>,
    },
    /// Prove and re-check `J(n)` for the axiomatic cut.
    Membership {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        save: Option<String>,
    },
    /// Build the sequence-coded cut for a translation and compare it with
    /// arithmetic on a finite host.
    Pudlak {
        /// Translation name, or `identity` / `floor-half` for the fixtures.
        #[arg(long, default_value = "identity")]
        translation: String,
        /// File with a cut formula `I(x)` over the source to confine to.
        #[arg(long)]
        relative: Option<String>,
        #[arg(long)]
        save: Option<String>,
    },
    /// Keep the axioms without a bounded refutation (use `--budget max-nodes=N`).
    Feferman {
        theory: String,
        #[arg(long)]
        save: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ModelCmd {
    /// Truth of a sentence.
    Eval {
        structure: String,
        #[arg(long)]
        formula: String,
    },
    /// Internal model of a structure under a translation.
    Internal {
        structure: String,
        translation: String,
        #[arg(long)]
        save: Option<String>,
    },
    /// Smallest model of a theory.
    Find {
        theory: String,
        #[arg(long)]
        max_domain: Option<u32>,
        #[arg(long)]
        save: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum HenkinCmd {
    /// Complete a theory; saves the state.
    Run {
        theory: String,
        /// Code bound; default: all strings up to `bound-length` symbols.
        #[arg(long)]
        bound: Option<String>,
        #[arg(long)]
        oracle_domain: Option<u32>,
        #[arg(long)]
        save: Option<String>,
    },
    /// Term model of a saved state.
    Model {
        state: String,
        #[arg(long)]
        save: Option<String>,
    },
    /// Interpretation certificate from a saved state, verified at `sa`.
    Certify {
        state: String,
        #[arg(long)]
        save: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct OhArgs {
    pub theory: String,
    /// Proof corpus for the theory (default: `proofs/<theory>` in the workspace).
    #[arg(long)]
    pub proofs: Option<PathBuf>,
    /// Proof corpus for the interpreting theory.
    #[arg(long)]
    pub target_proofs: Option<PathBuf>,
    /// Completion bound (default: strings up to `bound-length` symbols).
    #[arg(long)]
    pub bound: Option<String>,
    /// Code bound on the universal sentences compared (default: strings up
    /// to 64 symbols).
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub oracle_domain: Option<u32>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
}

/// What the binary prints and returns.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs one command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let json = cli.json;
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut r) => {
            r.timing.elapsed_ms = start.elapsed().as_millis();
            let stdout = if json { r.json() } else { r.text() };
            Outcome { code: r.verdict.exit_code(), stdout, stderr: String::new() }
        }
        Err(e) => {
            let stdout = if json {
                let v = serde_json::json!({ "command": command_name(&cli.area), "error": e.to_string() });
                serde_json::to_string_pretty(&v).unwrap() + "\n"
            } else {
                String::new()
            };
            Outcome { code: 2, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let root = cli.workspace.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut ws = Workspace::open(&root)?;
    for b in &cli.budgets {
        ws.config.apply(b)?;
    }
    let mut r = areas::dispatch(&ws, cli)?;
    r.command = command_name(&cli.area);
    Ok(r)
}

pub fn command_name(a: &Area) -> String {
    let (area, cmd) = match a {
        Area::Code(c) => (
            "code",
            match c {
                CodeCmd::Encode { .. } => "encode",
                CodeCmd::Decode { .. } => "decode",
                CodeCmd::Numeral { .. } => "numeral",
                CodeCmd::Smash { .. } => "smash",
            },
        ),
        Area::Prove(c) => (
            "prove",
            match c {
                ProveCmd::Check { .. } => "check",
                ProveCmd::CheckRestricted { .. } => "check-restricted",
                ProveCmd::Refute { .. } => "refute",
            },
        ),
        Area::Interp(c) => (
            "interp",
            match c {
                InterpCmd::Translate { .. } => "translate",
                InterpCmd::TranslateProof { .. } => "translate-proof",
                InterpCmd::Verify { .. } => "verify",
            },
        ),
        Area::Cut(c) => (
            "cut",
            match c {
                CutCmd::Obligations { .. } => "obligations",
                CutCmd::Membership { .. } => "membership",
                CutCmd::Pudlak { .. } => "pudlak",
                CutCmd::Feferman { .. } => "feferman",
            },
        ),
        Area::Model(c) => (
            "model",
            match c {
                ModelCmd::Eval { .. } => "eval",
                ModelCmd::Internal { .. } => "internal",
                ModelCmd::Find { .. } => "find",
            },
        ),
        Area::Henkin(c) => (
            "henkin",
            match c {
                HenkinCmd::Run { .. } => "run",
                HenkinCmd::Model { .. } => "model",
                HenkinCmd::Certify { .. } => "certify",
            },
        ),
        Area::Oh(_) => return "oh".to_string(),
    };
    format!("{area} {cmd}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn no_arguments_is_a_usage_error() {
        let o = run(["interp-workbench"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("Usage"), "{}", o.stderr);
    }

    #[test]
    fn unknown_area_is_a_usage_error() {
        assert_eq!(run(["interp-workbench", "frobnicate"]).code, 2);
    }

    #[test]
    fn bad_budget_is_a_usage_error() {
        let o = run(["interp-workbench", "--budget", "nope=1", "code", "numeral", "5"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("unknown budget"));
    }
}
