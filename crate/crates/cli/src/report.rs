//! Machine-readable command reports.

use serde::Serialize;
use serde_json::Value;

/// The closed set of verdicts. Positive ones exit 0, negative ones 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    Rejected,
    Exhausted,
    Agreement,
    Disagreement(String),
    Found,
    NoneFound,
}

impl Verdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Certified | Verdict::Agreement | Verdict::Found)
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_positive() {
            0
        } else {
            1
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::Rejected => "rejected",
            Verdict::Exhausted => "exhausted",
            Verdict::Agreement => "agreement",
            Verdict::Disagreement(_) => "disagreement",
            Verdict::Found => "found",
            Verdict::NoneFound => "none-found",
        }
    }
}

/// An input artifact, identified by name and content hash.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Input {
    pub kind: &'static str,
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

/// Everything except `timing` is a function of the workspace and flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<Input>,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
    pub result: Value,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: &str, verdict: Verdict) -> Report {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            verdict,
            diagnostics: Vec::new(),
            result: Value::Null,
            timing: Timing { elapsed_ms: 0 },
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Plain rendering: verdict line, diagnostics, then the result fields.
    pub fn text(&self) -> String {
        let mut out = match &self.verdict {
            Verdict::Disagreement(w) => format!("{}: disagreement at {w}\n", self.command),
            v => format!("{}: {}\n", self.command, v.label()),
        };
        for d in &self.diagnostics {
            out.push_str(&format!("  note: {d}\n"));
        }
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                match v {
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("  {k}:\n"));
                        for line in s.lines() {
                            out.push_str(&format!("    {line}\n"));
                        }
                    }
                    Value::String(s) => out.push_str(&format!("  {k}: {s}\n")),
                    other => out.push_str(&format!("  {k}: {other}\n")),
                }
            }
        }
        out
    }
}
