mod code;
mod cut;
mod henkin;
mod interp;
mod model;
mod oh;
mod prove;

use crate::report::{Input, Report, Verdict};
use crate::workspace::{input_err, CliError, CliResult, Workspace};
use crate::{Area, Cli};
use num_bigint::BigUint;
use serde_json::{Map, Value};
use workbench_core::sexp::parse_formula;
use workbench_core::syntax::Formula;

pub fn dispatch(ws: &Workspace, cli: &Cli) -> CliResult<Report> {
    match &cli.area {
        Area::Code(c) => code::run(ws, c),
        Area::Prove(c) => prove::run(ws, c),
        Area::Interp(c) => interp::run(ws, c),
        Area::Cut(c) => cut::run(ws, c),
        Area::Model(c) => model::run(ws, c),
        Area::Henkin(c) => henkin::run(ws, c),
        Area::Oh(a) => oh::run(ws, a, cli.seed),
    }
}

pub(crate) fn big(what: &str, s: &str) -> CliResult<BigUint> {
    s.parse().map_err(|_| CliError::Usage(format!("{what} must be a natural number, got `{s}`")))
}

pub(crate) fn formula(what: &str, s: &str) -> CliResult<Formula> {
    parse_formula(s).map_err(|e| input_err(what, e))
}

/// Report builder: collects inputs, diagnostics and result fields in order.
pub(crate) struct Build {
    inputs: Vec<Input>,
    diagnostics: Vec<String>,
    result: Map<String, Value>,
}

impl Build {
    pub fn new() -> Build {
        Build { inputs: Vec::new(), diagnostics: Vec::new(), result: Map::new() }
    }

    pub fn input(&mut self, i: Input) -> &mut Self {
        self.inputs.push(i);
        self
    }

    pub fn note(&mut self, d: impl Into<String>) -> &mut Self {
        self.diagnostics.push(d.into());
        self
    }

    pub fn set(&mut self, k: &str, v: impl Into<Value>) -> &mut Self {
        self.result.insert(k.to_string(), v.into());
        self
    }

    pub fn finish(&mut self, verdict: Verdict) -> Report {
        let mut r = Report::new("", verdict);
        r.inputs = std::mem::take(&mut self.inputs);
        r.diagnostics = std::mem::take(&mut self.diagnostics);
        r.result = Value::Object(std::mem::take(&mut self.result));
        r
    }
}
