use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use ncmoment::conic::{Backend, SdpSolution};

pub const SCHEMA_ID: &str = "ncmoment-run-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Ok,
    NumericalLimit,
    Infeasible,
    Diagnostic,
    Classical,
    Nonclassical,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok | Status::NumericalLimit | Status::Classical => 0,
            Status::Infeasible | Status::Diagnostic | Status::Nonclassical => 2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct SolverSummary {
    pub backend: String,
    pub status: ncmoment::conic::SdpStatus,
    pub objective: f64,
    pub dual_bound: f64,
    pub diagnostics: ncmoment::conic::Diagnostics,
}

impl SolverSummary {
    pub fn of(backend: &Backend, s: &SdpSolution) -> Self {
        SolverSummary {
            backend: match backend {
                Backend::Embedded => "embedded".into(),
                Backend::SdpaFile { command } => format!("sdpa-file ({command})"),
            },
            status: s.status,
            objective: s.objective,
            dual_bound: s.dual_bound,
            diagnostics: s.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub phases: BTreeMap<String, f64>,
}

/// Phase stopwatch feeding [`Timings`].
pub struct Clock {
    start: Instant,
    last: Instant,
    phases: BTreeMap<String, f64>,
}

impl Clock {
    pub fn start() -> Self {
        let now = Instant::now();
        Clock {
            start: now,
            last: now,
            phases: BTreeMap::new(),
        }
    }

    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        *self.phases.entry(name.into()).or_default() += (now - self.last).as_secs_f64();
        self.last = now;
    }

    pub fn finish(self) -> Timings {
        Timings {
            total_seconds: self.start.elapsed().as_secs_f64(),
            phases: self.phases,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub input: Option<FileDigest>,
    pub parameter: String,
    pub level: Option<usize>,
    pub value: Option<f64>,
    pub integer_value: Option<usize>,
    pub status: Status,
    pub flatness: Option<Value>,
    pub timings: Timings,
    pub solver: Option<SolverSummary>,
    pub diagnostics: Vec<String>,
    pub details: Value,
}

impl RunReport {
    pub fn new(command: Vec<String>, parameter: impl Into<String>) -> Self {
        RunReport {
            schema: SCHEMA_ID,
            tool: "ncmoment",
            version: env!("CARGO_PKG_VERSION"),
            command,
            input: None,
            parameter: parameter.into(),
            level: None,
            value: None,
            integer_value: None,
            status: Status::Ok,
            flatness: None,
            timings: Timings::default(),
            solver: None,
            diagnostics: Vec::new(),
            details: Value::Object(Default::default()),
        }
    }

    pub fn detail(&mut self, key: &str, v: impl Serialize) {
        if let Value::Object(m) = &mut self.details {
            m.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        }
    }

    /// Marks a failed check without overriding infeasibility.
    pub fn flag(&mut self, message: String) {
        self.diagnostics.push(message);
        if matches!(self.status, Status::Ok | Status::NumericalLimit) {
            self.status = Status::Diagnostic;
        }
    }

    /// Writes the report to `out` or stdout and returns the exit code.
    pub fn emit(&self, out: Option<&Path>) -> ncmoment::Result<u8> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        match out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(self.status.exit_code())
    }
}
