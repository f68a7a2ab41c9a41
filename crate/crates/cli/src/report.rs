//! Check reports and their text and machine renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::config::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Unsupported,
    Inexact,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inexact => "inexact",
            Status::Unsupported => "unsupported",
        }
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub system: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub residuals: BTreeMap<String, f64>,
    pub witnesses: Vec<String>,
    /// Offending inputs, for replay.
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, system: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            system: system.into(),
            status: Status::Pass,
            seed: None,
            residuals: BTreeMap::new(),
            witnesses: Vec::new(),
            inputs: Vec::new(),
            detail: None,
            wall_ms: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Records a residual and fails the check if it exceeds `tol`.
    pub fn residual(&mut self, name: &str, value: f64, tol: f64) {
        let value = value.abs();
        let slot = self.residuals.entry(name.to_string()).or_insert(0.0);
        *slot = if value.is_nan() { value } else { slot.max(value) };
        if !(value < tol) {
            self.status = self.status.max(Status::Fail);
        }
    }

    /// Marks the check failed, keeping at most a handful of replay inputs.
    pub fn fail(&mut self, input: impl Into<String>) {
        self.status = self.status.max(Status::Fail);
        if self.inputs.len() < 8 {
            self.inputs.push(input.into());
        }
    }

    pub fn require(&mut self, ok: bool, input: impl FnOnce() -> String) {
        if !ok {
            self.fail(input());
        }
    }

    pub fn witness(&mut self, w: impl Into<String>) {
        self.witnesses.push(w.into());
    }

    pub fn inexact(&mut self, reason: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::Inexact;
        }
        self.detail.get_or_insert_with(|| reason.into());
    }

    pub fn unsupported(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Unsupported;
        self.detail = Some(reason.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.detail = Some(text.into());
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Process exit code for a list of reports: 0 all pass, 1 any fail or
/// inexact, 3 otherwise unsupported.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(CheckReport::passed) {
        0
    } else if reports.iter().any(|r| matches!(r.status, Status::Fail | Status::Inexact)) {
        1
    } else {
        3
    }
}

#[derive(Serialize)]
struct Document<'a> {
    schema: u32,
    command: &'a str,
    reports: &'a [CheckReport],
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    narrative: &'a [String],
}

/// JSON document with a schema field.
pub fn render_machine(command: &str, reports: &[CheckReport], narrative: &[String]) -> String {
    let doc = Document { schema: SCHEMA_VERSION, command, reports, narrative };
    serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
}

/// One line per report, followed by any narrative.
pub fn render_text(reports: &[CheckReport], narrative: &[String]) -> String {
    let mut out = String::new();
    for line in narrative {
        let _ = writeln!(out, "{line}");
    }
    for r in reports {
        let _ = write!(out, "[{}] {} on {}", r.status.as_str(), r.check, r.system);
        if let Some(seed) = r.seed {
            let _ = write!(out, " (seed {seed})");
        }
        for (k, v) in &r.residuals {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                let _ = write!(out, " {k}={}", *v as i64);
            } else {
                let _ = write!(out, " {k}={v:.3e}");
            }
        }
        if let Some(ms) = r.wall_ms {
            let _ = write!(out, " {ms:.1}ms");
        }
        out.push('\n');
        if let Some(d) = &r.detail {
            let _ = writeln!(out, "    {d}");
        }
        for w in &r.witnesses {
            let _ = writeln!(out, "    witness: {w}");
        }
        for i in &r.inputs {
            let _ = writeln!(out, "    input: {i}");
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(out, "{passed}/{} checks passed", reports.len());
    out
}
