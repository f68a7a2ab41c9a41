//! The CLI verbs, rendered as text or machine documents.

use std::path::Path;

use prodsys_core::{
    norm_diagonal, wick_multiply, Computed, Error, FockRep, Representation, Truncation, WickElement,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{SystemConfig, SCHEMA_VERSION};
use crate::demos::{run_demo, DEMOS};
use crate::report::{exit_code, render_machine, render_text};
use crate::suites::{run_check_suite, SuiteError, SuiteOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

/// Rendered output and process exit code of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit code for a core error: unsupported operations are 3, bad input 2.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedTruncation(_) | Error::DenseDimension { .. } | Error::NotCompact(_) => EXIT_UNSUPPORTED,
        _ => EXIT_CONFIG,
    }
}

fn failure(command: &str, format: Format, code: i32, message: String) -> Output {
    let stdout = match format {
        Format::Text => String::new(),
        Format::Machine => document(command, "error", json!({ "error": message })),
    };
    Output { code, stdout, stderr: format!("error: {message}\n") }
}

fn core_failure(command: &str, format: Format, e: Error) -> Output {
    failure(command, format, error_code(&e), e.to_string())
}

fn document(command: &str, status: &str, result: Value) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        command: &'a str,
        status: &'a str,
        result: Value,
    }
    serde_json::to_string_pretty(&Doc { schema: SCHEMA_VERSION, command, status, result }).expect("serializable") + "\n"
}

fn value_output(command: &str, format: Format, computed: Computed<(String, Value)>) -> Output {
    let (code, status, note) = match &computed {
        Computed::Exact(_) => (EXIT_PASS, "pass", None),
        Computed::Inexact { reason, .. } => (EXIT_FAIL, "inexact", Some(reason.clone())),
    };
    let (text, mut value) = computed.into_value();
    if let (Some(n), Value::Object(map)) = (&note, &mut value) {
        map.insert("inexact_reason".into(), Value::String(n.clone()));
    }
    let stdout = match format {
        Format::Text => match note {
            Some(n) => format!("{text}\n(inexact: {n})\n"),
            None => format!("{text}\n"),
        },
        Format::Machine => document(command, status, value),
    };
    Output { code, stdout, stderr: String::new() }
}

pub fn join(cfg: &SystemConfig, s: &str, t: &str, format: Format) -> Output {
    let m = cfg.monoid();
    let (s, t) = match (m.parse(s), m.parse(t)) {
        (Ok(s), Ok(t)) => (s, t),
        (Err(e), _) | (_, Err(e)) => return core_failure("join", format, e),
    };
    let j = m.join(&s, &t);
    let text = match j.finite() {
        Some(x) => m.format(x),
        None => "inf".to_string(),
    };
    let value = json!({ "s": m.format(&s), "t": m.format(&t), "join": text });
    value_output("join", format, Computed::Exact((text, value)))
}

pub fn leq(cfg: &SystemConfig, s: &str, t: &str, format: Format) -> Output {
    let m = cfg.monoid();
    let (s, t) = match (m.parse(s), m.parse(t)) {
        (Ok(s), Ok(t)) => (s, t),
        (Err(e), _) | (_, Err(e)) => return core_failure("leq", format, e),
    };
    let r = m.leq(&s, &t);
    let value = json!({ "s": m.format(&s), "t": m.format(&t), "leq": r });
    value_output("leq", format, Computed::Exact((r.to_string(), value)))
}

fn element_value(cfg: &SystemConfig, x: &WickElement) -> (String, Value) {
    let text = x.display(cfg.monoid()).to_string();
    let value = json!({ "element": text, "terms": x.len() });
    (text, value)
}

pub fn wick_mul(cfg: &SystemConfig, a: &str, b: &str, format: Format) -> Output {
    let sys = &cfg.system;
    let (a, b) = match (WickElement::parse(a, sys), WickElement::parse(b, sys)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return core_failure("wick-mul", format, e),
    };
    match wick_multiply(sys, &a, &b) {
        Ok(c) => value_output("wick-mul", format, c.map(|x| element_value(cfg, &x))),
        Err(e) => core_failure("wick-mul", format, e),
    }
}

pub fn expect(cfg: &SystemConfig, x: &str, format: Format) -> Output {
    match WickElement::parse(x, &cfg.system) {
        Ok(x) => value_output("expect", format, Computed::Exact(element_value(cfg, &x.phi_delta()))),
        Err(e) => core_failure("expect", format, e),
    }
}

pub fn norm_diag(cfg: &SystemConfig, x: &str, format: Format) -> Output {
    let x = match WickElement::parse(x, &cfg.system) {
        Ok(x) => x,
        Err(e) => return core_failure("norm-diag", format, e),
    };
    match norm_diagonal(&cfg.system, &x) {
        Ok(c) => value_output(
            "norm-diag",
            format,
            c.map(|cert| {
                let a = cfg.monoid().format(&cert.a);
                let text = format!("{:.12} (attained at a = {a}, block dimension {})", cert.value, cert.matrix_dim);
                (text, json!({ "value": cert.value, "a": a, "matrix_dim": cert.matrix_dim }))
            }),
        ),
        Err(e) => core_failure("norm-diag", format, e),
    }
}

pub fn fock(cfg: &SystemConfig, x: &str, bound: Option<u32>, matrix_out: Option<&Path>, format: Format) -> Output {
    let truncation = match bound {
        Some(l) => Truncation::Length(l),
        None => match cfg.require_truncation() {
            Ok(t) => t.clone(),
            Err(e) => return failure("fock", format, EXIT_CONFIG, e.to_string()),
        },
    };
    let x = match WickElement::parse(x, &cfg.system) {
        Ok(x) => x,
        Err(e) => return core_failure("fock", format, e),
    };
    let rep = match FockRep::new(&cfg.system, &truncation) {
        Ok(r) => r,
        Err(e) => return core_failure("fock", format, e),
    };
    let op = match rep.represent(&x) {
        Ok(op) => op,
        Err(e) => return core_failure("fock", format, e),
    };
    let n = rep.dim();
    let trusted = (0..n).filter(|&j| op.col_exact(j)).count();
    if let Some(path) = matrix_out {
        let basis = rep.basis();
        let labels: Vec<String> =
            (0..n).map(|i| format!("{}:{}", cfg.monoid().format(basis.grade_of(i)), basis.label_of(i))).collect();
        let entries: Vec<(usize, usize, f64, f64)> = op.matrix.triplets().map(|(i, j, c)| (i, j, c.re, c.im)).collect();
        let exact_cols: Vec<bool> = (0..n).map(|j| op.col_exact(j)).collect();
        let doc = json!({ "schema": SCHEMA_VERSION, "dim": n, "basis": labels, "entries": entries, "exact_columns": exact_cols });
        let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            return failure("fock", format, EXIT_CONFIG, format!("cannot write {}: {e}", path.display()));
        }
    }
    let norm = op.norm();
    let text = format!(
        "dim {n}, nonzeros {}, trusted columns {trusted}/{n}, norm of trusted part {norm:.12}",
        op.matrix.nnz()
    );
    let value = json!({ "dim": n, "nnz": op.matrix.nnz(), "trusted_columns": trusted, "norm": norm });
    value_output("fock", format, Computed::Exact((text, value)))
}

pub fn check(cfg: Option<&SystemConfig>, suite: &str, opts: SuiteOptions, format: Format) -> Output {
    match run_check_suite(cfg, suite, opts) {
        Ok(reports) => {
            let stdout = match format {
                Format::Text => render_text(&reports, &[]),
                Format::Machine => render_machine("check", &reports, &[]),
            };
            Output { code: exit_code(&reports), stdout, stderr: String::new() }
        }
        Err(e @ SuiteError::UnknownSuite(_)) | Err(e @ SuiteError::Config(_)) => {
            failure("check", format, EXIT_CONFIG, e.to_string())
        }
    }
}

pub fn demo(name: &str, format: Format) -> Output {
    let Some(outcome) = run_demo(name) else {
        return failure("demo", format, EXIT_CONFIG, format!("unknown demo {name:?}; known: {}", DEMOS.join(", ")));
    };
    let stdout = match format {
        Format::Text => render_text(&outcome.reports, &outcome.narrative),
        Format::Machine => render_machine("demo", &outcome.reports, &outcome.narrative),
    };
    Output { code: exit_code(&outcome.reports), stdout, stderr: String::new() }
}
