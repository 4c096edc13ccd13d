//! The `report-v1` JSON schema and its human rendering.
//!
//! Both renderings are produced from the same [`Report`] value.

use std::fmt::Write as _;

use mia_core::{Alphabet, Clause, Verdict, Witness};
use serde::Serialize;
use serde_json::Value;

pub const FORMAT: &str = "report-v1";

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SymbolReport {
    /// `missing` (mandatory output absent) or `extra` (output not allowed).
    pub kind: String,
    pub symbol: String,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Stats {
    /// State count of each input model, in argument order.
    pub states: Vec<usize>,
    /// May-transition count of each input model.
    pub transitions: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explored_pairs: Option<usize>,
    /// Present only with `--timings`, so that default output is reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub format: &'static str,
    pub command: Vec<String>,
    /// Short outcome word: `holds`, `fails`, `valid`, `invalid`, `ok`, or a
    /// harness status.
    pub status: String,
    pub holds: Option<bool>,
    pub clause: Option<String>,
    pub witness_trace: Option<String>,
    pub missing_or_extra_symbol: Option<SymbolReport>,
    pub details: Value,
    pub warnings: Vec<String>,
    pub stats: Stats,
}

impl Report {
    pub fn new(command: Vec<String>, status: impl Into<String>) -> Self {
        Report {
            format: FORMAT,
            command,
            status: status.into(),
            holds: None,
            clause: None,
            witness_trace: None,
            missing_or_extra_symbol: None,
            details: Value::Null,
            warnings: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub fn verdict(mut self, holds: bool) -> Self {
        self.holds = Some(holds);
        self.status = if holds { "holds" } else { "fails" }.to_string();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command.first().map_or("mia", |s| s), self.status);
        if let Some(c) = &self.clause {
            let _ = writeln!(out, "  clause:  {c}");
        }
        if let Some(t) = &self.witness_trace {
            let _ = writeln!(out, "  trace:   {}", if t.is_empty() { "ε" } else { t });
        }
        if let Some(s) = &self.missing_or_extra_symbol {
            let _ = writeln!(out, "  {}:{} {}", s.kind, " ".repeat(7usize.saturating_sub(s.kind.len())), s.symbol);
        }
        render_value(&mut out, &self.details, 1);
        for w in &self.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
        out
    }
}

fn render_value(out: &mut String, value: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_value(out, v, indent + 1);
                    }
                    Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        for item in items {
                            let _ = writeln!(out, "{pad}  -");
                            render_value(out, item, indent + 2);
                        }
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {}", scalar(v));
                    }
                }
            }
        }
        Value::Null => {}
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        Value::Null => "-".to_string(),
        other => other.to_string(),
    }
}

/// Short clause name used in reports.
pub fn clause_name(c: Clause) -> &'static str {
    match c {
        Clause::MustInclusion => "must",
        Clause::MayInclusion => "may",
        Clause::Classic => "ioco",
        Clause::MayTraces => "may-traces",
        Clause::MustTraces => "must-traces",
    }
}

pub fn trace_text(trace: &mia_core::Trace, alphabet: &Alphabet) -> String {
    trace.tokens(alphabet).join(" ")
}

pub fn witness_json(w: &Witness, alphabet: &Alphabet) -> Value {
    let mut v = serde_json::json!({
        "clause": clause_name(w.clause),
        "trace": trace_text(&w.trace, alphabet),
        "symbol": w.symbol.name(alphabet),
        "kind": w.kind(),
    });
    if let Some((i, s)) = &w.outs {
        let names = |o: &mia_core::OutSet| -> Vec<String> {
            o.symbols().iter().map(|x| x.name(alphabet).to_string()).collect()
        };
        v["out_impl"] = names(i).into();
        v["out_spec"] = names(s).into();
    }
    v
}

/// Fills the verdict fields of `report` from a conformance verdict.
pub fn apply_verdict(mut report: Report, verdict: &Verdict, alphabet: &Alphabet) -> Report {
    report = report.verdict(verdict.holds);
    if let Some(w) = &verdict.witness {
        report.clause = Some(clause_name(w.clause).to_string());
        report.witness_trace = Some(trace_text(&w.trace, alphabet));
        report.missing_or_extra_symbol = Some(SymbolReport {
            kind: w.kind().to_string(),
            symbol: w.symbol.name(alphabet).to_string(),
        });
    }
    let clauses: Vec<Value> = verdict
        .clauses
        .iter()
        .map(|c| {
            let mut v = serde_json::json!({
                "clause": clause_name(c.clause),
                "holds": c.holds,
                "explored_pairs": c.stats.explored_pairs,
            });
            if let Some(w) = &c.witness {
                v["witness"] = witness_json(w, alphabet);
            }
            v
        })
        .collect();
    report.details = serde_json::json!({ "clauses": clauses });
    report.stats.explored_pairs = Some(verdict.stats.explored_pairs);
    report
}
