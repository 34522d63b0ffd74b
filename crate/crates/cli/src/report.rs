//! JSON envelope and CSV tables shared by every subcommand.
//!
//! Exact numbers are written as decimal strings (`"-1/9"`, `"5832"`). Floats
//! only appear under keys ending in `_approx`.

use std::fmt::Display;

use serde_json::{json, Map, Value};

pub const TOOL: &str = "kchains";

/// String form of an exact value.
pub fn num<T: Display>(v: T) -> Value {
    Value::String(v.to_string())
}

pub fn nums<T: Display>(vs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(vs.into_iter().map(num).collect())
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let escape = |f: &String| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        };
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&row.iter().map(escape).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub pass: bool,
    pub checks: u64,
    pub failures: u64,
    pub note: Option<String>,
}

impl Summary {
    /// No assertions were made.
    pub fn info() -> Self {
        Summary { pass: true, checks: 0, failures: 0, note: None }
    }

    pub fn of_checks(checks: u64, failures: u64) -> Self {
        Summary { pass: failures == 0, checks, failures, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub structure: Option<String>,
    pub seeds: Vec<u64>,
    pub payload: Value,
    pub summary: Summary,
    /// Row form for `--format csv`; `None` when the result is not tabular.
    pub table: Option<Table>,
    /// Point-set text, for constructions.
    pub text: Option<String>,
}

impl Outcome {
    pub fn new(payload: Value, summary: Summary) -> Self {
        Outcome { structure: None, seeds: Vec::new(), payload, summary, table: None, text: None }
    }

    pub fn structure(mut self, s: impl Into<String>) -> Self {
        self.structure = Some(s.into());
        self
    }

    pub fn seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    pub fn text(mut self, t: String) -> Self {
        self.text = Some(t);
        self
    }

    pub fn envelope(&self, command: &str, argv: &[String]) -> Value {
        let mut summary = Map::new();
        summary.insert("pass".into(), Value::Bool(self.summary.pass));
        summary.insert("checks".into(), num(self.summary.checks));
        summary.insert("failures".into(), num(self.summary.failures));
        if let Some(n) = &self.summary.note {
            summary.insert("note".into(), Value::String(n.clone()));
        }
        json!({
            "tool": TOOL,
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "argv": argv,
            "structure": self.structure,
            "seeds": nums(&self.seeds),
            "payload": self.payload,
            "summary": Value::Object(summary),
        })
    }
}
