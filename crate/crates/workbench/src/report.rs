//! Structured reports.
//!
//! Checks are sorted by name when the report is finished, so the bytes do
//! not depend on evaluation order. Timing is `null` unless requested.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One check with the inputs needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub witness: Value,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, ok: bool, witness: Value) -> Self {
        CheckRecord { name: name.into(), status: Status::of(ok), witness }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub output: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub status: Status,
    pub timing_ms: Option<u64>,
    pub version: String,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            params: BTreeMap::new(),
            output: Vec::new(),
            checks: Vec::new(),
            status: Status::Pass,
            timing_ms: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.output.push(s.into());
        self
    }

    /// Adds each line of a multi-line display.
    pub fn lines(&mut self, s: &str) -> &mut Self {
        self.output.extend(s.lines().map(str::to_string));
        self
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, witness: Value) -> &mut Self {
        self.checks.push(CheckRecord::new(name, ok, witness));
        self
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckRecord>) -> &mut Self {
        self.checks.extend(checks);
        self
    }

    /// Sorts checks by name and sets the overall status.
    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.status = Status::of(self.checks.iter().all(CheckRecord::passed));
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "workbench {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "  {} = {}", k, v);
        }
        for l in &self.output {
            let _ = writeln!(s, "{}", l);
        }
        for c in &self.checks {
            match c.status {
                Status::Pass => {
                    let _ = writeln!(s, "pass  {}", c.name);
                }
                Status::Fail => {
                    let _ = writeln!(s, "FAIL  {}  {}", c.name, c.witness);
                }
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        let _ = write!(s, "status: {}", if failed == 0 { "pass" } else { "fail" });
        let _ = writeln!(s, " ({} checks, {} failed)", self.checks.len(), failed);
        if let Some(t) = self.timing_ms {
            let _ = writeln!(s, "time: {} ms", t);
        }
        s
    }
}
