//! Check reports and the registry that produces them.

use std::fmt;
use std::time::{Duration, Instant};

use qsteenrod::Error;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A truncation window was too shallow to decide.
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a check body returns.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub defect: Option<Value>,
    pub detail: String,
}

impl Outcome {
    pub fn pass(detail: impl Into<String>) -> Self {
        Self { status: Status::Pass, defect: None, detail: detail.into() }
    }

    pub fn fail(detail: impl Into<String>, defect: Option<Value>) -> Self {
        Self { status: Status::Fail, defect, detail: detail.into() }
    }

    pub fn inconclusive(detail: impl Into<String>) -> Self {
        Self { status: Status::Inconclusive, defect: None, detail: detail.into() }
    }

    /// Pass iff `mismatches` is empty; the first few mismatches become the defect payload.
    pub fn from_mismatches(what: &str, checked: usize, mismatches: Vec<Value>) -> Self {
        if mismatches.is_empty() {
            Self::pass(format!("{checked} {what} agree"))
        } else {
            let n = mismatches.len();
            Self::fail(format!("{n} of {checked} {what} disagree"), Some(Value::Array(mismatches.into_iter().take(8).collect())))
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub check_id: String,
    /// Human-readable name of the identity being checked.
    pub anchor: String,
    pub status: Status,
    pub defect: Option<Value>,
    pub detail: String,
    pub wall_time: Duration,
}

impl CheckReport {
    /// JSON form. Wall time is included only on request so that runs stay byte-identical.
    pub fn to_json(&self, with_timing: bool) -> Value {
        let mut v = json!({
            "check_id": self.check_id,
            "anchor": self.anchor,
            "status": self.status.as_str(),
            "detail": self.detail,
            "defect": self.defect.clone().unwrap_or(Value::Null),
        });
        if with_timing {
            v["wall_time_ms"] = json!(self.wall_time.as_secs_f64() * 1e3);
        }
        v
    }

    pub fn table_row(&self) -> String {
        format!("{:<28} {:<13} {:>9.1} ms  {}  [{}]", self.check_id, self.status.as_str(), self.wall_time.as_secs_f64() * 1e3, self.detail, self.anchor)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct UnanchoredCheck(pub String);

impl fmt::Display for UnanchoredCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check `{}` has no anchor", self.0)
    }
}

impl std::error::Error for UnanchoredCheck {}

/// Map a library error to an outcome: shallow windows are inconclusive, anything else fails.
pub fn outcome_from_error(e: Error) -> Outcome {
    match e {
        Error::TruncationTooShallow(msg) => Outcome::inconclusive(msg),
        other => Outcome::fail(format!("error: {other}"), None),
    }
}

/// Ordered collection of reports.
#[derive(Debug, Default)]
pub struct Harness {
    reports: Vec<CheckReport>,
}

impl Harness {
    pub fn new() -> Self {
        Self::default()
    }

    /// Time and record one check. Checks without an anchor are refused.
    pub fn run(
        &mut self,
        check_id: &str,
        anchor: &str,
        body: impl FnOnce() -> Result<Outcome, Error>,
    ) -> Result<&CheckReport, UnanchoredCheck> {
        if anchor.trim().is_empty() {
            return Err(UnanchoredCheck(check_id.to_string()));
        }
        let start = Instant::now();
        let outcome = body().unwrap_or_else(outcome_from_error);
        self.reports.push(CheckReport {
            check_id: check_id.to_string(),
            anchor: anchor.to_string(),
            status: outcome.status,
            defect: outcome.defect,
            detail: outcome.detail,
            wall_time: start.elapsed(),
        });
        Ok(self.reports.last().expect("just pushed"))
    }

    pub fn reports(&self) -> &[CheckReport] {
        &self.reports
    }

    pub fn into_reports(self) -> Vec<CheckReport> {
        self.reports
    }

    pub fn any_failed(&self) -> bool {
        self.reports.iter().any(|r| r.status == Status::Fail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_are_required() {
        let mut h = Harness::new();
        assert_eq!(h.run("x", " ", || Ok(Outcome::pass(""))).unwrap_err(), UnanchoredCheck("x".into()));
        assert!(h.run("y", "identity", || Ok(Outcome::pass("ok"))).is_ok());
        assert_eq!(h.reports().len(), 1);
    }

    #[test]
    fn shallow_windows_are_inconclusive() {
        let mut h = Harness::new();
        let r = h.run("z", "identity", || Err(Error::TruncationTooShallow("q".into()))).unwrap();
        assert_eq!(r.status, Status::Inconclusive);
        let r = h.run("w", "identity", || Err(Error::NotFlat)).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(h.any_failed());
    }

    #[test]
    fn json_is_timing_free_by_default() {
        let mut h = Harness::new();
        h.run("a", "identity", || Ok(Outcome::pass("ok"))).unwrap();
        let v = h.reports()[0].to_json(false);
        assert!(v.get("wall_time_ms").is_none());
        assert_eq!(v["status"], "pass");
    }
}
