//! Job and suite reports, rendered as aligned text or versioned JSON.

use std::fmt::Write as _;

use homlie_core::VerificationReport;
use serde::{Deserialize, Serialize};

use crate::job::JobSpec;

pub const SCHEMA: &str = "homlie-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// An exact value (`pass` absent) or a checked residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub label: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub job: JobSpec,
    pub results: Vec<Entry>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    /// Wall time; shown in text output only so structured output stays reproducible.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl Report {
    pub fn new(job: &JobSpec) -> Self {
        Report {
            job: job.clone(),
            results: Vec::new(),
            status: Status::Pass,
            error: None,
            elapsed_ms: 0,
        }
    }

    pub fn value(&mut self, label: impl Into<String>, value: impl ToString) {
        self.results.push(Entry {
            label: label.into(),
            value: value.to_string(),
            pass: None,
        });
    }

    pub fn check(&mut self, label: impl Into<String>, residual: impl ToString, pass: bool) {
        self.results.push(Entry {
            label: label.into(),
            value: residual.to_string(),
            pass: Some(pass),
        });
    }

    pub fn absorb(&mut self, prefix: &str, r: &VerificationReport) {
        for e in &r.entries {
            let label = if prefix.is_empty() { e.label.clone() } else { format!("{prefix}: {}", e.label) };
            self.check(label, &e.residual, e.pass);
        }
    }

    pub fn fail_with(&mut self, message: String) {
        self.error = Some(message);
    }

    /// Error if an error was recorded, else pass iff every check passed.
    pub fn finalize(&mut self) {
        self.status = if self.error.is_some() {
            Status::Error
        } else if self.results.iter().all(|e| e.pass != Some(false)) {
            Status::Pass
        } else {
            Status::Fail
        };
    }

    pub fn find(&self, label: &str) -> Option<&Entry> {
        self.results.iter().find(|e| e.label == label)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.results.iter().filter(|e| e.pass == Some(false))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub seed: u64,
    pub status: Status,
    pub jobs: Vec<Report>,
}

/// A single `homlie run` output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub status: Status,
    pub jobs: Vec<Report>,
}

pub fn overall(jobs: &[Report]) -> Status {
    if jobs.iter().any(|j| j.status == Status::Error) {
        Status::Error
    } else if jobs.iter().all(|j| j.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn to_structured<T: Serialize>(r: &T) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
    s.push('\n');
    s
}

pub fn render_text(title: &str, jobs: &[Report], status: Status) -> String {
    let mut out = String::new();
    for job in jobs {
        let _ = writeln!(
            out,
            "== {} ({}) : {} [{} ms]",
            job.job.label,
            job.job.kind,
            job.status.name().to_uppercase(),
            job.elapsed_ms
        );
        let width = job.results.iter().map(|e| e.label.chars().count()).max().unwrap_or(0);
        for e in &job.results {
            let tag = match e.pass {
                None => "     ",
                Some(true) => "ok   ",
                Some(false) => "FAIL ",
            };
            let _ = writeln!(out, "  {tag}{:<width$}  {}", e.label, e.value);
        }
        if let Some(err) = &job.error {
            let _ = writeln!(out, "  ERROR {err}");
        }
    }
    let _ = writeln!(out, "{title}: {}", status.name().to_uppercase());
    out
}
