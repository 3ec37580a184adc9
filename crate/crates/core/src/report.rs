//! Verification reports: one labelled residual per checked identity.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub label: String,
    pub residual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub title: String,
    pub entries: Vec<ReportEntry>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        VerificationReport {
            title: title.into(),
            entries: Vec::new(),
        }
    }

    /// Record a residual; `zero` decides pass/fail.
    pub fn push(&mut self, label: impl Into<String>, residual: impl Into<String>, zero: bool) {
        self.entries.push(ReportEntry {
            label: label.into(),
            residual: residual.into(),
            pass: zero,
        });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.title.is_empty() {
            writeln!(f, "# {}", self.title)?;
        }
        for e in &self.entries {
            writeln!(f, "{}: residual = {}", e.label, e.residual)?;
        }
        Ok(())
    }
}
