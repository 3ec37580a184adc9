//! Job files: a line-oriented format.
//!
//! ```text
//! # comment
//! [label]
//! kind = sl2
//! zeta = 3:1
//! ```
//!
//! A `[label]` header opens a job; `key = value` lines fill it. Keys such as
//! `row` and `element` may repeat; their order is kept.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error in job {job:?}, field {field:?}: {message}")]
    Validation { job: String, field: String, message: String },
    #[error("unknown suite {0:?} (expected paper_identities, wach_grid or bernoulli_table)")]
    UnknownSuite(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Bracket,
    VerifyHomlie,
    Sl2,
    Lvalues,
    Lbracket,
    OperatorConvert,
    NablaVerify,
    Wach,
    Filtration,
    Sweep,
}

impl JobKind {
    pub const ALL: [JobKind; 10] = [
        JobKind::Bracket,
        JobKind::VerifyHomlie,
        JobKind::Sl2,
        JobKind::Lvalues,
        JobKind::Lbracket,
        JobKind::OperatorConvert,
        JobKind::NablaVerify,
        JobKind::Wach,
        JobKind::Filtration,
        JobKind::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JobKind::Bracket => "bracket",
            JobKind::VerifyHomlie => "verify_homlie",
            JobKind::Sl2 => "sl2",
            JobKind::Lvalues => "lvalues",
            JobKind::Lbracket => "lbracket",
            JobKind::OperatorConvert => "operator_convert",
            JobKind::NablaVerify => "nabla_verify",
            JobKind::Wach => "wach",
            JobKind::Filtration => "filtration",
            JobKind::Sweep => "sweep",
        }
    }
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JobKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        JobKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown job kind {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "structured" => Ok(OutputFormat::Structured),
            _ => Err(format!("unknown output format {s:?} (text or structured)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub key: String,
    pub value: String,
    /// 1-based line in the job file; 0 for jobs built in code.
    #[serde(skip)]
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub label: String,
    pub kind: JobKind,
    pub params: Vec<Param>,
    pub output: Option<OutputFormat>,
    pub seed: Option<u64>,
}

impl JobSpec {
    pub fn new(label: impl Into<String>, kind: JobKind) -> Self {
        JobSpec {
            label: label.into(),
            kind,
            params: Vec::new(),
            output: None,
            seed: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push(Param {
            key: key.into(),
            value: value.to_string(),
            line: 0,
        });
        self
    }

    pub fn get(&self, key: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.key == key)
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Param> + 'a {
        self.params.iter().filter(move |p| p.key == key)
    }

    pub fn parse_error(&self, p: &Param, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line: p.line,
            message: format!("job {:?}, {} = {:?}: {}", self.label, p.key, p.value, message.into()),
        }
    }

    pub fn invalid(&self, field: &str, message: impl Into<String>) -> CliError {
        CliError::Validation {
            job: self.label.clone(),
            field: field.into(),
            message: message.into(),
        }
    }

    /// Parses a scalar field; syntax errors name the line.
    pub fn scalar<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(p) => p
                .value
                .trim()
                .parse::<T>()
                .map(Some)
                .map_err(|_| self.parse_error(p, format!("expected a {}", std::any::type_name::<T>()))),
        }
    }

    pub fn scalar_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.scalar(key)?.unwrap_or(default))
    }

    pub fn required<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.scalar(key)?.ok_or_else(|| self.invalid(key, "missing required field"))
    }

    /// Whitespace- or comma-separated integers.
    pub fn int_list(&self, p: &Param) -> Result<Vec<i64>, CliError> {
        p.value
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| self.parse_error(p, format!("{t:?} is not an integer"))))
            .collect()
    }

    pub fn int_list_or(&self, key: &str, default: &[i64]) -> Result<Vec<i64>, CliError> {
        match self.get(key) {
            Some(p) => self.int_list(p),
            None => Ok(default.to_vec()),
        }
    }
}

/// Parses a whole job file. Labels must be unique.
pub fn parse_jobs(text: &str) -> Result<Vec<JobSpec>, CliError> {
    let mut jobs: Vec<JobSpec> = Vec::new();
    let mut current: Option<(JobSpec, bool, usize)> = None;
    let err = |line: usize, message: String| CliError::Parse { line, message };

    fn finish(jobs: &mut Vec<JobSpec>, cur: Option<(JobSpec, bool, usize)>) -> Result<(), CliError> {
        if let Some((job, has_kind, line)) = cur {
            if !has_kind {
                return Err(CliError::Parse {
                    line,
                    message: format!("job {:?} has no kind", job.label),
                });
            }
            if jobs.iter().any(|j| j.label == job.label) {
                return Err(CliError::Parse {
                    line,
                    message: format!("duplicate job label {:?}", job.label),
                });
            }
            jobs.push(job);
        }
        Ok(())
    }

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let label = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.contains(char::is_whitespace))
                .ok_or_else(|| err(line, format!("bad job header {s:?}")))?;
            finish(&mut jobs, current.take())?;
            current = Some((JobSpec::new(label, JobKind::Bracket), false, line));
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, _)| !k.is_empty() && !k.contains(char::is_whitespace))
            .ok_or_else(|| err(line, format!("expected `key = value`, found {s:?}")))?;
        let (job, has_kind, _) = current
            .as_mut()
            .ok_or_else(|| err(line, "field before the first [label] header".into()))?;
        match key {
            "kind" => {
                job.kind = value.parse().map_err(|m| err(line, m))?;
                *has_kind = true;
            }
            "output" => job.output = Some(value.parse().map_err(|m| err(line, m))?),
            "seed" => job.seed = Some(value.parse().map_err(|_| err(line, format!("seed {value:?} is not an integer")))?),
            _ => job.params.push(Param {
                key: key.into(),
                value: value.into(),
                line,
            }),
        }
    }
    finish(&mut jobs, current)?;
    Ok(jobs)
}
