//! Batch driver for the homlie verification jobs.

pub mod job;
pub mod report;
pub mod run;
pub mod suite;

pub use job::{parse_jobs, CliError, JobKind, JobSpec, OutputFormat, Param};
pub use report::{overall, render_text, to_structured, Entry, Report, RunReport, Status, SuiteReport, SCHEMA};
pub use run::{run_job, RunOptions};
pub use suite::{corpus, run_jobs, run_suite, suite_jobs, SUITES};

/// 0 pass, 1 verification failure or math error, 2 input error.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => 0,
        Status::Fail | Status::Error => 1,
    }
}

pub const INPUT_ERROR: i32 = 2;

/// `homlie run`: parse the file, run every job, render.
pub fn run_file(text: &str, format: Option<OutputFormat>, opts: &RunOptions) -> Result<(String, i32), CliError> {
    let jobs = parse_jobs(text)?;
    let reports = run_jobs(&jobs, opts)?;
    let status = overall(&reports);
    // a job may request its own format; the command line wins
    let fmt = format
        .or_else(|| jobs.iter().find_map(|j| j.output))
        .unwrap_or_default();
    let out = match fmt {
        OutputFormat::Text => render_text("run", &reports, status),
        OutputFormat::Structured => to_structured(&RunReport {
            schema: SCHEMA.to_string(),
            status,
            jobs: reports,
        }),
    };
    Ok((out, exit_code(status)))
}

/// `homlie suite`: run a named suite and render.
pub fn suite_output(name: &str, format: OutputFormat, opts: &RunOptions) -> Result<(String, i32), CliError> {
    let rep = run_suite(name, opts)?;
    let out = match format {
        OutputFormat::Text => render_text(&format!("suite {name}"), &rep.jobs, rep.status),
        OutputFormat::Structured => to_structured(&rep),
    };
    Ok((out, exit_code(rep.status)))
}
