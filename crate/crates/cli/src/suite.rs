//! Named suites: fixed job lists run together, reported in label order.

use std::thread;

use homlie_core::MonomialEndo;

use crate::job::{CliError, JobKind, JobSpec};
use crate::report::{overall, SuiteReport, SCHEMA};
use crate::run::{run_job, RunOptions};

pub const SUITES: [&str; 3] = ["paper_identities", "wach_grid", "bernoulli_table"];

fn endo(rows: &[&[i64]], orders: &[u64], powers: &[i64]) -> MonomialEndo {
    MonomialEndo::from_roots(rows.iter().map(|r| r.to_vec()).collect(), orders, powers, 1).expect("valid corpus entry")
}

/// Monomial endomorphisms on at most four variables used by the sweeps.
pub fn corpus() -> Vec<(String, MonomialEndo)> {
    let entries = vec![
        ("rotation", endo(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 1]], &[4, 2, 3], &[1, 1, 1])),
        ("swap", endo(&[&[0, 1], &[1, 0]], &[1, 1], &[0, 0])),
        ("swap-zeta3", endo(&[&[0, 1], &[1, 0]], &[3, 3], &[1, 2])),
        ("scalar-zeta6", endo(&[&[1]], &[6], &[1])),
        ("inversion", endo(&[&[-1]], &[1], &[0])),
        ("cube", endo(&[&[3]], &[1], &[0])),
        ("cat-map", endo(&[&[2, 1], &[1, 1]], &[3, 4], &[1, 1])),
        ("order-three", endo(&[&[0, -1], &[1, -1]], &[1, 1], &[0, 0])),
        ("diagonal-sign", endo(&[&[1, 0], &[0, 1]], &[2, 1], &[1, 0])),
        ("shear", endo(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, -1]], &[1, 1, 5], &[0, 0, 1])),
        (
            "cycle4",
            endo(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0]], &[1, 1, 1, 1], &[0, 0, 0, 0]),
        ),
        (
            "rotation-swap",
            endo(&[&[0, 1, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]], &[1, 1, 4, 4], &[0, 0, 1, 3]),
        ),
    ];
    entries.into_iter().map(|(n, e)| (n.to_string(), e)).collect()
}

fn rotation_rows(job: JobSpec) -> JobSpec {
    job.with("row", "0 1 0").with("row", "-1 0 0").with("row", "0 0 1").with("zeta", "4:1 2:1 3:1")
}

fn paper_identities() -> Vec<JobSpec> {
    let mut jobs = vec![
        JobSpec::new("homlie_sweep", JobKind::Sweep),
        rotation_rows(JobSpec::new("rotation_witt", JobKind::Bracket))
            .with("derivation", "generator")
            .with("x", "1 * e^[1,0,0]")
            .with("y", "2:[1] * e^[0,-1,1]")
            .with("witt_axis", 2),
        rotation_rows(JobSpec::new("rotation_sl2_triple", JobKind::VerifyHomlie))
            .with("derivation", "unscaled")
            .with("element", "-1 * e^[0,0,-1]")
            .with("element", "-1 * e^[0,0,0]")
            .with("element", "-1 * e^[0,0,1]"),
        rotation_rows(JobSpec::new("rotation_operator_convert", JobKind::OperatorConvert)).with("degree", 8),
        JobSpec::new("sl2_zeta3", JobKind::Sl2).with("zeta", "3:1"),
        JobSpec::new("sl2_zeta5", JobKind::Sl2).with("zeta", "5:2"),
        JobSpec::new("lvalue_zeta_minus_one", JobKind::Lvalues).with("modulus", 1).with("n", 2),
    ];
    for (m, chi, theta, j) in [(5u64, "1", "2", 3i64), (7, "1", "3", 5), (8, "1 0", "0 1", 3), (12, "1 1", "0 1", 5)] {
        jobs.push(
            JobSpec::new(format!("lbracket_m{m}"), JobKind::Lbracket)
                .with("modulus", m)
                .with("chi", chi)
                .with("theta", theta)
                .with("j", j),
        );
    }
    jobs
}

fn wach_grid() -> Vec<JobSpec> {
    let mut jobs = Vec::new();
    for p in [2u64, 3, 5] {
        for k in 2..=5u32 {
            for alpha in [0, p, p * p] {
                let base = |label: String, kind| {
                    JobSpec::new(label, kind)
                        .with("p", p)
                        .with("k", k)
                        .with("alpha", alpha)
                        .with("pi_precision", 12)
                        .with("p_precision", 20)
                };
                jobs.push(base(format!("wach_p{p}_k{k}_a{alpha}"), JobKind::Wach));
                jobs.push(base(format!("filtration_p{p}_k{k}_a{alpha}"), JobKind::Filtration));
            }
        }
    }
    jobs
}

fn bernoulli_table() -> Vec<JobSpec> {
    (1..=8u64)
        .map(|m| JobSpec::new(format!("bernoulli_m{m}"), JobKind::Lvalues).with("modulus", m).with("n", "1 2 3 4"))
        .collect()
}

pub fn suite_jobs(name: &str) -> Result<Vec<JobSpec>, CliError> {
    match name {
        "paper_identities" => Ok(paper_identities()),
        "wach_grid" => Ok(wach_grid()),
        "bernoulli_table" => Ok(bernoulli_table()),
        other => Err(CliError::UnknownSuite(other.to_string())),
    }
}

/// Runs jobs concurrently and returns the reports sorted by label.
pub fn run_jobs(jobs: &[JobSpec], opts: &RunOptions) -> Result<Vec<crate::report::Report>, CliError> {
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|j| s.spawn(move || run_job(j, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("job thread panicked")).collect()
    });
    let mut reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(|a, b| a.job.label.cmp(&b.job.label));
    Ok(reports)
}

pub fn run_suite(name: &str, opts: &RunOptions) -> Result<SuiteReport, CliError> {
    let jobs = suite_jobs(name)?;
    let reports = run_jobs(&jobs, opts)?;
    Ok(SuiteReport {
        schema: SCHEMA.to_string(),
        suite: name.to_string(),
        seed: opts.seed.unwrap_or(0),
        status: overall(&reports),
        jobs: reports,
    })
}
