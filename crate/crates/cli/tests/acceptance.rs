//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Some criteria include printed closed forms that the exact computation
//! refutes. Those clauses are listed in `KNOWN_DEVIATIONS` with the reason.
//! The binary exits nonzero when a clause fails that is not listed, or when a
//! listed clause unexpectedly passes.

use std::process::{Command, ExitCode};
use std::time::Instant;

use homlie_cli::{corpus, run_job, run_suite, suite_jobs, JobKind, JobSpec, Report, RunOptions, Status};
use homlie_core::exactnum::{rat, rat_int};
use homlie_core::galmod::{sl2_extract, verify_sl2};
use homlie_core::lfunc::{
    enumerate_characters, gen_bernoulli, l_special, l_special_bracket, lsym_bracket, specialize, BernoulliCache, DirichletCharacter,
    VirtualCharacter,
};
use homlie_core::twistder::{first_unsigned_failure, hl_bracket, HomLieElement, TwistedDerivation};
use homlie_core::{CycloNumber, ExponentVector, LaurentPoly, Rational};

const SEED: u64 = 7;

/// (criterion, clause name, reason the printed form fails).
const KNOWN_DEVIATIONS: &[(u32, &str, &str)] = &[
    (3, "printed sl2 q", "the relation <<B-1,B0>> = -2q B-1 forces q = zeta^-1; the printed form equals -zeta^-1"),
    (3, "printed sl2 bc", "the relation <<B1,B-1>> = (q+1)/2 B0 forces bc = 1/(1-zeta)^2, not 1/(1-zeta^2)"),
    (6, "R6 as printed, p = 2", "R6 holds with chi^-1 in place of chi"),
    (6, "R6 as printed, p = 3", "R6 holds with chi^-1 in place of chi"),
    (6, "R6 as printed, p = 5", "R6 holds with chi^-1 in place of chi"),
    (
        7,
        "action tables vs displayed forms",
        "the displayed phi-image of a pi^i nabla(e1) omits its e1 component; the displayed reduction of e1 reads q for p; \
         the displayed gamma rows assume a diagonal gamma-matrix, which holds only for alpha = 0",
    ),
];

struct Clause {
    name: String,
    pass: bool,
    detail: String,
}

fn clause(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Clause {
    Clause {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn opts(literal: bool) -> RunOptions {
    RunOptions {
        seed: Some(SEED),
        paper_lemma_literal: literal,
    }
}

fn checks<'a>(r: &'a Report, pat: &'a str) -> impl Iterator<Item = &'a homlie_cli::Entry> + 'a {
    r.results.iter().filter(move |e| e.pass.is_some() && e.label.contains(pat))
}

/// (passed, total, first failing label) over checks whose label contains `pat`.
fn tally(reports: &[Report], pat: &str) -> (usize, usize, Option<String>) {
    let mut pass = 0;
    let mut total = 0;
    let mut first = None;
    for r in reports {
        for e in checks(r, pat) {
            total += 1;
            if e.pass == Some(true) {
                pass += 1;
            } else if first.is_none() {
                first = Some(format!("{}: {} = {}", r.job.label, e.label, e.value));
            }
        }
    }
    (pass, total, first)
}

fn tally_clause(name: &str, reports: &[Report], pat: &str) -> Clause {
    let (pass, total, first) = tally(reports, pat);
    let ok = total > 0 && pass == total;
    let detail = match first {
        Some(f) => format!("{pass}/{total}; first failure {f}"),
        None => format!("{pass}/{total}"),
    };
    clause(name, ok, detail)
}

fn no_errors(reports: &[Report]) -> Clause {
    let errs: Vec<String> = reports
        .iter()
        .filter(|r| r.status == Status::Error)
        .map(|r| format!("{}: {}", r.job.label, r.error.clone().unwrap_or_default()))
        .collect();
    clause("jobs complete without math errors", errs.is_empty(), if errs.is_empty() { format!("{} jobs", reports.len()) } else { errs.join("; ") })
}

fn suite_job(suite: &str, label: &str) -> JobSpec {
    suite_jobs(suite).unwrap().into_iter().find(|j| j.label == label).unwrap()
}

fn sweep_report() -> Report {
    let job = JobSpec::new("acceptance_sweep", JobKind::Sweep).with("triples", 50).with("points", 5);
    run_job(&job, &opts(false)).unwrap()
}

fn criterion_1(sweep: &Report) -> Vec<Clause> {
    let c = corpus();
    let max_vars = c.iter().map(|(_, e)| e.nvars()).max().unwrap_or(0);
    let skipped: Vec<&str> = sweep
        .results
        .iter()
        .filter(|e| e.label.ends_with("twist factor") && e.value.starts_with("none"))
        .map(|e| e.label.as_str())
        .collect();
    vec![
        clause("corpus size and arity", c.len() >= 10 && max_vars <= 4, format!("{} endomorphisms, at most {max_vars} variables", c.len())),
        clause(
            "every derivation has a twist factor",
            skipped.is_empty(),
            if skipped.is_empty() { format!("{} derivations", tally(std::slice::from_ref(sweep), "hL1").1) } else { skipped.join("; ") },
        ),
        no_errors(std::slice::from_ref(sweep)),
        tally_clause("hL1 exactly zero", std::slice::from_ref(sweep), "hL1 on 50 elements"),
        tally_clause("hL2 exactly zero", std::slice::from_ref(sweep), "hL2 on 50 triples"),
    ]
}

fn criterion_2(sweep: &Report) -> Vec<Clause> {
    vec![tally_clause("closed form equals operator oracle", std::slice::from_ref(sweep), "bracket vs operator oracle, 5 points")]
}

fn criterion_3() -> Vec<Clause> {
    let mut out = Vec::new();
    let rot = run_job(&suite_job("paper_identities", "rotation_witt"), &opts(false)).unwrap();
    let unit = rot.find("generator is a unit").map(|e| e.value.clone()).unwrap_or_default();
    out.push(clause("rotation generator is a unit", unit == "true", format!("g = {}", rot.find("generator g").map_or("?", |e| e.value.as_str()))));
    out.push(tally_clause("delta = id - sigma", std::slice::from_ref(&rot), "delta - (id - sigma)"));

    // D_k = -eps3^k (id - sigma) on the rotation endomorphism
    let endo = corpus().into_iter().find(|(n, _)| n == "rotation").unwrap().1;
    let d = TwistedDerivation::unscaled(endo);
    let minus_one = CycloNumber::from_int(-1);
    let dk = |k: i64| HomLieElement::new(LaurentPoly::monomial(minus_one.clone(), ExponentVector(vec![0, 0, k])), &d).unwrap();
    let z = CycloNumber::root_of_unity(3, 1);
    let zi = CycloNumber::root_of_unity(3, -1);
    let one = CycloNumber::one(1);
    let printed = [(-1, 0, one.sub(&zi)), (0, 1, z.sub(&one)), (1, -1, zi.sub(&z))];
    let mut bad = Vec::new();
    for (k, l, c) in &printed {
        let lhs = hl_bracket(&dk(*k), &dk(*l)).unwrap();
        let rhs = dk(k + l).coeff.scale(c);
        if lhs.coeff != rhs {
            bad.push(format!("<<D[{k}],D[{l}]>> = {}", lhs.coeff.to_text()));
        }
    }
    out.push(clause("Witt brackets match the printed constants", bad.is_empty(), if bad.is_empty() { "3/3".to_string() } else { bad.join("; ") }));

    let zetas = [(3u64, 1i64), (5, 2), (7, 1), (8, 3), (12, 5)];
    let mut a_bad = Vec::new();
    let mut q_bad = Vec::new();
    let mut bc_bad = Vec::new();
    let mut rel_bad = Vec::new();
    for (m, k) in zetas {
        let zeta = CycloNumber::root_of_unity(m, k);
        let ch = sl2_extract(&zeta).unwrap();
        let zm1 = zeta.sub(&one);
        let a_printed = CycloNumber::from_int(-2).div(&zm1).unwrap();
        let q_printed = zeta.inv().unwrap().sub(&one).div(&zm1).unwrap();
        let bc_printed = one.sub(&zeta.mul(&zeta)).inv().unwrap();
        let tag = format!("zeta = {m}:{k}");
        if ch.a != a_printed {
            a_bad.push(tag.clone());
        }
        if ch.q != q_printed {
            q_bad.push(format!("{tag}: extracted {}, printed {}", ch.q.to_text(), q_printed.to_text()));
        }
        let bc = ch.b.mul(&ch.c);
        if bc != bc_printed {
            bc_bad.push(format!("{tag}: extracted {}, printed {}", bc.to_text(), bc_printed.to_text()));
        }
        if !verify_sl2(&ch, &zeta).unwrap().all_pass() {
            rel_bad.push(tag);
        }
    }
    let n = zetas.len();
    let summary = |bad: &[String]| if bad.is_empty() { format!("{n}/{n} roots") } else { format!("{}/{n} differ; {}", bad.len(), bad[0]) };
    out.push(clause("printed sl2 a", a_bad.is_empty(), summary(&a_bad)));
    out.push(clause("printed sl2 q", q_bad.is_empty(), summary(&q_bad)));
    out.push(clause("printed sl2 bc", bc_bad.is_empty(), summary(&bc_bad)));
    out.push(clause("B-relations hold for the extracted change of basis", rel_bad.is_empty(), summary(&rel_bad)));
    out
}

fn criterion_4() -> Vec<Clause> {
    let job = suite_job("paper_identities", "rotation_operator_convert");
    let plain = run_job(&job, &opts(false)).unwrap();
    let literal = run_job(&job, &opts(true)).unwrap();
    let first = literal.find("unsigned expansion: first failing degree").map(|e| e.value.clone()).unwrap_or_default();
    let endo = corpus().into_iter().find(|(n, _)| n == "rotation").unwrap().1;
    let pts: Vec<LaurentPoly> = (-2..=2).map(|k| LaurentPoly::monomial(CycloNumber::one(1), ExponentVector(vec![k, 1 - k, k * k]))).collect();
    let direct = first_unsigned_failure(&endo, 8, &pts).unwrap();
    vec![
        tally_clause("signed round trip, degrees <= 8", std::slice::from_ref(&plain), "round trip"),
        tally_clause("converted operator agrees pointwise", std::slice::from_ref(&plain), "vs converted operator"),
        clause("literal unsigned expansion first fails at n = 2 and the report says so", first == "2" && direct == Some(2), format!("report {first}, direct {direct:?}")),
    ]
}

/// B_n(x) with B_1 = -1/2, from the recurrence for Bernoulli numbers.
fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b = vec![rat_int(1)];
    for m in 1..=n {
        let s: Rational = (0..m).map(|k| rat_int(binom(m as i64 + 1, k as i64)) * &b[k]).sum();
        b.push(-s / rat_int(m as i64 + 1));
    }
    b
}

fn binom(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// f^(n-1) sum_{a=1}^{f} chi(a) B_n(a/f).
fn bernoulli_oracle(n: u32, chi: &DirichletCharacter) -> CycloNumber {
    let f = chi.modulus() as i64;
    let b = bernoulli_numbers(n as usize);
    let mut acc = CycloNumber::zero(1);
    for a in 1..=f {
        let x = rat(a, f);
        let mut bn = rat_int(0);
        for k in 0..=n as usize {
            let mut xp = rat_int(1);
            for _ in 0..(n as usize - k) {
                xp *= &x;
            }
            bn += rat_int(binom(n as i64, k as i64)) * &b[k] * xp;
        }
        acc = acc.add(&chi.value(a).scale(&bn));
    }
    let mut fp = rat_int(1);
    for _ in 1..n {
        fp *= rat_int(f);
    }
    acc.scale(&fp)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn criterion_5() -> Vec<Clause> {
    let table = run_suite("bernoulli_table", &opts(false)).unwrap();
    let mut out = vec![tally_clause("gen_bernoulli vs doubled-order recomputation", &table.jobs, "at doubled order")];

    let mut oracle_bad = Vec::new();
    let mut count = 0;
    let (mut anti_bad, mut id_bad, mut prod_bad, mut pairs) = (Vec::new(), Vec::new(), Vec::new(), 0);
    let cache = BernoulliCache::new();
    for m in 1..=8u64 {
        let chars = enumerate_characters(m).unwrap();
        for chi in &chars {
            for n in 1..=4u32 {
                count += 1;
                let got = gen_bernoulli(n, chi).unwrap().value;
                let want = bernoulli_oracle(n, chi);
                if got != want {
                    oracle_bad.push(format!("B({n}, {chi}) = {}, oracle {}", got.to_text(), want.to_text()));
                }
            }
        }
        let e = chars[0].field_order();
        for chi in &chars {
            for theta in &chars {
                for j in (1..=e as i64).filter(|j| gcd(*j as u64, e) == 1) {
                    for n in 1..=4u32 {
                        pairs += 1;
                        let tag = format!("({chi}, {theta}, j = {j}, n = {n})");
                        let v = l_special_bracket(chi, theta, n, j).unwrap();
                        let w = l_special_bracket(theta, chi, n, j).unwrap();
                        if !v.add(&w).is_zero() {
                            anti_bad.push(tag.clone());
                        }
                        if j == 1 && !v.is_zero() {
                            id_bad.push(tag.clone());
                        }
                        let sym = lsym_bracket(&CycloNumber::one(1), &VirtualCharacter::of(chi), &CycloNumber::one(1), &VirtualCharacter::of(theta), j).unwrap();
                        let spec = specialize(&sym, n, &cache).unwrap();
                        if spec != v {
                            prod_bad.push(tag);
                        }
                    }
                }
            }
        }
    }
    let sum = |bad: &[String], total: usize| if bad.is_empty() { format!("{total} cases") } else { format!("{} of {total} fail; {}", bad.len(), bad[0]) };
    out.push(clause("gen_bernoulli vs Bernoulli-polynomial oracle", oracle_bad.is_empty(), sum(&oracle_bad, count)));
    let z = l_special(&DirichletCharacter::trivial(1).unwrap(), 2).unwrap();
    out.push(clause("L(trivial mod 1, -1) = -1/12", z == CycloNumber::from_rational(rat(-1, 12)), z.to_text()));
    out.push(clause("l_special_bracket antisymmetric", anti_bad.is_empty(), sum(&anti_bad, pairs)));
    out.push(clause("l_special_bracket vanishes at sigma = id", id_bad.is_empty(), sum(&id_bad, pairs)));
    out.push(clause("specialized symbol bracket equals product form", prod_bad.is_empty(), sum(&prod_bad, pairs)));
    out
}

fn criterion_6() -> Vec<Clause> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        let job = JobSpec::new(format!("nabla_p{p}"), JobKind::NablaVerify).with("p", p).with("chi", 1 + p).with("draws", 50);
        let r = run_job(&job, &opts(true)).unwrap();
        for rel in ["R1 ", "R2 ", "R3 ", "R4 ", "R5 ", "R6 "] {
            let mut c = tally_clause("", std::slice::from_ref(&r), rel);
            c.name = format!("{}as printed, p = {p}", rel);
            out.push(c);
        }
        let mut c = tally_clause("", std::slice::from_ref(&r), "R6c ");
        c.name = format!("R6 with chi^-1, p = {p}");
        out.push(c);
    }
    out
}

fn criterion_7() -> Vec<Clause> {
    let grid = run_suite("wach_grid", &opts(true)).unwrap();
    let wach: Vec<Report> = grid.jobs.iter().filter(|r| r.job.kind == JobKind::Wach).cloned().collect();
    let fil: Vec<Report> = grid.jobs.iter().filter(|r| r.job.kind == JobKind::Filtration).cloned().collect();
    let stabilized = wach.iter().filter(|r| r.find("factors used (lambda+, lambda-)").is_some()).count();
    let mut displayed = tally_clause("action tables vs displayed forms", &wach, "operator vs displayed form");
    let failing_jobs = wach.iter().filter(|r| checks(r, "operator vs displayed form").any(|e| e.pass == Some(false))).count();
    displayed.detail = format!("{} (in {failing_jobs} of {} grid points)", displayed.detail, wach.len());
    vec![
        clause("grid size", wach.len() == 36 && fil.len() == 36, format!("{} wach, {} filtration jobs", wach.len(), fil.len())),
        no_errors(&grid.jobs),
        clause("lambda products stabilize", stabilized == wach.len(), format!("{stabilized}/{}", wach.len())),
        tally_clause("P phi(G) = G gamma(P) to precision", &wach, "P phi(G) - G gamma(P)"),
        tally_clause("reduction matrix [[0,-1],[p^(k-1), alpha p^m]]", &wach, "reduced phi - [[0,-1]"),
        tally_clause("reduced gamma is the identity", &wach, "reduced gamma - identity"),
        tally_clause("filtration follows the three-case table", &fil, "Fil^"),
        tally_clause("action tables vs operator oracle", &wach, "operator vs derived form"),
        displayed,
    ]
}

fn criterion_8() -> Vec<Clause> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_homlie"))
            .args(["suite", "paper_identities", "--seed", "7", "--format", "structured"])
            .output()
            .expect("spawn homlie")
    };
    let a = run();
    let b = run();
    let codes = (a.status.code(), b.status.code());
    vec![
        clause("both runs exit 0", codes == (Some(0), Some(0)), format!("{codes:?}")),
        clause("structured output byte-identical", !a.stdout.is_empty() && a.stdout == b.stdout, format!("{} bytes", a.stdout.len())),
    ]
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let sweep = sweep_report();
    let criteria: Vec<(u32, &str, Vec<Clause>)> = vec![
        (1, "hom-Lie axioms on the endomorphism corpus", criterion_1(&sweep)),
        (2, "closed-form bracket vs operator oracle", criterion_2(&sweep)),
        (3, "rotation example, Witt axis and deformed sl2", criterion_3()),
        (4, "operator basis conversion", criterion_4()),
        (5, "generalized Bernoulli numbers and L-value brackets", criterion_5()),
        (6, "nabla operator relations", criterion_6()),
        (7, "Wach module grid", criterion_7()),
        (8, "determinism of structured suite output", criterion_8()),
    ];

    let mut unexpected = Vec::new();
    let mut passed = 0;
    println!();
    for (n, title, clauses) in &criteria {
        let ok = clauses.iter().all(|c| c.pass);
        passed += ok as usize;
        println!("criterion {n} {}: {title}", if ok { "PASS" } else { "FAIL" });
        for c in clauses {
            let known = KNOWN_DEVIATIONS.iter().find(|(k, name, _)| k == n && *name == c.name);
            let mark = match (c.pass, known) {
                (true, None) => "ok",
                (false, Some(_)) => "FAIL (known)",
                (false, None) => {
                    unexpected.push(format!("criterion {n}: {} failed: {}", c.name, c.detail));
                    "FAIL"
                }
                (true, Some(_)) => {
                    unexpected.push(format!("criterion {n}: {} passed but is listed as a known deviation", c.name));
                    "ok (listed as failing)"
                }
            };
            println!("    [{mark}] {}: {}", c.name, c.detail);
            if let (false, Some((_, _, why))) = (c.pass, known) {
                println!("        reason: {why}");
            }
        }
    }
    for (n, name, _) in KNOWN_DEVIATIONS {
        let seen = criteria.iter().any(|(k, _, cl)| k == n && cl.iter().any(|c| c.name == *name));
        if !seen {
            unexpected.push(format!("criterion {n}: listed clause {name:?} was not evaluated"));
        }
    }
    println!("\n{passed}/{} criteria pass in {:.1} s", criteria.len(), t0.elapsed().as_secs_f64());
    if unexpected.is_empty() {
        println!("every failing clause is a documented deviation");
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("unexpected: {u}");
        }
        ExitCode::FAILURE
    }
}
