//! One pass/fail line per acceptance criterion, written to stderr uncaptured so the
//! lines appear in every `cargo test` run.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use destab::complex::CheckReport;
use destab_cli::suites::{self, Suite, SuiteOptions};

macro_rules! line {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stderr().lock(), $($t)*);
    }};
}

fn summarize(n: usize, title: &str, reports: &[CheckReport], elapsed: Duration) -> bool {
    let checks: usize = reports.iter().map(|r| r.checks).sum();
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.passed()).collect();
    let ok = failed.is_empty() && checks > 0;
    line!(
        "criterion {n:>2}: {} {title} ({} runs, {checks} checks, {:.2?})",
        if ok { "PASS" } else { "FAIL" },
        reports.len(),
        elapsed
    );
    for r in failed {
        for f in r.failures.iter().take(3) {
            line!("    {}: {f}", r.name);
        }
    }
    ok
}

fn suite(n: usize, title: &str, s: Suite) -> bool {
    let start = Instant::now();
    match suites::run(s, &SuiteOptions::default()) {
        Ok(reports) => summarize(n, title, &reports, start.elapsed()),
        Err(e) => {
            line!("criterion {n:>2}: FAIL {title} ({e})");
            false
        }
    }
}

fn full_verify_run() -> bool {
    let dir = std::env::temp_dir().join(format!("destab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_destab"))
        .args(["verify", "--suite", "all", "-o", "report.txt"])
        .current_dir(&dir)
        .env_remove("DESTAB_DEGREE_CAP")
        .output()
        .expect("destab runs");
    let elapsed = start.elapsed();
    let ok = out.status.code() == Some(0) && elapsed < Duration::from_secs(600);
    line!(
        "criterion 10: {} verify --suite all (exit {:?}, {elapsed:.2?}, limit 10 min)",
        if ok { "PASS" } else { "FAIL" },
        out.status.code()
    );
    let _ = std::fs::remove_dir_all(&dir);
    ok
}

#[test]
fn acceptance() {
    let results = [
        suite(1, "d^2 = 0", Suite::Dsquared),
        suite(2, "complex homology equals the oracle", Suite::Oracle),
        suite(3, "vanishing on free modules", Suite::Free),
        suite(4, "identification on desuspended unstable modules", Suite::Zarati),
        suite(5, "invariant-theory identities", Suite::Invariants),
        suite(6, "A-stability of R_s", Suite::Stability),
        suite(7, "short exact sequence of complexes", Suite::Ses),
        suite(8, "connectivity on the runs of criteria 1-4", Suite::Connectivity),
        suite(9, "Dickson semilinearity", Suite::Dickson),
        full_verify_run(),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    line!("acceptance: {passed} of {} criteria pass", results.len());
    assert_eq!(passed, results.len());
}
