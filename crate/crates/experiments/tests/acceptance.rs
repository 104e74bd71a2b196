//! Runs every acceptance criterion with its shipped config and prints one
//! PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

use koopman_approx::{run, ExperimentConfig};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Criterion {
    number: u32,
    config: &'static str,
    budget: Duration,
}

macro_rules! criterion {
    ($n:expr, $name:literal, $secs:expr) => {
        Criterion {
            number: $n,
            config: include_str!(concat!("../configs/", $name, ".json")),
            budget: Duration::from_secs($secs),
        }
    };
}

const CRITERIA: &[Criterion] = &[
    criterion!(1, "not-pm-counterexample", 1),
    criterion!(2, "haar-projection-rate", 1),
    criterion!(3, "spectral-truncation", 5),
    criterion!(4, "edmd-erm-equivalence", 10),
    criterion!(5, "ac-domination", 60),
    criterion!(6, "bias-variance", 120),
    criterion!(7, "ifs-contraction", 30),
    criterion!(8, "probability-preservation", 5),
    criterion!(9, "effective-samples", 1),
    criterion!(10, "warped-factorization", 5),
    criterion!(11, "equilibrated-edmd", 120),
];

fn main() -> ExitCode {
    let mut failures = 0;
    for c in CRITERIA {
        let started = Instant::now();
        let outcome = ExperimentConfig::from_json(c.config, Path::new("<acceptance>")).and_then(|cfg| run(&cfg));
        let elapsed = started.elapsed();
        let (name, ok, detail) = match outcome {
            Ok(report) => {
                let failed: Vec<String> = report
                    .acceptance
                    .iter()
                    .filter(|a| !a.passed)
                    .map(|a| format!("{} ({})", a.rule, a.detail))
                    .collect();
                let in_budget = elapsed <= c.budget;
                let mut detail = if failed.is_empty() {
                    format!("{} checks", report.acceptance.len())
                } else {
                    failed.join("; ")
                };
                if !in_budget {
                    detail.push_str("; over the runtime budget");
                }
                (report.experiment, failed.is_empty() && in_budget, detail)
            }
            Err(e) => ("<error>".to_string(), false, e.to_string()),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {:<26} {:>8.3}s / {:>3}s  {}",
            if ok { "PASS" } else { "FAIL" },
            c.number,
            name,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            detail
        );
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
