//! Acceptance run: one line per criterion, non-zero exit on any failure.

use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use skein_cli::suites::{self, SuiteResult};
use skein_cli::VerificationReport;
use skein_core::cantor::{build_thread_from_rule, GammaRule};
use skein_core::fixtures::{t_a, t_line};
use skein_core::skein::SkeinTruncation;
use skein_core::{q, Rational};

const SEED: u64 = 7;

struct Outcome {
    ok: bool,
    note: String,
}

fn from_suite(r: SuiteResult) -> Outcome {
    let note = match &r.witness {
        None => format!("{} checks", r.checks),
        Some(w) => format!("{} checks, witness {w}", r.checks),
    };
    Outcome { ok: r.passed, note }
}

fn all_of(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        ok: parts.iter().all(|o| o.ok),
        note: parts.into_iter().map(|o| o.note).collect::<Vec<_>>().join("; "),
    }
}

fn spot(ok: bool, what: &str) -> Outcome {
    Outcome { ok, note: if ok { what.to_string() } else { format!("{what} FAILED") } }
}

fn criterion_1() -> Outcome {
    let ends = [t_a(), t_line()].iter().all(|t| &t.metric(&Rational::zero(), t.length()) == t.width());
    all_of(vec![spot(ends, "d(0,l) = width"), from_suite(suites::thread_metric(SEED))])
}

fn criterion_2() -> Outcome {
    let expected = [(q(1, 2), q(5, 8)), (q(1, 3), q(19, 48)), (q(2, 3), q(67, 96))];
    let first = build_thread_from_rule(&GammaRule::half_bound(), 3, q(1, 2))
        .map(|t| {
            let mut got: Vec<_> = t.gaps().iter().map(|g| (g.left().clone(), g.right().clone())).collect();
            let mut want = expected.to_vec();
            got.sort();
            want.sort();
            got == want
        })
        .unwrap_or(false);
    all_of(vec![spot(first, "first three gaps exact"), from_suite(suites::cantor_gaps(SEED))])
}

fn criterion_3() -> Outcome {
    from_suite(suites::lipschitz_maps(SEED))
}

fn criterion_4() -> Outcome {
    let first = suites::criterion_run().map(|r| r.gammas.first() == Some(&q(1, 64))).unwrap_or(false);
    all_of(vec![spot(first, "gamma*_1 = 1/64"), from_suite(suites::gammastar_run(SEED))])
}

fn criterion_5() -> Outcome {
    from_suite(suites::impossibility(SEED))
}

fn criterion_6() -> Outcome {
    let small = SkeinTruncation::build(suites::depth2_config()).map(|t| t.len() <= 200).unwrap_or(false);
    all_of(vec![spot(small, "depth-2 truncation within 200 points"), from_suite(suites::skein_stability(SEED))])
}

fn criterion_7() -> Outcome {
    from_suite(suites::chain_isolation(SEED))
}

fn verify_once(dir: &std::path::Path, name: &str) -> Result<Vec<u8>, String> {
    let path = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_skein"))
        .args(["verify", "--all", "--seed", "7", "--out"])
        .arg(&path)
        .stderr(Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("verify exited with {status}"));
    }
    std::fs::read(&path).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return spot(false, &format!("tempdir: {e}")),
    };
    let runs = verify_once(dir.path(), "a.json").and_then(|a| Ok((a, verify_once(dir.path(), "b.json")?)));
    let (a, b) = match runs {
        Ok(x) => x,
        Err(e) => return spot(false, &e),
    };
    let identical = spot(a == b, "byte-identical reports");
    let reparsed = serde_json::from_slice::<VerificationReport>(&a)
        .ok()
        .and_then(|r| serde_json::to_string_pretty(&r).ok())
        .is_some_and(|s| s + "\n" == String::from_utf8_lossy(&a));
    all_of(vec![identical, spot(reparsed, "report round-trips"), from_suite(suites::round_trip(SEED))])
}

type Criterion = (u8, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, criterion_1, 5),
        (2, criterion_2, 10),
        (3, criterion_3, 30),
        (4, criterion_4, 60),
        (5, criterion_5, 300),
        (6, criterion_6, 120),
        (7, criterion_7, 60),
        (8, criterion_8, 120),
    ];
    let mut failures = 0;
    for (n, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let ok = out.ok && in_time;
        failures += usize::from(!ok);
        let timing = if in_time { String::new() } else { format!(", over the {limit}s limit") };
        println!(
            "criterion {n}: {} ({}, {:.2}s{timing})",
            if ok { "PASS" } else { "FAIL" },
            out.note,
            took.as_secs_f64()
        );
    }
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
