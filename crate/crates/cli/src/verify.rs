//! Seeded engine-versus-oracle runs plus the exact hypergeometric suite.

use std::fmt::Write as _;

use covprob::critical::{breakpoints_continuous, breakpoints_hypergeom};
use covprob::engine::{
    gap_profile, hypergeom_shifted, inf_closed_coverage, min_hypergeom_coverage,
    min_open_coverage, EngineError,
};
use covprob::oracle::sampling::{random_case, random_hypergeom_case, CaseFamily, RandomCase};
use covprob::oracle::{
    check_appendix_b, check_appendix_b_faulty, check_unimodal_between, exhaustive_min_hypergeom,
    grid_scan, FailingCase, OracleVerdict,
};
use covprob::{fmt_real, BoundsMode, CriticalSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::VerifyArgs;
use crate::CliError;

const GRID_POINTS: usize = 2001;
const GAP_SAMPLES: usize = 200;
const OPEN_TOL: f64 = 1e-10;
const CLOSED_TOL: f64 = 1e-7;
const BELOW_GRID_TOL: f64 = 1e-12;
const UNIMODAL_TOL: f64 = 1e-12;
const HYPER_POPULATIONS: [u64; 4] = [5, 10, 25, 60];

fn failing(input: &str, expected: String, got: String) -> FailingCase {
    FailingCase {
        input: input.to_string(),
        expected,
        got,
    }
}

fn error_case(label: &str, e: &EngineError) -> FailingCase {
    failing(label, "no error".into(), e.to_string())
}

fn check_gaps(
    v: &mut OracleVerdict,
    label: &str,
    case: &RandomCase,
    procedure: &covprob::IntervalProcedure,
    set: &CriticalSet,
) -> Result<(), EngineError> {
    for w in set.points().windows(2) {
        let values = gap_profile(&case.spec, procedure, w[0].value, w[1].value, GAP_SAMPLES)?;
        if check_unimodal_between(&values, UNIMODAL_TOL) {
            v.pass();
        } else {
            let gap = format!("{label} gap [{}, {}]", fmt_real(w[0].value), fmt_real(w[1].value));
            v.fail(failing(&gap, "unimodal".into(), "not unimodal".into()), 1.0);
        }
    }
    Ok(())
}

fn continuous_case(v: &mut OracleVerdict, label: &str, c: &RandomCase) -> Result<(), EngineError> {
    let grid = grid_scan(&c.spec, &c.procedure, c.a, c.b, GRID_POINTS)?;
    let open = min_open_coverage(&c.spec, &c.procedure, c.a, c.b)?;
    let closed = inf_closed_coverage(&c.spec, &c.procedure, c.a, c.b)?;
    for (mode, engine, tol) in [
        (BoundsMode::OpenOpen, open.infimum, OPEN_TOL),
        (BoundsMode::ClosedClosed, closed.infimum, CLOSED_TOL),
    ] {
        let grid_inf = grid.iter().map(|g| g.value(mode)).fold(f64::INFINITY, f64::min);
        let d = (engine - grid_inf).abs();
        v.note_discrepancy(d);
        if d <= tol && engine <= grid_inf + BELOW_GRID_TOL {
            v.pass();
        } else {
            v.fail(
                failing(&format!("{label} {mode}"), fmt_real(grid_inf), fmt_real(engine)),
                d,
            );
        }
    }
    let set = breakpoints_continuous(&c.procedure, c.a, c.b)?;
    check_gaps(v, label, c, &c.procedure, &set)
}

fn hypergeom_case(v: &mut OracleVerdict, label: &str, c: &RandomCase) -> Result<(), EngineError> {
    let (a, b) = (c.a as u64, c.b as u64);
    let population = match c.spec {
        covprob::DistributionSpec::Hypergeometric { population, .. } => population,
        _ => unreachable!("hypergeometric case"),
    };
    for mode in [BoundsMode::OpenOpen, BoundsMode::ClosedClosed] {
        let engine = min_hypergeom_coverage(&c.spec, &c.procedure, a, b, mode)?;
        let brute = exhaustive_min_hypergeom(&c.spec, &c.procedure, a, b, mode)?;
        if engine.exact_infimum.as_ref() == Some(&brute.exact) {
            v.pass();
        } else {
            let got = engine
                .exact_infimum
                .map_or_else(|| "none".to_string(), |q| q.to_string());
            let d = (engine.infimum - brute.value).abs();
            v.fail(failing(&format!("{label} {mode}"), brute.exact.to_string(), got), d);
        }
        let shifted = hypergeom_shifted(&c.procedure, mode)?;
        let set = breakpoints_hypergeom(&shifted, a, b, population)?;
        check_gaps(v, label, c, &shifted, &set)?;
    }
    Ok(())
}

/// `(N, n)` pairs of the exact suite.
fn ladder() -> Vec<(u64, u64)> {
    let mut pairs: Vec<(u64, u64)> = (1..=12u64)
        .flat_map(|big| (1..=big).map(move |n| (big, n)))
        .collect();
    pairs.extend([(20, 6), (30, 10)]);
    pairs
}

fn summary(s: &mut String, name: &str, v: &OracleVerdict) {
    let _ = writeln!(
        s,
        "{name}: {} checks={} failures={} worst_discrepancy={}",
        if v.passed { "pass" } else { "fail" },
        v.checks,
        v.failures,
        fmt_real(v.worst_discrepancy)
    );
    for c in &v.failing_cases {
        let _ = writeln!(s, "failing: {c}");
    }
}

/// Report text and whether everything passed.
pub fn run(args: &VerifyArgs) -> Result<(String, bool), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut s = String::new();
    let _ = writeln!(s, "seed: {}", args.seed);
    let _ = writeln!(s, "cases: {}", args.cases);

    let mut continuous = OracleVerdict::new();
    let mut hyper = OracleVerdict::new();
    for i in 0..args.cases {
        let slot = i % 5;
        let (case, verdict) = if slot < 4 {
            (random_case(CaseFamily::ALL[slot], &mut rng), &mut continuous)
        } else {
            let big = HYPER_POPULATIONS[(i / 5) % HYPER_POPULATIONS.len()];
            (random_hypergeom_case(big, &mut rng), &mut hyper)
        };
        let label = format!(
            "case {i} {} range [{}, {}]",
            case.label,
            fmt_real(case.a),
            fmt_real(case.b)
        );
        let outcome = if slot < 4 {
            continuous_case(verdict, &label, &case)
        } else {
            hypergeom_case(verdict, &label, &case)
        };
        if let Err(e) = outcome {
            verdict.fail(error_case(&label, &e), 1.0);
        }
    }
    summary(&mut s, "continuous", &continuous);
    summary(&mut s, "hypergeometric", &hyper);

    let mut identities = OracleVerdict::new();
    let pairs = ladder();
    for &(big, n) in &pairs {
        let checked = if args.inject_fault {
            check_appendix_b_faulty(big, n)
        } else {
            check_appendix_b(big, n)
        };
        match checked {
            Ok(v) => identities.merge(v),
            Err(e) => identities.fail(error_case(&format!("identities N={big} n={n}"), &e), 1.0),
        }
    }
    let _ = writeln!(s, "identity_pairs: {}", pairs.len());
    summary(&mut s, "identities", &identities);
    let _ = writeln!(s, "identity_skips: {}", identities.skipped.len());

    let passed = continuous.passed && hyper.passed && identities.passed;
    let _ = writeln!(s, "result: {}", if passed { "pass" } else { "fail" });
    Ok((s, passed))
}
