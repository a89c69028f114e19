use std::fmt::Write as _;

use covprob::engine::{quantity_name, CoverageReport};
use covprob::{fmt_real, BoundsMode, DistributionSpec, IntervalProcedure};

fn mode_name(mode: BoundsMode) -> &'static str {
    match mode {
        BoundsMode::OpenOpen => "open",
        BoundsMode::ClosedClosed => "closed",
        BoundsMode::ClosedOpen => "closed-open",
        BoundsMode::OpenClosed => "open-closed",
    }
}

/// Stable `key: value` report, one block per bounds mode.
pub fn render(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    (a, b): (f64, f64),
    bounds: &str,
    reports: &[CoverageReport],
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "family: {}", spec.family());
    let _ = writeln!(s, "spec: {spec}");
    let _ = writeln!(s, "procedure: {}", procedure.label());
    let _ = writeln!(s, "direction: {}", procedure.direction());
    let _ = writeln!(s, "range: {}:{}", fmt_real(a), fmt_real(b));
    let _ = writeln!(s, "bounds: {bounds}");
    for r in reports {
        let _ = writeln!(s, "mode: {}", mode_name(r.bounds_mode));
        let _ = writeln!(s, "quantity: {}", quantity_name(r.bounds_mode));
        let _ = writeln!(s, "critical_points: {}", r.evaluations.len());
        for e in &r.evaluations {
            let _ = writeln!(
                s,
                "point: theta={} kind={} tags={} C_open={} C={} C_U={} C_L={}",
                fmt_real(e.theta()),
                e.point.kind(),
                e.point.tags(),
                fmt_real(e.open),
                fmt_real(e.closed),
                fmt_real(e.closed_open),
                fmt_real(e.open_closed),
            );
        }
        let _ = writeln!(s, "infimum: {}", fmt_real(r.infimum));
        let _ = writeln!(s, "attained: {}", r.attained);
        for w in &r.witnesses {
            let _ = writeln!(
                s,
                "witness: theta={} quantity={} approach={} value={}",
                fmt_real(w.theta),
                quantity_name(w.quantity),
                w.approach,
                fmt_real(w.value),
            );
        }
        if let Some(q) = &r.exact_infimum {
            let _ = writeln!(s, "exact_infimum: {q}");
        }
        for w in &r.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
    }
    s
}
