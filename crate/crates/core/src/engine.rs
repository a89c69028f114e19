//! Coverage probabilities and their exact worst case over a parameter range.
//!
//! Between consecutive critical points every coverage event selects one
//! fixed range of `k`, so the coverage there is a single interval
//! probability, unimodal in the parameter. Its infimum over the closed gap
//! is one of the two one-sided limits at the gap ends: the right limit at a
//! point `t` is `C_U(t)` and the left limit is `C_L(t)`, whatever the mode.
//! The infimum over `[a, b]` is therefore the least of the values at the
//! critical points and those limits.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::critical::{
    breakpoints_continuous, breakpoints_hypergeom, CriticalPoint, CriticalSetError, Provenance,
};
use crate::dist::exact::{ExactInt, HyperExact, I128_MAX_POPULATION, MAX_EXACT_POPULATION};
use crate::dist::{DistError, DistributionSpec, Family};
use crate::oracle::check_unimodal_between;
use crate::procedures::{BoundsMode, IntervalProcedure, KIndexInterval, ProcedureError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Procedure(#[from] ProcedureError),
    #[error(transparent)]
    Critical(#[from] CriticalSetError),
    #[error("procedure does not fit {spec}: {reason}")]
    Incompatible { spec: String, reason: String },
    #[error("range: {0}")]
    Range(String),
    #[error("points: {0}")]
    Points(String),
}

impl EngineError {
    /// Whether the failure is a table that cannot be certified complete.
    pub fn is_certification(&self) -> bool {
        let p = match self {
            EngineError::Procedure(p) | EngineError::Critical(CriticalSetError::Procedure(p)) => p,
            _ => return false,
        };
        matches!(
            p,
            ProcedureError::Uncertified { .. } | ProcedureError::InfinitelyManyValues { .. }
        )
    }
}

/// Display name of the coverage quantity a mode defines.
pub fn quantity_name(mode: BoundsMode) -> &'static str {
    match mode {
        BoundsMode::OpenOpen => "C_open",
        BoundsMode::ClosedClosed => "C",
        BoundsMode::ClosedOpen => "C_U",
        BoundsMode::OpenClosed => "C_L",
    }
}

/// All four coverage quantities at one critical point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub point: CriticalPoint,
    pub open: f64,
    pub closed: f64,
    /// `C_U`
    pub closed_open: f64,
    /// `C_L`
    pub open_closed: f64,
}

impl PointEvaluation {
    pub fn theta(&self) -> f64 {
        self.point.value
    }

    pub fn value(&self, mode: BoundsMode) -> f64 {
        match mode {
            BoundsMode::OpenOpen => self.open,
            BoundsMode::ClosedClosed => self.closed,
            BoundsMode::ClosedOpen => self.closed_open,
            BoundsMode::OpenClosed => self.open_closed,
        }
    }
}

/// How a witness value is reached at its critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    At,
    /// limit from below, the value `C_L`
    FromLeft,
    /// limit from above, the value `C_U`
    FromRight,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::At => "at",
            Approach::FromLeft => "left-limit",
            Approach::FromRight => "right-limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub theta: f64,
    pub quantity: BoundsMode,
    pub approach: Approach,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub spec: DistributionSpec,
    pub procedure: String,
    pub bounds_mode: BoundsMode,
    pub range: (f64, f64),
    pub infimum: f64,
    /// Hypergeometric only: the infimum in exact arithmetic.
    pub exact_infimum: Option<BigRational>,
    pub attained: bool,
    /// Sorted by `theta`.
    pub witnesses: Vec<Witness>,
    pub evaluations: Vec<PointEvaluation>,
    pub warnings: Vec<String>,
}

fn incompatible(spec: &DistributionSpec, reason: impl Into<String>) -> EngineError {
    EngineError::Incompatible {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn check_compatible(spec: &DistributionSpec, procedure: &IntervalProcedure) -> Result<(), EngineError> {
    spec.validate()?;
    match (spec.k_max(), procedure.support().k_max()) {
        (Some(m), Some(p)) if m == p => Ok(()),
        (None, None) => Ok(()),
        (Some(m), Some(p)) => Err(incompatible(
            spec,
            format!("procedure covers k=0..={p}, support is 0..={m}"),
        )),
        (Some(_), None) => Err(incompatible(spec, "procedure has unbounded support")),
        (None, Some(_)) => Err(incompatible(
            spec,
            "unbounded support needs a tail line or rule-based procedure",
        )),
    }
}

/// Coverage `Pr{L(K) ~ theta ~ U(K) | theta}` with comparisons set by `mode`.
pub fn coverage_at(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    theta: f64,
    mode: BoundsMode,
) -> Result<f64, EngineError> {
    check_compatible(spec, procedure)?;
    spec.check_param(theta)?;
    let ks = procedure.k_interval_for(theta, mode)?;
    Ok(spec.interval_prob(theta, &ks)?)
}

fn evaluate(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    point: &CriticalPoint,
) -> Result<PointEvaluation, EngineError> {
    let theta = point.value;
    let mut seen: Vec<(KIndexInterval, f64)> = Vec::with_capacity(4);
    let mut value = |mode| -> Result<f64, EngineError> {
        let ks = procedure.k_interval_for(theta, mode)?;
        if let Some(&(_, v)) = seen.iter().find(|(s, _)| *s == ks) {
            return Ok(v);
        }
        let v = spec.interval_prob(theta, &ks)?;
        seen.push((ks, v));
        Ok(v)
    };
    Ok(PointEvaluation {
        point: point.clone(),
        open: value(BoundsMode::OpenOpen)?,
        closed: value(BoundsMode::ClosedClosed)?,
        closed_open: value(BoundsMode::ClosedOpen)?,
        open_closed: value(BoundsMode::OpenClosed)?,
    })
}

fn endpoint_only(value: f64) -> CriticalPoint {
    CriticalPoint {
        value,
        provenance: vec![Provenance::EndpointA, Provenance::EndpointB],
    }
}

/// Least candidate; with `limits` the one-sided limits at every point
/// facing into the range are candidates too.
fn reduce(evals: &[PointEvaluation], mode: BoundsMode, limits: bool) -> (f64, bool, Vec<Witness>) {
    let last = evals.len() - 1;
    let mut candidates = Vec::with_capacity(3 * evals.len());
    for (i, e) in evals.iter().enumerate() {
        let theta = e.theta();
        candidates.push(Witness {
            theta,
            quantity: mode,
            approach: Approach::At,
            value: e.value(mode),
        });
        if limits && i > 0 {
            candidates.push(Witness {
                theta,
                quantity: BoundsMode::OpenClosed,
                approach: Approach::FromLeft,
                value: e.open_closed,
            });
        }
        if limits && i < last {
            candidates.push(Witness {
                theta,
                quantity: BoundsMode::ClosedOpen,
                approach: Approach::FromRight,
                value: e.closed_open,
            });
        }
    }
    let infimum = candidates
        .iter()
        .map(|w| w.value)
        .fold(f64::INFINITY, f64::min);
    let mut witnesses: Vec<Witness> = Vec::new();
    for w in candidates.into_iter().filter(|w| w.value == infimum) {
        let shadowed = witnesses
            .iter()
            .any(|x| x.theta == w.theta && x.approach == Approach::At);
        if !shadowed {
            witnesses.push(w);
        }
    }
    let attained = witnesses.iter().any(|w| w.approach == Approach::At);
    (infimum, attained, witnesses)
}

fn check_real_range(spec: &DistributionSpec, a: f64, b: f64) -> Result<(), EngineError> {
    if a.is_nan() || b.is_nan() {
        return Err(EngineError::Range("endpoints must be numbers".into()));
    }
    if a > b {
        return Err(EngineError::Range("a must be < b".into()));
    }
    spec.check_param(a)?;
    spec.check_param(b)?;
    Ok(())
}

/// Exact infimum over `[a, b]` of the coverage defined by `mode`, for the
/// real-parameter families.
pub fn infimum(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
    mode: BoundsMode,
) -> Result<CoverageReport, EngineError> {
    if spec.family() == Family::Hypergeometric {
        return Err(incompatible(spec, "the integer parameter needs min_hypergeom_coverage"));
    }
    check_compatible(spec, procedure)?;
    check_real_range(spec, a, b)?;
    let points = if a == b {
        vec![endpoint_only(a)]
    } else {
        breakpoints_continuous(procedure, a, b)?.points().to_vec()
    };
    let evaluations = points
        .iter()
        .map(|p| evaluate(spec, procedure, p))
        .collect::<Result<Vec<_>, _>>()?;
    let (infimum, attained, witnesses) = reduce(&evaluations, mode, points.len() > 1);
    let mut warnings = Vec::new();
    if let DistributionSpec::NegBinomial { shape } = *spec {
        if shape.fract() != 0.0 {
            if let Some(w) = unimodality_warning(spec, procedure, &evaluations)? {
                warnings.push(w);
            }
        }
    }
    Ok(CoverageReport {
        spec: *spec,
        procedure: procedure.label().to_string(),
        bounds_mode: mode,
        range: (a, b),
        infimum,
        exact_infimum: None,
        attained,
        witnesses,
        evaluations,
        warnings,
    })
}

/// Spot check of gap unimodality where no proof is available.
fn unimodality_warning(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    evaluations: &[PointEvaluation],
) -> Result<Option<String>, EngineError> {
    const GAPS: usize = 64;
    const SAMPLES: usize = 257;
    let gaps = evaluations.len().saturating_sub(1);
    let step = gaps.div_ceil(GAPS).max(1);
    for i in (0..gaps).step_by(step) {
        let (x, y) = (evaluations[i].theta(), evaluations[i + 1].theta());
        let values = gap_profile(spec, procedure, x, y, SAMPLES)?;
        if !check_unimodal_between(&values, 1e-12) {
            return Ok(Some(format!(
                "coverage is not unimodal between {} and {}; the infimum may be missed",
                crate::fmt_real(x),
                crate::fmt_real(y)
            )));
        }
    }
    Ok(None)
}

/// Minimum over `[a, b]` of `Pr{L(K) < theta < U(K)}`.
pub fn min_open_coverage(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
) -> Result<CoverageReport, EngineError> {
    infimum(spec, procedure, a, b, BoundsMode::OpenOpen)
}

/// Infimum over `[a, b]` of `Pr{L(K) <= theta <= U(K)}`.
pub fn inf_closed_coverage(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
) -> Result<CoverageReport, EngineError> {
    infimum(spec, procedure, a, b, BoundsMode::ClosedClosed)
}

/// For integer `M` each closed comparison is an open one against a bound
/// moved by one: `L <= M` iff `L - 1 < M` and `M <= U` iff `M < U + 1`.
pub fn hypergeom_shifted(
    procedure: &IntervalProcedure,
    mode: BoundsMode,
) -> Result<IntervalProcedure, ProcedureError> {
    let (lc, uc) = mode.closedness();
    let dl = if lc { -1.0 } else { 0.0 };
    let du = if uc { 1.0 } else { 0.0 };
    procedure.shifted(dl, du)
}

/// Minimum over the integers `M` in `[a, b]` of the hypergeometric coverage
/// defined by `mode`. Points and their provenance refer to the shifted
/// procedure of [`hypergeom_shifted`].
pub fn min_hypergeom_coverage(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: u64,
    b: u64,
    mode: BoundsMode,
) -> Result<CoverageReport, EngineError> {
    let DistributionSpec::Hypergeometric { population, draws } = *spec else {
        return Err(incompatible(spec, "not a hypergeometric distribution"));
    };
    check_compatible(spec, procedure)?;
    procedure.require_integer_nondecreasing()?;
    if a > b {
        return Err(EngineError::Range("a must be < b".into()));
    }
    if b > population {
        return Err(EngineError::Range(format!("b must be <= N = {population}")));
    }
    let shifted = hypergeom_shifted(procedure, mode)?;
    let points = if a == b {
        vec![endpoint_only(a as f64)]
    } else {
        breakpoints_hypergeom(&shifted, a, b, population)?.points().to_vec()
    };
    let evaluations = points
        .iter()
        .map(|p| evaluate(spec, procedure, p))
        .collect::<Result<Vec<_>, _>>()?;
    let (infimum, attained, witnesses) = reduce(&evaluations, mode, false);
    let exact_infimum = if population <= MAX_EXACT_POPULATION {
        let thetas: Vec<u64> = points.iter().map(|p| p.value as u64).collect();
        let exact = if population <= I128_MAX_POPULATION {
            exact_hypergeom_coverages::<i128>(population, draws, procedure, mode, &thetas)?
        } else {
            exact_hypergeom_coverages::<BigInt>(population, draws, procedure, mode, &thetas)?
        };
        exact.into_iter().min()
    } else {
        None
    };
    Ok(CoverageReport {
        spec: *spec,
        procedure: procedure.label().to_string(),
        bounds_mode: mode,
        range: (a as f64, b as f64),
        infimum,
        exact_infimum,
        attained,
        witnesses,
        evaluations,
        warnings: Vec::new(),
    })
}

/// Exact coverage at each `M` in `thetas`.
pub fn exact_hypergeom_coverages<T: ExactInt>(
    population: u64,
    draws: u64,
    procedure: &IntervalProcedure,
    mode: BoundsMode,
    thetas: &[u64],
) -> Result<Vec<BigRational>, EngineError> {
    let h = HyperExact::<T>::new(population, draws);
    thetas
        .iter()
        .map(|&m| {
            let mut num = T::zero();
            if let KIndexInterval::Span { lo, hi } = procedure.k_interval_for(m as f64, mode)? {
                let hi = hi.unwrap_or(draws).min(draws);
                for k in lo..=hi {
                    num = num.plus(&h.pmf_num(m, k as i64));
                }
            }
            Ok(h.to_rational(&num))
        })
        .collect()
}

/// Dispatch on the family: integer ranges for the hypergeometric parameter,
/// real ranges otherwise.
pub fn analyze(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
    mode: BoundsMode,
) -> Result<CoverageReport, EngineError> {
    if spec.family() == Family::Hypergeometric {
        let (a, b) = integer_range(a, b)?;
        min_hypergeom_coverage(spec, procedure, a, b, mode)
    } else {
        infimum(spec, procedure, a, b, mode)
    }
}

fn integer_range(a: f64, b: f64) -> Result<(u64, u64), EngineError> {
    for v in [a, b] {
        if !(v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(53)) {
            return Err(EngineError::Range(format!(
                "hypergeometric endpoints must be nonnegative integers, got {v}"
            )));
        }
    }
    if a > b {
        return Err(EngineError::Range("a must be < b".into()));
    }
    Ok((a as u64, b as u64))
}

/// Coverage sampled across one gap `[x, y]` between consecutive critical
/// points, with the event fixed to the one selected inside the gap. End
/// values are the one-sided limits. For the hypergeometric family pass the
/// shifted procedure; samples are then the integers of `[x, y]`.
pub fn gap_profile(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    x: f64,
    y: f64,
    samples: usize,
) -> Result<Vec<f64>, EngineError> {
    if !(x < y) {
        return Err(EngineError::Range("a must be < b".into()));
    }
    if samples < 2 {
        return Err(EngineError::Points("need at least 2 samples".into()));
    }
    let ks = procedure.k_interval_for(0.5 * (x + y), BoundsMode::OpenOpen)?;
    let thetas: Vec<f64> = if spec.family() == Family::Hypergeometric {
        let width = (y - x) as u64;
        if width as usize + 1 <= samples {
            (0..=width).map(|i| x + i as f64).collect()
        } else {
            let mut t: Vec<f64> = (0..samples)
                .map(|i| (x + (y - x) * i as f64 / (samples - 1) as f64).round())
                .collect();
            t.dedup();
            t
        }
    } else {
        let last = samples - 1;
        (0..samples)
            .map(|i| {
                if i == last {
                    y
                } else {
                    x + (y - x) * (i as f64 / last as f64)
                }
            })
            .collect()
    };
    thetas
        .iter()
        .map(|&t| Ok(spec.interval_prob(t, &ks)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub theta: f64,
    pub coverage: f64,
    /// `none`, `L`, `U`, `LU` or `endpoint`
    pub breakpoint: &'static str,
}

/// Coverage at `points` evenly spaced values of `[a, b]` merged with every
/// interior critical point. Hypergeometric grids are rounded to integers.
pub fn coverage_curve(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
    mode: BoundsMode,
    points: usize,
) -> Result<Vec<CurvePoint>, EngineError> {
    if points < 2 {
        return Err(EngineError::Points("at least 2 points are required".into()));
    }
    check_compatible(spec, procedure)?;
    let hyper = spec.family() == Family::Hypergeometric;
    let set = if hyper {
        let DistributionSpec::Hypergeometric { population, .. } = *spec else {
            unreachable!()
        };
        let (ia, ib) = integer_range(a, b)?;
        if ia == ib {
            return Err(EngineError::Range("a must be < b".into()));
        }
        breakpoints_hypergeom(procedure, ia, ib, population)?
    } else {
        check_real_range(spec, a, b)?;
        breakpoints_continuous(procedure, a, b)?
    };

    let last = points - 1;
    let mut rows: Vec<(f64, &'static str)> = (0..points)
        .map(|i| {
            let t = match i {
                0 => a,
                i if i == last => b,
                i => a + (b - a) * (i as f64 / last as f64),
            };
            let t = if hyper { t.round() } else { t };
            (t, if i == 0 || i == last { "endpoint" } else { "none" })
        })
        .collect();
    rows.extend(set.interior().iter().map(|p| (p.value, p.kind())));
    rows.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, &'static str)> = Vec::with_capacity(rows.len());
    for (t, tag) in rows {
        match merged.last_mut() {
            Some(prev) if prev.0 == t => {
                if prev.1 == "none" {
                    prev.1 = tag;
                }
            }
            _ => merged.push((t, tag)),
        }
    }
    merged
        .into_iter()
        .map(|(theta, breakpoint)| {
            let ks = procedure.k_interval_for(theta, mode)?;
            Ok(CurvePoint {
                theta,
                coverage: spec.interval_prob(theta, &ks)?,
                breakpoint,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::{clopper_pearson, Direction};

    fn two_outcome() -> (DistributionSpec, IntervalProcedure) {
        (
            DistributionSpec::binomial(1).unwrap(),
            IntervalProcedure::from_table(vec![0.0, 0.5], vec![0.5, 1.0], Direction::NonDecreasing)
                .unwrap(),
        )
    }

    #[test]
    fn coverage_at_examples() {
        let spec = DistributionSpec::binomial(5).unwrap();
        let full =
            IntervalProcedure::from_table(vec![0.0; 6], vec![1.0; 6], Direction::NonDecreasing)
                .unwrap();
        for mode in BoundsMode::ALL {
            assert!((coverage_at(&spec, &full, 0.37, mode).unwrap() - 1.0).abs() < 1e-15);
        }
        let (spec, p) = two_outcome();
        assert_eq!(coverage_at(&spec, &p, 0.5, BoundsMode::OpenOpen).unwrap(), 0.0);
        assert!((coverage_at(&spec, &p, 0.5, BoundsMode::ClosedClosed).unwrap() - 1.0).abs() < 1e-15);
        assert!((coverage_at(&spec, &p, 0.25, BoundsMode::OpenOpen).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn open_minimum_two_outcomes() {
        let (spec, p) = two_outcome();
        let r = min_open_coverage(&spec, &p, 0.1, 0.9).unwrap();
        let thetas: Vec<f64> = r.evaluations.iter().map(PointEvaluation::theta).collect();
        assert_eq!(thetas, vec![0.1, 0.5, 0.9]);
        assert_eq!(r.infimum, 0.0);
        assert!(r.attained);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].theta, 0.5);
    }

    #[test]
    fn closed_infimum_two_outcomes() {
        let (spec, p) = two_outcome();
        let r = inf_closed_coverage(&spec, &p, 0.1, 0.9).unwrap();
        assert!((r.infimum - 0.5).abs() < 1e-15);
        assert!(!r.attained);
        let mid = &r.evaluations[1];
        assert!((mid.closed - 1.0).abs() < 1e-15);
        assert!((mid.closed_open - 0.5).abs() < 1e-15);
        assert!((mid.open_closed - 0.5).abs() < 1e-15);
        assert!((r.evaluations[0].closed - 0.9).abs() < 1e-15);
        assert!((r.evaluations[2].closed - 0.9).abs() < 1e-15);
        assert!(r.witnesses.iter().all(|w| w.theta == 0.5 && w.approach != Approach::At));
    }

    #[test]
    fn constant_procedure_is_always_covered() {
        let spec = DistributionSpec::binomial(4).unwrap();
        let p = IntervalProcedure::from_table(vec![0.0; 5], vec![1.0; 5], Direction::NonDecreasing)
            .unwrap();
        let r = inf_closed_coverage(&spec, &p, 0.1, 0.9).unwrap();
        assert!((r.infimum - 1.0).abs() < 1e-15);
        assert!(r.attained);
        let o = min_open_coverage(&spec, &p, 0.1, 0.9).unwrap();
        assert_eq!(o.witnesses.len(), o.evaluations.len());
    }

    #[test]
    fn endpoint_bound_coincidence() {
        // U(0) = a: the right limit at a drops K = 0 although C(a) keeps it.
        let spec = DistributionSpec::binomial(1).unwrap();
        let p = IntervalProcedure::from_table(vec![0.0, 0.2], vec![0.3, 1.0], Direction::NonDecreasing)
            .unwrap();
        let r = inf_closed_coverage(&spec, &p, 0.3, 0.6).unwrap();
        assert!((r.infimum - 0.3).abs() < 1e-15, "{}", r.infimum);
        assert!(!r.attained);
        // L(1) = b: K = 1 joins only at b, so the infimum is the left limit 1 - b.
        let q = IntervalProcedure::from_table(vec![0.0, 0.6], vec![0.7, 1.0], Direction::NonDecreasing)
            .unwrap();
        let r = inf_closed_coverage(&spec, &q, 0.3, 0.6).unwrap();
        assert!((r.infimum - 0.4).abs() < 1e-15, "{}", r.infimum);
    }

    #[test]
    fn point_query() {
        let (spec, p) = two_outcome();
        let r = inf_closed_coverage(&spec, &p, 0.1, 0.1).unwrap();
        assert!((r.infimum - 0.9).abs() < 1e-15);
        assert!(r.attained);
        assert!(matches!(
            inf_closed_coverage(&spec, &p, 0.9, 0.1),
            Err(EngineError::Range(_))
        ));
    }

    #[test]
    fn hypergeometric_example_tables() {
        let spec = DistributionSpec::hypergeometric(10, 4).unwrap();
        let p = IntervalProcedure::from_table(
            vec![0.0, 1.0, 3.0, 5.0, 7.0],
            vec![3.0, 5.0, 7.0, 9.0, 10.0],
            Direction::NonDecreasing,
        )
        .unwrap();
        for mode in BoundsMode::ALL {
            let r = min_hypergeom_coverage(&spec, &p, 0, 10, mode).unwrap();
            let exhaustive = (0..=10)
                .map(|m| coverage_at(&spec, &p, m as f64, mode).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!((r.infimum - exhaustive).abs() < 1e-14, "{mode}");
            let exact = r.exact_infimum.unwrap();
            assert!((num_traits::ToPrimitive::to_f64(&exact).unwrap() - r.infimum).abs() < 1e-14);
        }
        let open = min_hypergeom_coverage(&spec, &p, 0, 10, BoundsMode::OpenOpen).unwrap();
        let thetas: Vec<f64> = open.evaluations.iter().map(PointEvaluation::theta).collect();
        assert_eq!(thetas, vec![0.0, 1.0, 3.0, 5.0, 7.0, 9.0, 10.0]);
    }

    #[test]
    fn hypergeometric_closed_is_shifted_open() {
        let spec = DistributionSpec::hypergeometric(12, 3).unwrap();
        let p = IntervalProcedure::from_table(vec![2.0; 4], vec![6.0; 4], Direction::NonDecreasing)
            .unwrap();
        let closed = min_hypergeom_coverage(&spec, &p, 0, 12, BoundsMode::ClosedClosed).unwrap();
        let shifted = p.shifted(-1.0, 1.0).unwrap();
        let open = min_hypergeom_coverage(&spec, &shifted, 0, 12, BoundsMode::OpenOpen);
        // shifted tables leave the integer range [0, N] only through -1 and N + 1
        let open = open.unwrap();
        assert_eq!(closed.infimum, open.infimum);
        assert_eq!(closed.exact_infimum, open.exact_infimum);
        let full = IntervalProcedure::from_table(vec![0.0; 4], vec![12.0; 4], Direction::NonDecreasing)
            .unwrap();
        let r = min_hypergeom_coverage(&spec, &full, 0, 12, BoundsMode::ClosedClosed).unwrap();
        assert_eq!(r.exact_infimum, Some(BigRational::from_integer(1.into())));
    }

    #[test]
    fn rejects_mismatched_support() {
        let spec = DistributionSpec::binomial(3).unwrap();
        let p = IntervalProcedure::from_table(vec![0.0; 2], vec![1.0; 2], Direction::NonDecreasing)
            .unwrap();
        assert!(matches!(
            inf_closed_coverage(&spec, &p, 0.1, 0.9),
            Err(EngineError::Incompatible { .. })
        ));
    }

    #[test]
    fn curve_contract() {
        let spec = DistributionSpec::binomial(10).unwrap();
        let cp = clopper_pearson(10, 0.05).unwrap();
        let report = inf_closed_coverage(&spec, &cp, 0.01, 0.99).unwrap();
        let interior = report.evaluations.len() - 2;
        let curve = coverage_curve(&spec, &cp, 0.01, 0.99, BoundsMode::ClosedClosed, 2).unwrap();
        assert_eq!(curve.len(), 2 + interior);
        assert_eq!(curve[0].breakpoint, "endpoint");
        let dense = coverage_curve(&spec, &cp, 0.01, 0.99, BoundsMode::ClosedClosed, 500).unwrap();
        for w in dense.windows(2) {
            assert!(w[0].theta < w[1].theta);
        }
        let min = dense.iter().map(|c| c.coverage).fold(f64::INFINITY, f64::min);
        assert!(min >= report.infimum - 1e-12);
        assert!(report.infimum >= 0.95);
    }
}
