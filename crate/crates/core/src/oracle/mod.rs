//! Brute-force counterparts of the engine.
//!
//! Nothing here uses the binary searches or the recurrence sums: events are
//! decided by comparing every `L(k)` and `U(k)` with the parameter, and
//! probabilities are sums of individual mass-function values.

mod appendix_b;
pub mod sampling;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub use appendix_b::{check_appendix_b, check_appendix_b_faulty};

use crate::dist::exact::{Pascal, MAX_EXACT_POPULATION};
use crate::dist::DistributionSpec;
use crate::engine::EngineError;
use crate::procedures::{BoundValue, BoundsMode, Direction, IntervalProcedure, ProcedureError, Side};

/// Failing case kept in a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct FailingCase {
    pub input: String,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for FailingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, got {}", self.input, self.expected, self.got)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleVerdict {
    pub passed: bool,
    pub worst_discrepancy: f64,
    /// At most [`OracleVerdict::KEEP`] cases; `failures` counts them all.
    pub failing_cases: Vec<FailingCase>,
    pub failures: usize,
    pub checks: u64,
    pub skipped: Vec<String>,
}

impl OracleVerdict {
    pub const KEEP: usize = 50;

    pub fn new() -> Self {
        Self {
            passed: true,
            ..Self::default()
        }
    }

    pub fn pass(&mut self) {
        self.checks += 1;
    }

    pub fn fail(&mut self, case: FailingCase, discrepancy: f64) {
        self.checks += 1;
        self.passed = false;
        self.failures += 1;
        self.worst_discrepancy = self.worst_discrepancy.max(discrepancy);
        if self.failing_cases.len() < Self::KEEP {
            self.failing_cases.push(case);
        }
    }

    pub fn note_discrepancy(&mut self, d: f64) {
        self.worst_discrepancy = self.worst_discrepancy.max(d);
    }

    pub fn merge(&mut self, other: OracleVerdict) {
        self.passed &= other.passed;
        self.worst_discrepancy = self.worst_discrepancy.max(other.worst_discrepancy);
        self.failures += other.failures;
        self.checks += other.checks;
        for c in other.failing_cases {
            if self.failing_cases.len() < Self::KEEP {
                self.failing_cases.push(c);
            }
        }
        self.skipped.extend(other.skipped);
    }
}

/// Whether `values` rise (within `tol`) to a peak and then fall (within
/// `tol`): no value dips more than `tol` below both a value before it and a
/// value after it.
pub fn check_unimodal_between(values: &[f64], tol: f64) -> bool {
    let n = values.len();
    if n < 3 {
        return true;
    }
    let mut suffix_max = vec![f64::NEG_INFINITY; n];
    for i in (0..n - 1).rev() {
        suffix_max[i] = suffix_max[i + 1].max(values[i + 1]);
    }
    let mut prefix_max = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v < prefix_max.min(suffix_max[i]) - tol {
            return false;
        }
        prefix_max = prefix_max.max(v);
    }
    true
}

/// Exact version of [`check_unimodal_between`] with zero tolerance.
pub fn is_unimodal_exact<T: Ord>(values: &[T]) -> bool {
    if values.is_empty() {
        return true;
    }
    let peak = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
        .map_or(0, |(i, _)| i);
    values[..=peak]
        .windows(2)
        .all(|w| w[0] <= w[1])
        && values[peak..].windows(2).all(|w| w[0] >= w[1])
}

/// Everything the brute-force evaluator knows about a procedure: explicit
/// bounds for `k < rows.len()` and, for unbounded supports, the hull of the
/// values every later `k` may take.
struct Scanned {
    rows: Vec<(f64, f64)>,
    tail: Option<[(f64, f64); 2]>,
}

impl Scanned {
    fn new(procedure: &IntervalProcedure, reach: f64) -> Result<Self, EngineError> {
        if let Some(k_max) = procedure.support().k_max() {
            let rows = (0..=k_max)
                .map(|k| (procedure.lower(k).unwrap(), procedure.upper(k).unwrap()))
                .collect();
            return Ok(Self { rows, tail: None });
        }
        let len = match procedure.table_len() {
            Some(len) => len as u64,
            None => {
                // Rule-based: read until both bounds have passed `reach`.
                let mut k = 0u64;
                loop {
                    let gone = match procedure.direction() {
                        Direction::NonDecreasing => procedure.lower(k).unwrap() > reach,
                        Direction::NonIncreasing => procedure.upper(k).unwrap() < reach,
                    };
                    if gone {
                        break k + 1;
                    }
                    k += 1;
                    if k > 1 << 24 {
                        return Err(ProcedureError::InfinitelyManyValues { side: Side::Lower }.into());
                    }
                }
            }
        };
        let rows: Vec<(f64, f64)> = (0..len)
            .map(|k| (procedure.lower(k).unwrap(), procedure.upper(k).unwrap()))
            .collect();
        let limits = procedure.tail_limits().expect("unbounded support has tail limits");
        let hull = |side: Side, last: f64| {
            let limit = match side {
                Side::Lower => limits.lower,
                Side::Upper => limits.upper,
            };
            match procedure.bound_at(side, len) {
                BoundValue::Known(v) => (v, v),
                BoundValue::Between(..) => (last.min(limit), last.max(limit)),
            }
        };
        let &(l_last, u_last) = rows.last().expect("tables are never empty");
        Ok(Self {
            rows,
            tail: Some([hull(Side::Lower, l_last), hull(Side::Upper, u_last)]),
        })
    }

    /// Every explicit bound value in `[a, b]`; fails when a tail hull
    /// reaches into `(a, b)`.
    fn values_within(&self, a: f64, b: f64) -> Result<Vec<f64>, EngineError> {
        let mut out = Vec::new();
        for &(l, u) in &self.rows {
            for v in [l, u] {
                if a <= v && v <= b {
                    out.push(v);
                }
            }
        }
        if let Some(hulls) = self.tail {
            for (side, (lo, hi)) in [Side::Lower, Side::Upper].into_iter().zip(hulls) {
                if lo < hi && lo < b && hi > a {
                    return Err(ProcedureError::Uncertified {
                        side,
                        k: self.rows.len() as u64,
                    }
                    .into());
                }
                if lo == hi && a <= lo && lo <= b {
                    out.push(lo);
                }
            }
        }
        Ok(out)
    }

    /// Whether every `k` past the explicit rows satisfies the event; an
    /// error when the hull leaves it open.
    fn tail_holds(&self, mode: BoundsMode, theta: f64) -> Result<bool, EngineError> {
        let [(l_lo, l_hi), (u_lo, u_hi)] = self.tail.expect("unbounded");
        let (lc, uc) = mode.closedness();
        let lower_ok = |v: f64| if lc { v <= theta } else { v < theta };
        let upper_ok = |v: f64| if uc { v >= theta } else { v > theta };
        let decided = |f: &dyn Fn(f64) -> bool, lo: f64, hi: f64| {
            let (x, y) = (f(lo), f(hi));
            (x == y).then_some(x)
        };
        let k = self.rows.len() as u64;
        match (decided(&lower_ok, l_lo, l_hi), decided(&upper_ok, u_lo, u_hi)) {
            (Some(false), _) | (_, Some(false)) => Ok(false),
            (Some(true), Some(true)) => Ok(true),
            (None, _) => Err(ProcedureError::Uncertified { side: Side::Lower, k }.into()),
            (_, None) => Err(ProcedureError::Uncertified { side: Side::Upper, k }.into()),
        }
    }

    /// Coverage for each of `modes` at `theta`.
    fn coverage(
        &self,
        spec: &DistributionSpec,
        theta: f64,
        modes: &[BoundsMode],
    ) -> Result<Vec<f64>, EngineError> {
        let mut sums = vec![0.0; modes.len()];
        let mut total = 0.0;
        let tail_flags = match self.tail {
            Some(_) => modes
                .iter()
                .map(|&m| self.tail_holds(m, theta))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![false; modes.len()],
        };
        let need_total = tail_flags.iter().any(|&f| f);
        for (k, &(l, u)) in self.rows.iter().enumerate() {
            let flags: Vec<bool> = modes.iter().map(|m| m.holds(l, theta, u)).collect();
            if !need_total && !flags.iter().any(|&f| f) {
                continue;
            }
            let p = spec.pmf(theta, k as i64)?;
            total += p;
            for (s, f) in sums.iter_mut().zip(&flags) {
                if *f {
                    *s += p;
                }
            }
        }
        if need_total {
            let tail = (1.0 - total).max(0.0);
            for (s, f) in sums.iter_mut().zip(&tail_flags) {
                if *f {
                    *s += tail;
                }
            }
        }
        Ok(sums)
    }
}

/// One grid value with the coverage in every mode of [`BoundsMode::ALL`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub theta: f64,
    pub values: [f64; 4],
}

impl GridPoint {
    pub fn value(&self, mode: BoundsMode) -> f64 {
        let i = BoundsMode::ALL.iter().position(|&m| m == mode).unwrap();
        self.values[i]
    }
}

/// The uniform grid of `n_grid` points on `[a, b]`, every bound value in the
/// range, and those values moved by `1e-9 (b - a)` either way (kept inside
/// `[a, b]`), sorted and deduplicated.
pub fn grid_thetas(
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
    n_grid: usize,
) -> Result<Vec<f64>, EngineError> {
    let scanned = Scanned::new(procedure, b)?;
    grid_from(&scanned, a, b, n_grid, GRID_OFFSET)
}

/// Relative distance of the extra grid points on either side of a bound value.
pub const GRID_OFFSET: f64 = 1e-9;

fn grid_from(
    scanned: &Scanned,
    a: f64,
    b: f64,
    n_grid: usize,
    offset: f64,
) -> Result<Vec<f64>, EngineError> {
    if n_grid < 2 || !(a < b) {
        return Err(EngineError::Range("grid needs a < b and at least 2 points".into()));
    }
    let last = n_grid - 1;
    let mut thetas: Vec<f64> = (0..n_grid)
        .map(|i| if i == last { b } else { a + (b - a) * i as f64 / last as f64 })
        .collect();
    let eps = offset * (b - a);
    for v in scanned.values_within(a, b)? {
        thetas.push(v);
        for w in [v - eps, v + eps] {
            thetas.push(w.clamp(a, b));
        }
    }
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    Ok(thetas)
}

/// Brute-force coverage in all four modes on the oracle grid.
pub fn grid_scan(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
    n_grid: usize,
) -> Result<Vec<GridPoint>, EngineError> {
    grid_scan_offset(spec, procedure, a, b, n_grid, GRID_OFFSET)
}

/// [`grid_scan`] with the points beside each bound value placed at
/// `offset (b - a)` instead of [`GRID_OFFSET`].
pub fn grid_scan_offset(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
    n_grid: usize,
    offset: f64,
) -> Result<Vec<GridPoint>, EngineError> {
    let scanned = Scanned::new(procedure, b.max(a))?;
    grid_from(&scanned, a, b, n_grid, offset)?
        .into_iter()
        .map(|theta| {
            let v = scanned.coverage(spec, theta, &BoundsMode::ALL)?;
            Ok(GridPoint {
                theta,
                values: [v[0], v[1], v[2], v[3]],
            })
        })
        .collect()
}

/// Brute-force coverage at a single point.
pub fn direct_coverage(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    theta: f64,
    mode: BoundsMode,
) -> Result<f64, EngineError> {
    let scanned = Scanned::new(procedure, theta)?;
    Ok(scanned.coverage(spec, theta, &[mode])?[0])
}

/// `(theta*, value)`: the least coverage over the grid of [`grid_thetas`];
/// ties go to the smallest `theta`.
pub fn grid_min(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
    mode: BoundsMode,
    n_grid: usize,
) -> Result<(f64, f64), EngineError> {
    let scanned = Scanned::new(procedure, b.max(a))?;
    let mut best = (f64::NAN, f64::INFINITY);
    for theta in grid_from(&scanned, a, b, n_grid, GRID_OFFSET)? {
        let v = scanned.coverage(spec, theta, &[mode])?[0];
        if v < best.1 {
            best = (theta, v);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypergeomMin {
    pub marked: u64,
    pub value: f64,
    pub exact: BigRational,
}

/// Least exact coverage over every integer `M` in `[a, b]`; ties go to the
/// smallest `M`.
pub fn exhaustive_min_hypergeom(
    spec: &DistributionSpec,
    procedure: &IntervalProcedure,
    a: u64,
    b: u64,
    mode: BoundsMode,
) -> Result<HypergeomMin, EngineError> {
    let DistributionSpec::Hypergeometric { population, draws } = *spec else {
        return Err(EngineError::Incompatible {
            spec: spec.to_string(),
            reason: "not a hypergeometric distribution".into(),
        });
    };
    if population > MAX_EXACT_POPULATION {
        return Err(EngineError::Range(format!(
            "exact scan is limited to N <= {MAX_EXACT_POPULATION}"
        )));
    }
    if a > b || b > population {
        return Err(EngineError::Range(format!("need a <= b <= N = {population}")));
    }
    let rows = Scanned::new(procedure, b as f64)?.rows;
    if rows.len() as u64 != draws + 1 {
        return Err(EngineError::Incompatible {
            spec: spec.to_string(),
            reason: format!("procedure has {} rows", rows.len()),
        });
    }
    let pascal = Pascal::<BigInt>::new(population);
    let denom = pascal.binom(population as i64, draws as i64);
    let (big, n) = (population as i64, draws as i64);
    let mut best: Option<(u64, BigInt)> = None;
    for m in a..=b {
        let theta = m as f64;
        let mut num = BigInt::zero();
        for (k, &(l, u)) in rows.iter().enumerate() {
            if mode.holds(l, theta, u) {
                let k = k as i64;
                num += pascal.binom(m as i64, k) * pascal.binom(big - m as i64, n - k);
            }
        }
        if best.as_ref().is_none_or(|(_, b)| num < *b) {
            best = Some((m, num));
        }
    }
    let (marked, num) = best.expect("a <= b");
    let exact = BigRational::new(num, denom);
    Ok(HypergeomMin {
        marked,
        value: exact.to_f64().unwrap_or(f64::NAN),
        exact,
    })
}
