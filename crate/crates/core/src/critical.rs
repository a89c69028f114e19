//! Finite parameter sets on which worst-case coverage is decided.
//!
//! For a range `[a, b]` the set is `{a, b}` together with every bound value
//! `L(k)` or `U(k)` inside the range. Between two consecutive members no
//! bound value lies strictly inside, so every coverage event is constant
//! there and only the members (and one-sided limits at them) matter.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::procedures::{Direction, IntervalProcedure, ProcedureError, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriticalSetError {
    #[error("range: a must be < b (got a={a}, b={b})")]
    EmptyRange { a: f64, b: f64 },
    #[error("range [{a}, {b}] leaves 0..={population}")]
    OutsidePopulation { a: u64, b: u64, population: u64 },
    #[error(transparent)]
    Procedure(#[from] ProcedureError),
}

/// Why a value is in the set. `LowerBreak(k)` means `L(k)` equals it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    EndpointA,
    EndpointB,
    LowerBreak(u64),
    UpperBreak(u64),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::EndpointA => f.write_str("a"),
            Provenance::EndpointB => f.write_str("b"),
            Provenance::LowerBreak(k) => write!(f, "L{k}"),
            Provenance::UpperBreak(k) => write!(f, "U{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub value: f64,
    /// Sorted, without duplicates.
    pub provenance: Vec<Provenance>,
}

impl CriticalPoint {
    pub fn is_lower_break(&self) -> bool {
        self.provenance
            .iter()
            .any(|p| matches!(p, Provenance::LowerBreak(_)))
    }

    pub fn is_upper_break(&self) -> bool {
        self.provenance
            .iter()
            .any(|p| matches!(p, Provenance::UpperBreak(_)))
    }

    pub fn is_endpoint(&self) -> bool {
        self.provenance
            .iter()
            .any(|p| matches!(p, Provenance::EndpointA | Provenance::EndpointB))
    }

    /// One of `endpoint`, `LU`, `L`, `U`.
    pub fn kind(&self) -> &'static str {
        if self.is_endpoint() {
            return "endpoint";
        }
        match (self.is_lower_break(), self.is_upper_break()) {
            (true, true) => "LU",
            (true, false) => "L",
            (false, true) => "U",
            (false, false) => "none",
        }
    }

    pub fn tags(&self) -> String {
        let tags: Vec<String> = self.provenance.iter().map(ToString::to_string).collect();
        tags.join(",")
    }
}

/// Sorted, strictly increasing critical values with `a` first and `b` last.
/// Bound values equal to `a` or `b` are merged into the endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    points: Vec<CriticalPoint>,
    range: (f64, f64),
}

impl CriticalSet {
    pub fn points(&self) -> &[CriticalPoint] {
        &self.points
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }

    /// Points strictly inside `(a, b)`.
    pub fn interior(&self) -> &[CriticalPoint] {
        &self.points[1..self.points.len() - 1]
    }

    fn assemble(a: f64, b: f64, mut raw: Vec<(f64, Provenance)>) -> Self {
        raw.push((a, Provenance::EndpointA));
        raw.push((b, Provenance::EndpointB));
        raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let mut points: Vec<CriticalPoint> = Vec::new();
        for (value, tag) in raw {
            match points.last_mut() {
                Some(last) if last.value == value => {
                    if !last.provenance.contains(&tag) {
                        last.provenance.push(tag);
                    }
                }
                _ => points.push(CriticalPoint {
                    value,
                    provenance: vec![tag],
                }),
            }
        }
        for p in &mut points {
            p.provenance.sort();
        }
        Self {
            points,
            range: (a, b),
        }
    }
}

/// Every `(k, value)` of one bound with `a <= value <= b`.
///
/// Monotonicity makes the contributing `k` a contiguous range, located with
/// the same flip searches as the coverage events; bounds known only up to a
/// tail limit are certified or rejected there.
fn bound_values_within(
    procedure: &IntervalProcedure,
    side: Side,
    a: f64,
    b: f64,
) -> Result<Vec<(u64, f64)>, ProcedureError> {
    let at_least_a = move |v: f64| v >= a;
    let at_most_b = move |v: f64| v <= b;
    let (start, end) = match procedure.direction() {
        Direction::NonDecreasing => (
            procedure.first_flip(side, &at_least_a, false)?,
            procedure.first_flip(side, &at_most_b, true)?,
        ),
        Direction::NonIncreasing => (
            procedure.first_flip(side, &at_most_b, false)?,
            procedure.first_flip(side, &at_least_a, true)?,
        ),
    };
    let Some(start) = start else {
        return Ok(Vec::new());
    };
    let last = match (end, procedure.support().k_max()) {
        (Some(0), _) => return Ok(Vec::new()),
        (Some(flip), _) => flip - 1,
        (None, Some(k_max)) => k_max,
        (None, None) => match procedure.table_len() {
            // constant tail: every later k repeats the last entry
            Some(len) => len as u64 - 1,
            None => return Err(ProcedureError::InfinitelyManyValues { side }),
        },
    };
    let mut out = Vec::new();
    for k in start..=last.max(start) {
        if k > last {
            break;
        }
        let v = procedure
            .known(side, k)
            .ok_or(ProcedureError::Uncertified { side, k })?;
        debug_assert!(v >= a && v <= b);
        out.push((k, v));
    }
    Ok(out)
}

fn collect(
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
) -> Result<Vec<(f64, Provenance)>, ProcedureError> {
    let mut raw = Vec::new();
    for (k, v) in bound_values_within(procedure, Side::Lower, a, b)? {
        raw.push((v, Provenance::LowerBreak(k)));
    }
    for (k, v) in bound_values_within(procedure, Side::Upper, a, b)? {
        raw.push((v, Provenance::UpperBreak(k)));
    }
    Ok(raw)
}

/// `{a, b}` plus every `L(k)` and `U(k)` in `[a, b]` for a real parameter.
pub fn breakpoints_continuous(
    procedure: &IntervalProcedure,
    a: f64,
    b: f64,
) -> Result<CriticalSet, CriticalSetError> {
    if !(a < b) {
        return Err(CriticalSetError::EmptyRange { a, b });
    }
    let raw = collect(procedure, a, b)?;
    Ok(CriticalSet::assemble(a, b, raw))
}

/// The integer set `{a, b}` plus every `L(k)` and `U(k)` in `[a, b]`, for a
/// nondecreasing integer-valued procedure on a population of `population`.
pub fn breakpoints_hypergeom(
    procedure: &IntervalProcedure,
    a: u64,
    b: u64,
    population: u64,
) -> Result<CriticalSet, CriticalSetError> {
    if a >= b {
        return Err(CriticalSetError::EmptyRange {
            a: a as f64,
            b: b as f64,
        });
    }
    if b > population {
        return Err(CriticalSetError::OutsidePopulation { a, b, population });
    }
    procedure.require_integer_nondecreasing()?;
    let raw = collect(procedure, a as f64, b as f64)?;
    Ok(CriticalSet::assemble(a as f64, b as f64, raw))
}

/// Whether any bound value lies strictly between consecutive members, for
/// procedures whose bounds can be listed exhaustively up to `k_last`.
pub fn gap_violations(
    set: &CriticalSet,
    procedure: &IntervalProcedure,
    k_last: u64,
) -> Vec<(u64, Side, f64)> {
    let end = procedure.support().k_max().map_or(k_last, |m| m.min(k_last));
    let mut bad = Vec::new();
    for k in 0..=end {
        for side in [Side::Lower, Side::Upper] {
            let Some(v) = procedure.known(side, k) else {
                continue;
            };
            let inside = set.points().windows(2).any(|w| {
                w[0].value.partial_cmp(&v) == Some(Ordering::Less)
                    && v.partial_cmp(&w[1].value) == Some(Ordering::Less)
            });
            if inside {
                bad.push((k, side, v));
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::{garwood_poisson, TailLimits};

    fn values(set: &CriticalSet) -> Vec<f64> {
        set.values().collect()
    }

    #[test]
    fn constant_procedure_has_only_endpoints() {
        let p = IntervalProcedure::from_table(vec![0.0; 5], vec![1.0; 5], Direction::NonDecreasing)
            .unwrap();
        let s = breakpoints_continuous(&p, 0.2, 0.8).unwrap();
        assert_eq!(values(&s), vec![0.2, 0.8]);
        assert!(s.interior().is_empty());
    }

    #[test]
    fn three_entry_table() {
        let p = IntervalProcedure::from_table(
            vec![0.0, 0.2, 0.4],
            vec![0.5, 0.7, 0.9],
            Direction::NonDecreasing,
        )
        .unwrap();
        let s = breakpoints_continuous(&p, 0.1, 0.75).unwrap();
        assert_eq!(values(&s), vec![0.1, 0.2, 0.4, 0.5, 0.7, 0.75]);
        assert_eq!(s.points()[1].provenance, vec![Provenance::LowerBreak(1)]);
        assert_eq!(s.points()[3].kind(), "U");
        assert!(gap_violations(&s, &p, 10).is_empty());
    }

    #[test]
    fn rejects_reversed_range() {
        let p = IntervalProcedure::from_table(vec![0.0], vec![1.0], Direction::NonDecreasing)
            .unwrap();
        assert!(matches!(
            breakpoints_continuous(&p, 0.5, 0.5),
            Err(CriticalSetError::EmptyRange { .. })
        ));
    }

    #[test]
    fn endpoint_coincidence_keeps_both_tags() {
        let p = IntervalProcedure::from_table(
            vec![0.0, 0.2, 0.4],
            vec![0.2, 0.7, 0.9],
            Direction::NonDecreasing,
        )
        .unwrap();
        let s = breakpoints_continuous(&p, 0.2, 0.7).unwrap();
        assert_eq!(values(&s), vec![0.2, 0.4, 0.7]);
        assert_eq!(
            s.points()[0].provenance,
            vec![
                Provenance::EndpointA,
                Provenance::LowerBreak(1),
                Provenance::UpperBreak(0)
            ]
        );
        assert_eq!(s.points()[0].kind(), "endpoint");
    }

    #[test]
    fn garwood_breakpoints_are_complete() {
        let g = garwood_poisson(1, 0.05).unwrap();
        let s = breakpoints_continuous(&g, 0.0, 1.0).unwrap();
        let mut expect = vec![0.0, 1.0];
        for k in 0..=50 {
            for v in [g.lower(k).unwrap(), g.upper(k).unwrap()] {
                if v > 0.0 && v < 1.0 {
                    expect.push(v);
                }
            }
        }
        expect.sort_by(f64::total_cmp);
        expect.dedup();
        assert_eq!(values(&s), expect);
        assert!(s.points()[0].is_lower_break());
    }

    #[test]
    fn uncertified_tail_is_an_error() {
        let p = IntervalProcedure::from_table_with_tail(
            vec![0.0, 0.2, 0.4],
            vec![0.5, 0.7, 0.9],
            TailLimits::infinite(),
            Direction::NonDecreasing,
        )
        .unwrap();
        assert!(matches!(
            breakpoints_continuous(&p, 0.1, 0.6),
            Err(CriticalSetError::Procedure(ProcedureError::Uncertified { .. }))
        ));
        // When every table entry beyond some k clears b, the set is certified.
        let s = breakpoints_continuous(&p, 0.1, 0.35).unwrap();
        assert_eq!(values(&s), vec![0.1, 0.2, 0.35]);
    }

    #[test]
    fn constant_tail_inside_range() {
        let p = IntervalProcedure::from_table_with_tail(
            vec![0.0, 0.2, 0.4],
            vec![0.5, 0.7, 0.9],
            TailLimits {
                lower: 0.4,
                upper: 0.9,
            },
            Direction::NonDecreasing,
        )
        .unwrap();
        let s = breakpoints_continuous(&p, 0.1, 0.95).unwrap();
        assert_eq!(values(&s), vec![0.1, 0.2, 0.4, 0.5, 0.7, 0.9, 0.95]);
    }

    #[test]
    fn hypergeometric_examples() {
        let p = IntervalProcedure::from_table(
            vec![0.0, 1.0, 3.0, 5.0, 7.0],
            vec![3.0, 5.0, 7.0, 9.0, 10.0],
            Direction::NonDecreasing,
        )
        .unwrap();
        let s = breakpoints_hypergeom(&p, 0, 10, 10).unwrap();
        assert_eq!(values(&s), vec![0.0, 1.0, 3.0, 5.0, 7.0, 9.0, 10.0]);
        let s = breakpoints_hypergeom(&p, 4, 6, 10).unwrap();
        assert_eq!(values(&s), vec![4.0, 5.0, 6.0]);
        assert_eq!(
            s.points()[1].provenance,
            vec![Provenance::LowerBreak(3), Provenance::UpperBreak(1)]
        );

        let full = IntervalProcedure::from_table(vec![0.0; 5], vec![10.0; 5], Direction::NonDecreasing)
            .unwrap();
        let s = breakpoints_hypergeom(&full, 2, 7, 10).unwrap();
        assert_eq!(values(&s), vec![2.0, 7.0]);

        let frac = IntervalProcedure::from_table(vec![0.5; 5], vec![10.0; 5], Direction::NonDecreasing)
            .unwrap();
        assert!(breakpoints_hypergeom(&frac, 0, 10, 10).is_err());
        assert!(breakpoints_hypergeom(&full, 0, 11, 10).is_err());
    }
}
