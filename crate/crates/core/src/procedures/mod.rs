//! Interval procedures `k -> (L(k), U(k))` and the mapping from a coverage
//! event to the contiguous range of `k` it selects.
//!
//! Both bounds share one monotone direction. Under that assumption the set
//! `{k : L(k) <= t}` is a prefix (or suffix) of the support, and so is every
//! other one-sided comparison, which makes every coverage event an interval
//! of `k` that binary search can locate.

mod builtin;
pub mod table_file;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use builtin::{clopper_pearson, garwood_poisson};
use builtin::GarwoodRule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcedureError {
    #[error("procedure table is empty")]
    EmptyTable,
    #[error("lower table has {lower} entries but upper table has {upper}")]
    LengthMismatch { lower: usize, upper: usize },
    #[error("bound at k={k} is NaN")]
    NotANumber { k: usize },
    #[error("L({k}) = {lower} exceeds U({k}) = {upper}")]
    LowerAboveUpper { k: usize, lower: f64, upper: f64 },
    #[error("{side} bound is not {direction} at k={k}")]
    DirectionViolated {
        side: Side,
        direction: Direction,
        k: usize,
    },
    #[error("tail limit of the {side} bound ({limit}) is inconsistent with the table")]
    BadTailLimit { side: Side, limit: f64 },
    #[error(
        "cannot certify the {side} bound beyond k={k}: the table stops before its values \
         leave the queried range"
    )]
    Uncertified { side: Side, k: u64 },
    #[error("{side} bound has infinitely many values in the queried range")]
    InfinitelyManyValues { side: Side },
    #[error("{0} bound must be integer-valued")]
    NotInteger(Side),
    #[error("procedure must be nondecreasing")]
    NotNonDecreasing,
    #[error("invalid built-in procedure: {0}")]
    InvalidBuiltin(String),
    #[error("shifting is only defined for tabulated procedures")]
    NotTabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::NonDecreasing => "nondecreasing",
            Direction::NonIncreasing => "nonincreasing",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nondecreasing" => Ok(Direction::NonDecreasing),
            "nonincreasing" => Ok(Direction::NonIncreasing),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// `{0, ..., k_max}`
    Finite { k_max: u64 },
    /// `{0, 1, 2, ...}`
    Unbounded,
}

impl Support {
    pub fn k_max(self) -> Option<u64> {
        match self {
            Support::Finite { k_max } => Some(k_max),
            Support::Unbounded => None,
        }
    }
}

/// Limits of `L(k)` and `U(k)` as `k -> infinity` (possibly infinite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailLimits {
    pub lower: f64,
    pub upper: f64,
}

impl TailLimits {
    pub fn infinite() -> Self {
        Self {
            lower: f64::INFINITY,
            upper: f64::INFINITY,
        }
    }

    fn get(&self, side: Side) -> f64 {
        match side {
            Side::Lower => self.lower,
            Side::Upper => self.upper,
        }
    }
}

/// Which of the four comparison pairs defines the coverage event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundsMode {
    /// `L < t < U`
    OpenOpen,
    /// `L <= t <= U`
    ClosedClosed,
    /// `L <= t < U`, the quantity `C_U`
    ClosedOpen,
    /// `L < t <= U`, the quantity `C_L`
    OpenClosed,
}

impl BoundsMode {
    pub const ALL: [BoundsMode; 4] = [
        BoundsMode::OpenOpen,
        BoundsMode::ClosedOpen,
        BoundsMode::OpenClosed,
        BoundsMode::ClosedClosed,
    ];

    /// `(lower comparison is <=, upper comparison is >=)`
    pub fn closedness(self) -> (bool, bool) {
        match self {
            BoundsMode::OpenOpen => (false, false),
            BoundsMode::ClosedClosed => (true, true),
            BoundsMode::ClosedOpen => (true, false),
            BoundsMode::OpenClosed => (false, true),
        }
    }

    /// Whether `(lower, upper)` satisfy the event's comparisons at `theta`.
    pub fn holds(self, lower: f64, theta: f64, upper: f64) -> bool {
        let (lc, uc) = self.closedness();
        let lower_ok = if lc { lower <= theta } else { lower < theta };
        let upper_ok = if uc { upper >= theta } else { upper > theta };
        lower_ok && upper_ok
    }
}

impl fmt::Display for BoundsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundsMode::OpenOpen => "open",
            BoundsMode::ClosedClosed => "closed",
            BoundsMode::ClosedOpen => "closed-open",
            BoundsMode::OpenClosed => "open-closed",
        })
    }
}

/// A contiguous range of `k`; `hi = None` means unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KIndexInterval {
    Empty,
    Span { lo: u64, hi: Option<u64> },
}

impl KIndexInterval {
    pub fn new(lo: u64, hi: Option<u64>) -> Self {
        match hi {
            Some(h) if h < lo => KIndexInterval::Empty,
            _ => KIndexInterval::Span { lo, hi },
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, KIndexInterval::Empty)
    }

    pub fn contains(&self, k: u64) -> bool {
        match *self {
            KIndexInterval::Empty => false,
            KIndexInterval::Span { lo, hi } => k >= lo && hi.is_none_or(|h| k <= h),
        }
    }

    pub fn is_subset_of(&self, other: &KIndexInterval) -> bool {
        match (*self, *other) {
            (KIndexInterval::Empty, _) => true,
            (_, KIndexInterval::Empty) => false,
            (KIndexInterval::Span { lo: a, hi: ha }, KIndexInterval::Span { lo: b, hi: hb }) => {
                a >= b
                    && match (ha, hb) {
                        (_, None) => true,
                        (None, Some(_)) => false,
                        (Some(x), Some(y)) => x <= y,
                    }
            }
        }
    }
}

impl fmt::Display for KIndexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KIndexInterval::Empty => f.write_str("{}"),
            KIndexInterval::Span { lo, hi: Some(hi) } => write!(f, "{{{lo}..{hi}}}"),
            KIndexInterval::Span { lo, hi: None } => write!(f, "{{{lo}..inf}}"),
        }
    }
}

/// The value of a bound at some `k`. Beyond the end of a table with an
/// unbounded support only the closed hull of the possible values is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    Known(f64),
    Between(f64, f64),
}

#[derive(Debug, Clone)]
enum Rule {
    Table {
        lower: Vec<f64>,
        upper: Vec<f64>,
        tail: Option<TailLimits>,
    },
    Garwood(Arc<GarwoodRule>),
}

/// A validated monotone procedure.
#[derive(Debug, Clone)]
pub struct IntervalProcedure {
    rule: Rule,
    direction: Direction,
    label: String,
}

impl IntervalProcedure {
    /// Finite-support procedure on `{0, ..., len - 1}`.
    pub fn from_table(
        lower: Vec<f64>,
        upper: Vec<f64>,
        direction: Direction,
    ) -> Result<Self, ProcedureError> {
        validate_tables(&lower, &upper, direction)?;
        Ok(Self {
            rule: Rule::Table {
                lower,
                upper,
                tail: None,
            },
            direction,
            label: "table".into(),
        })
    }

    /// Unbounded-support procedure given by a table for `k < len` and the
    /// limits of both bounds as `k -> infinity`. A tail limit equal to the
    /// last table entry means the bound stays at that value.
    pub fn from_table_with_tail(
        lower: Vec<f64>,
        upper: Vec<f64>,
        tail: TailLimits,
        direction: Direction,
    ) -> Result<Self, ProcedureError> {
        validate_tables(&lower, &upper, direction)?;
        for (side, table) in [(Side::Lower, &lower), (Side::Upper, &upper)] {
            let limit = tail.get(side);
            let last = table[table.len() - 1];
            let ok = match direction {
                Direction::NonDecreasing => limit >= last,
                Direction::NonIncreasing => limit <= last,
            };
            if !ok || limit.is_nan() {
                return Err(ProcedureError::BadTailLimit { side, limit });
            }
        }
        if tail.lower > tail.upper {
            return Err(ProcedureError::BadTailLimit {
                side: Side::Lower,
                limit: tail.lower,
            });
        }
        Ok(Self {
            rule: Rule::Table {
                lower,
                upper,
                tail: Some(tail),
            },
            direction,
            label: "table".into(),
        })
    }

    pub(crate) fn from_garwood(rule: GarwoodRule) -> Self {
        let label = rule.label();
        Self {
            rule: Rule::Garwood(Arc::new(rule)),
            direction: Direction::NonDecreasing,
            label,
        }
    }

    pub(crate) fn with_label(mut self, label: String) -> Self {
        self.label = label;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn support(&self) -> Support {
        match &self.rule {
            Rule::Table {
                lower, tail: None, ..
            } => Support::Finite {
                k_max: lower.len() as u64 - 1,
            },
            Rule::Table { tail: Some(_), .. } | Rule::Garwood(_) => Support::Unbounded,
        }
    }

    pub fn tail_limits(&self) -> Option<TailLimits> {
        match &self.rule {
            Rule::Table { tail, .. } => *tail,
            Rule::Garwood(_) => Some(TailLimits::infinite()),
        }
    }

    /// Number of tabulated entries, `None` for rule-based procedures.
    pub fn table_len(&self) -> Option<usize> {
        match &self.rule {
            Rule::Table { lower, .. } => Some(lower.len()),
            Rule::Garwood(_) => None,
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.rule, Rule::Table { .. })
    }

    pub fn bound_at(&self, side: Side, k: u64) -> BoundValue {
        match &self.rule {
            Rule::Table { lower, upper, tail } => {
                let table = match side {
                    Side::Lower => lower,
                    Side::Upper => upper,
                };
                if let Some(&v) = table.get(k as usize) {
                    return BoundValue::Known(v);
                }
                let last = table[table.len() - 1];
                let limit = tail.map_or(last, |t| t.get(side));
                if limit == last {
                    BoundValue::Known(last)
                } else {
                    BoundValue::Between(last.min(limit), last.max(limit))
                }
            }
            Rule::Garwood(g) => {
                let (lo, up) = g.bounds(k);
                BoundValue::Known(match side {
                    Side::Lower => lo,
                    Side::Upper => up,
                })
            }
        }
    }

    /// `L(k)` when it is known.
    pub fn lower(&self, k: u64) -> Option<f64> {
        self.known(Side::Lower, k)
    }

    /// `U(k)` when it is known.
    pub fn upper(&self, k: u64) -> Option<f64> {
        self.known(Side::Upper, k)
    }

    pub fn known(&self, side: Side, k: u64) -> Option<f64> {
        if self.support().k_max().is_some_and(|m| k > m) {
            return None;
        }
        match self.bound_at(side, k) {
            BoundValue::Known(v) => Some(v),
            BoundValue::Between(..) => None,
        }
    }

    /// Index past which the bound is no longer individually known, if any.
    pub(crate) fn known_len(&self, side: Side) -> Option<u64> {
        match &self.rule {
            Rule::Table { lower, upper, tail } => {
                let table = match side {
                    Side::Lower => lower,
                    Side::Upper => upper,
                };
                match tail {
                    None => Some(table.len() as u64),
                    Some(t) if t.get(side) == table[table.len() - 1] => None,
                    Some(_) => Some(table.len() as u64),
                }
            }
            Rule::Garwood(_) => None,
        }
    }

    fn limit(&self, side: Side) -> f64 {
        self.tail_limits().map_or(f64::NAN, |t| t.get(side))
    }

    /// First `k` at which `pred(bound(k))` differs from `leading`, where
    /// `pred` is a threshold comparison, so the truth pattern along `k` is
    /// `leading, ..., leading, !leading, ...`. `None` means it never flips.
    pub(crate) fn first_flip(
        &self,
        side: Side,
        pred: &dyn Fn(f64) -> bool,
        leading: bool,
    ) -> Result<Option<u64>, ProcedureError> {
        let differs = |k: u64| match self.bound_at(side, k) {
            BoundValue::Known(v) => pred(v) != leading,
            BoundValue::Between(..) => unreachable!("only known entries are probed"),
        };
        if let Support::Finite { k_max } = self.support() {
            return Ok(first_true(0, k_max, differs));
        }
        match &self.rule {
            Rule::Table { lower, .. } => {
                let last_idx = lower.len() as u64 - 1;
                if let Some(k) = first_true(0, last_idx, differs) {
                    return Ok(Some(k));
                }
                if self.known_len(side).is_none() {
                    return Ok(None);
                }
                // Beyond the table the bound moves monotonically from its last
                // entry towards the limit; a threshold predicate is constant on
                // that hull iff it agrees at both ends.
                if pred(self.limit(side)) == leading {
                    Ok(None)
                } else {
                    Err(ProcedureError::Uncertified {
                        side,
                        k: last_idx + 1,
                    })
                }
            }
            Rule::Garwood(_) => {
                if differs(0) {
                    return Ok(Some(0));
                }
                if pred(self.limit(side)) == leading {
                    return Ok(None);
                }
                const CAP: u64 = 1 << 40;
                let (mut lo, mut hi) = (0u64, 1u64);
                while !differs(hi) {
                    lo = hi;
                    hi *= 2;
                    if hi > CAP {
                        return Err(ProcedureError::Uncertified { side, k: lo });
                    }
                }
                Ok(first_true(lo + 1, hi, differs))
            }
        }
    }

    /// The set `{k : L(k) ~ theta ~ U(k)}` with comparisons chosen by `mode`.
    pub fn k_interval_for(
        &self,
        theta: f64,
        mode: BoundsMode,
    ) -> Result<KIndexInterval, ProcedureError> {
        let (lower_closed, upper_closed) = mode.closedness();
        let lower_ok = move |v: f64| if lower_closed { v <= theta } else { v < theta };
        let upper_ok = move |v: f64| if upper_closed { v >= theta } else { v > theta };
        let k_max = self.support().k_max();

        let (start, end) = match self.direction {
            Direction::NonDecreasing => {
                let Some(start) = self.first_flip(Side::Upper, &upper_ok, false)? else {
                    return Ok(KIndexInterval::Empty);
                };
                let end = self.first_flip(Side::Lower, &lower_ok, true)?;
                (start, end)
            }
            Direction::NonIncreasing => {
                let Some(start) = self.first_flip(Side::Lower, &lower_ok, false)? else {
                    return Ok(KIndexInterval::Empty);
                };
                let end = self.first_flip(Side::Upper, &upper_ok, true)?;
                (start, end)
            }
        };
        let hi = match end {
            Some(0) => return Ok(KIndexInterval::Empty),
            Some(flip) => Some(flip - 1),
            None => k_max,
        };
        Ok(KIndexInterval::new(start, hi))
    }

    /// Rejects procedures that are not nondecreasing with integer-valued
    /// bounds on a finite support.
    pub fn require_integer_nondecreasing(&self) -> Result<(), ProcedureError> {
        if self.direction != Direction::NonDecreasing {
            return Err(ProcedureError::NotNonDecreasing);
        }
        let (lower, upper) = match &self.rule {
            Rule::Table {
                lower,
                upper,
                tail: None,
            } => (lower, upper),
            _ => return Err(ProcedureError::NotTabulated),
        };
        for (side, table) in [(Side::Lower, lower), (Side::Upper, upper)] {
            if table.iter().any(|v| v.fract() != 0.0 || !v.is_finite()) {
                return Err(ProcedureError::NotInteger(side));
            }
        }
        Ok(())
    }

    /// The tabulated procedure `k -> (L(k) + dl, U(k) + du)`.
    pub fn shifted(&self, dl: f64, du: f64) -> Result<Self, ProcedureError> {
        let Rule::Table { lower, upper, tail } = &self.rule else {
            return Err(ProcedureError::NotTabulated);
        };
        let lower: Vec<f64> = lower.iter().map(|v| v + dl).collect();
        let upper: Vec<f64> = upper.iter().map(|v| v + du).collect();
        let p = match tail {
            None => Self::from_table(lower, upper, self.direction)?,
            Some(t) => Self::from_table_with_tail(
                lower,
                upper,
                TailLimits {
                    lower: t.lower + dl,
                    upper: t.upper + du,
                },
                self.direction,
            )?,
        };
        Ok(p.with_label(format!("{} shifted by ({dl}, {du})", self.label)))
    }

    /// Tabulates the bounds for `k = 0..=k_last` (clipped to the support).
    pub fn tabulate(&self, k_last: u64) -> Vec<(BoundValue, BoundValue)> {
        let end = self.support().k_max().map_or(k_last, |m| m.min(k_last));
        (0..=end)
            .map(|k| (self.bound_at(Side::Lower, k), self.bound_at(Side::Upper, k)))
            .collect()
    }
}

/// Smallest `k` in `lo..=hi` with `f(k)`, for `f` false-then-true on that
/// range.
fn first_true(lo: u64, hi: u64, f: impl Fn(u64) -> bool) -> Option<u64> {
    if lo > hi || !f(hi) {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if f(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

fn validate_tables(lower: &[f64], upper: &[f64], direction: Direction) -> Result<(), ProcedureError> {
    if lower.len() != upper.len() {
        return Err(ProcedureError::LengthMismatch {
            lower: lower.len(),
            upper: upper.len(),
        });
    }
    if lower.is_empty() {
        return Err(ProcedureError::EmptyTable);
    }
    for (k, (&l, &u)) in lower.iter().zip(upper).enumerate() {
        if l.is_nan() || u.is_nan() {
            return Err(ProcedureError::NotANumber { k });
        }
        if l > u {
            return Err(ProcedureError::LowerAboveUpper {
                k,
                lower: l,
                upper: u,
            });
        }
    }
    for (side, table) in [(Side::Lower, lower), (Side::Upper, upper)] {
        for k in 1..table.len() {
            let ok = match direction {
                Direction::NonDecreasing => table[k - 1] <= table[k],
                Direction::NonIncreasing => table[k - 1] >= table[k],
            };
            if !ok {
                return Err(ProcedureError::DirectionViolated { side, direction, k });
            }
        }
    }
    Ok(())
}
