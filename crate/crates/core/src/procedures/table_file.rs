//! Text format for tabulated procedures.
//!
//! ```text
//! # family=poisson n=2 direction=nondecreasing
//! 0,0.0000000000000000e0,1.8444397270573063e0
//! 1,1.2658903992360138e-2,2.7858216954696218e0
//! tail,inf,inf
//! ```
//!
//! The header names the family and its fixed parameters (`N=` for the
//! hypergeometric population, `r=` for the negative-binomial shape). Rows are
//! `k,L,U` for `k = 0, 1, 2, ...` without gaps. Families with unbounded
//! support need a final `tail,<L limit>,<U limit>` row.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Direction, IntervalProcedure, ProcedureError, Side, TailLimits};
use crate::dist::{DistributionSpec, Family};
use crate::fmt_real;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct TableFileError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> TableFileError {
    TableFileError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableHeader {
    pub family: Family,
    pub n: u64,
    pub population: Option<u64>,
    pub shape: Option<f64>,
    pub direction: Direction,
}

impl TableHeader {
    pub fn spec(&self) -> Result<DistributionSpec, TableFileError> {
        let spec = match self.family {
            Family::Binomial => DistributionSpec::binomial(self.n),
            Family::Poisson => DistributionSpec::poisson(self.n),
            Family::NegBinomial => {
                DistributionSpec::neg_binomial(self.shape.ok_or_else(|| err(1, "missing r="))?)
            }
            Family::Hypergeometric => DistributionSpec::hypergeometric(
                self.population.ok_or_else(|| err(1, "missing N="))?,
                self.n,
            ),
        };
        spec.map_err(|e| err(1, e.to_string()))
    }

    pub fn for_spec(spec: &DistributionSpec, direction: Direction) -> Self {
        let (n, population, shape) = match *spec {
            DistributionSpec::Binomial { trials } => (trials, None, None),
            DistributionSpec::Poisson { samples } => (samples, None, None),
            DistributionSpec::NegBinomial { shape } => (1, None, Some(shape)),
            DistributionSpec::Hypergeometric { population, draws } => {
                (draws, Some(population), None)
            }
        };
        Self {
            family: spec.family(),
            n,
            population,
            shape,
            direction,
        }
    }

    fn render(&self) -> String {
        let mut s = format!("# family={} n={}", self.family, self.n);
        if let Some(p) = self.population {
            let _ = write!(s, " N={p}");
        }
        if let Some(r) = self.shape {
            let _ = write!(s, " r={r}");
        }
        let _ = write!(s, " direction={}", self.direction);
        s
    }
}

#[derive(Debug, Clone)]
pub struct ProcedureTable {
    pub header: TableHeader,
    pub spec: DistributionSpec,
    pub procedure: IntervalProcedure,
}

fn parse_header(line: &str) -> Result<TableHeader, TableFileError> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| err(1, "expected header starting with `#`"))?;
    let mut family = None;
    let mut n = None;
    let mut population = None;
    let mut shape = None;
    let mut direction = None;
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(1, format!("malformed header field `{field}`")))?;
        let bad = |what: &str| err(1, format!("invalid {what} `{value}`"));
        match key {
            "family" => family = Some(value.parse::<Family>().map_err(|e| err(1, e))?),
            "n" => n = Some(value.parse::<u64>().map_err(|_| bad("n"))?),
            "N" => population = Some(value.parse::<u64>().map_err(|_| bad("N"))?),
            "r" => shape = Some(value.parse::<f64>().map_err(|_| bad("r"))?),
            "direction" => direction = Some(value.parse::<Direction>().map_err(|e| err(1, e))?),
            other => return Err(err(1, format!("unknown header key `{other}`"))),
        }
    }
    let family = family.ok_or_else(|| err(1, "missing family="))?;
    Ok(TableHeader {
        family,
        n: n.ok_or_else(|| err(1, "missing n="))?,
        population,
        shape,
        direction: direction.ok_or_else(|| err(1, "missing direction="))?,
    })
}

fn parse_real(s: &str, line: usize) -> Result<f64, TableFileError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| err(line, format!("invalid number `{}`", s.trim())))?;
    if v.is_nan() {
        return Err(err(line, "NaN is not a valid bound"));
    }
    Ok(v)
}

/// Parses a procedure table and validates it against its own header.
pub fn parse(text: &str) -> Result<ProcedureTable, TableFileError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, first) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let header = parse_header(first)?;
    let spec = header.spec()?;

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut row_lines = Vec::new();
    let mut tail = None;
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        if tail.is_some() {
            return Err(err(no, "rows after the tail line"));
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(err(no, format!("expected 3 comma-separated fields, got {}", cols.len())));
        }
        if cols[0].trim() == "tail" {
            tail = Some(TailLimits {
                lower: parse_real(cols[1], no)?,
                upper: parse_real(cols[2], no)?,
            });
            continue;
        }
        let k: usize = cols[0]
            .trim()
            .parse()
            .map_err(|_| err(no, format!("invalid k `{}`", cols[0].trim())))?;
        if k != lower.len() {
            return Err(err(no, format!("expected k={}, got k={k}", lower.len())));
        }
        lower.push(parse_real(cols[1], no)?);
        upper.push(parse_real(cols[2], no)?);
        row_lines.push(no);
    }
    if lower.is_empty() {
        return Err(err(1, "no rows"));
    }

    let row_line = |k: usize| row_lines.get(k).copied().unwrap_or(1);
    let map = |e: ProcedureError| match e {
        ProcedureError::LowerAboveUpper { k, .. } | ProcedureError::DirectionViolated { k, .. } => {
            err(row_line(k), e.to_string())
        }
        other => err(row_lines.last().copied().unwrap_or(1) + 1, other.to_string()),
    };

    let procedure = match spec.k_max() {
        Some(k_max) => {
            if tail.is_some() {
                return Err(err(
                    row_lines.last().copied().unwrap_or(1) + 1,
                    format!("{} tables must not have a tail line", header.family),
                ));
            }
            if lower.len() as u64 != k_max + 1 {
                return Err(err(
                    row_line(lower.len() - 1),
                    format!("expected rows k=0..={k_max}, got {}", lower.len()),
                ));
            }
            IntervalProcedure::from_table(lower, upper, header.direction).map_err(map)?
        }
        None => {
            let tail = tail.ok_or_else(|| {
                err(
                    row_lines.last().copied().unwrap_or(1),
                    format!("{} tables need a trailing `tail,L,U` line", header.family),
                )
            })?;
            IntervalProcedure::from_table_with_tail(lower, upper, tail, header.direction)
                .map_err(map)?
        }
    };
    Ok(ProcedureTable {
        header,
        spec,
        procedure,
    })
}

/// Renders a procedure in the table format. Finite supports are written in
/// full; unbounded ones up to `k_last` followed by the tail limits.
pub fn render(spec: &DistributionSpec, procedure: &IntervalProcedure, k_last: u64) -> String {
    let header = TableHeader::for_spec(spec, procedure.direction());
    let mut out = header.render();
    out.push('\n');
    let end = procedure.support().k_max().unwrap_or(k_last);
    for k in 0..=end {
        let value = |side| {
            procedure
                .known(side, k)
                .map_or_else(|| "nan".to_string(), fmt_real)
        };
        let _ = writeln!(out, "{k},{},{}", value(Side::Lower), value(Side::Upper));
    }
    if let (None, Some(t)) = (procedure.support().k_max(), procedure.tail_limits()) {
        let _ = writeln!(out, "tail,{},{}", fmt_real(t.lower), fmt_real(t.upper));
    }
    out
}
