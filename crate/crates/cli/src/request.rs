use std::fs;

use covprob::dist::{DistributionSpec, Family};
use covprob::procedures::table_file;
use covprob::procedures::{clopper_pearson, garwood_poisson, IntervalProcedure};

use crate::args::{Method, ProcedureArgs};
use crate::CliError;

#[derive(Debug)]
pub struct Resolved {
    pub spec: DistributionSpec,
    pub procedure: IntervalProcedure,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_family(raw: &str) -> Result<Family, CliError> {
    raw.parse().map_err(|e| usage(format!("family: {e}")))
}

fn spec_from_flags(args: &ProcedureArgs) -> Result<DistributionSpec, CliError> {
    let raw = args
        .family
        .as_deref()
        .ok_or_else(|| usage("family: --family is required without --table"))?;
    let family = parse_family(raw)?;
    let need_n = || args.n.ok_or_else(|| usage(format!("n: --n is required for {family}")));
    let spec = match family {
        Family::Binomial => DistributionSpec::binomial(need_n()?),
        Family::Poisson => DistributionSpec::poisson(need_n()?),
        Family::NegBinomial => {
            let shape = match (raw, args.r) {
                ("geometric", Some(r)) if r != 1.0 => {
                    return Err(usage("r: geometric means r=1"));
                }
                ("geometric", _) => 1.0,
                (_, Some(r)) => r,
                (_, None) => return Err(usage("r: --r is required for negbinomial")),
            };
            DistributionSpec::neg_binomial(shape)
        }
        Family::Hypergeometric => {
            let population = args
                .population
                .ok_or_else(|| usage("N: --N is required for hypergeometric"))?;
            DistributionSpec::hypergeometric(population, need_n()?)
        }
    };
    spec.map_err(|e| usage(format!("family: {e}")))
}

/// Flags given next to `--table` must agree with its header.
fn check_against_header(args: &ProcedureArgs, spec: &DistributionSpec) -> Result<(), CliError> {
    if let Some(raw) = &args.family {
        let family = parse_family(raw)?;
        if family != spec.family() {
            return Err(usage(format!(
                "family: --family {raw} disagrees with the table header ({})",
                spec.family()
            )));
        }
    }
    let (n, population, shape) = match *spec {
        DistributionSpec::Binomial { trials } => (Some(trials), None, None),
        DistributionSpec::Poisson { samples } => (Some(samples), None, None),
        DistributionSpec::NegBinomial { shape } => (None, None, Some(shape)),
        DistributionSpec::Hypergeometric { population, draws } => {
            (Some(draws), Some(population), None)
        }
    };
    if let (Some(flag), Some(header)) = (args.n, n) {
        if flag != header {
            return Err(usage(format!("n: --n {flag} disagrees with the table header (n={header})")));
        }
    }
    if let (Some(flag), Some(header)) = (args.population, population) {
        if flag != header {
            return Err(usage(format!("N: --N {flag} disagrees with the table header (N={header})")));
        }
    }
    if let (Some(flag), Some(header)) = (args.r, shape) {
        if flag != header {
            return Err(usage(format!("r: --r {flag} disagrees with the table header (r={header})")));
        }
    }
    Ok(())
}

pub fn resolve(args: &ProcedureArgs) -> Result<Resolved, CliError> {
    match (&args.table, args.method) {
        (Some(_), Some(_)) => Err(usage("method: give either --method or --table, not both")),
        (None, None) => Err(usage("method: one of --method or --table is required")),
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("table: cannot read {}: {e}", path.display())))?;
            let parsed = table_file::parse(&text)
                .map_err(|e| usage(format!("table: {}: {e}", path.display())))?;
            check_against_header(args, &parsed.spec)?;
            Ok(Resolved {
                spec: parsed.spec,
                procedure: parsed.procedure,
            })
        }
        (None, Some(method)) => {
            let spec = spec_from_flags(args)?;
            let procedure = match (method, spec) {
                (Method::ClopperPearson, DistributionSpec::Binomial { trials }) => {
                    clopper_pearson(trials, args.delta)
                }
                (Method::Garwood, DistributionSpec::Poisson { samples }) => {
                    garwood_poisson(samples, args.delta)
                }
                (Method::ClopperPearson, _) => {
                    return Err(usage("method: clopper-pearson requires --family binomial"))
                }
                (Method::Garwood, _) => {
                    return Err(usage("method: garwood requires --family poisson"))
                }
            }
            .map_err(|e| usage(format!("delta: {e}")))?;
            Ok(Resolved { spec, procedure })
        }
    }
}

fn parse_endpoint(s: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| usage(format!("range: `{s}` is not a number")))?;
    if v.is_nan() {
        return Err(usage("range: NaN is not a valid endpoint"));
    }
    Ok(v)
}

/// `a:b`, defaulting to the whole parameter space where it is bounded.
pub fn parse_range(raw: Option<&str>, spec: &DistributionSpec) -> Result<(f64, f64), CliError> {
    let Some(raw) = raw else {
        return match *spec {
            DistributionSpec::Binomial { .. } => Ok((0.0, 1.0)),
            DistributionSpec::Hypergeometric { population, .. } => Ok((0.0, population as f64)),
            _ => Err(usage(format!("range: --range is required for {}", spec.family()))),
        };
    };
    let (a, b) = raw
        .split_once(':')
        .ok_or_else(|| usage(format!("range: expected a:b, got `{raw}`")))?;
    if spec.family() == Family::Hypergeometric {
        for part in [a, b] {
            if part.trim().parse::<u64>().is_err() {
                return Err(usage(format!(
                    "range: hypergeometric endpoints must be integers, got `{}`",
                    part.trim()
                )));
            }
        }
    }
    let (a, b) = (parse_endpoint(a)?, parse_endpoint(b)?);
    if a >= b {
        return Err(usage("range: a must be < b"));
    }
    for v in [a, b] {
        spec.check_param(v).map_err(|e| usage(format!("range: {e}")))?;
    }
    Ok((a, b))
}
