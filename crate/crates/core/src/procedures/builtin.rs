//! Equal-tailed exact procedures: Clopper-Pearson for a binomial
//! proportion and Garwood for a Poisson rate.

use std::collections::HashMap;
use std::sync::Mutex;

use super::{Direction, IntervalProcedure, ProcedureError};
use crate::dist::DistributionSpec;
use crate::procedures::KIndexInterval;

/// Absolute tolerance on the parameter for every root.
const ROOT_TOL: f64 = 1e-12;

/// Root of a monotone function by bisection on `[lo, hi]`, where `above(x)`
/// is false below the root and true above it.
fn bisect(mut lo: f64, mut hi: f64, above: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_delta(delta: f64) -> Result<(), ProcedureError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(ProcedureError::InvalidBuiltin(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

/// Clopper-Pearson bounds for `n` trials: `L(k)` solves
/// `Pr{K >= k | L} = delta / 2` and `U(k)` solves `Pr{K <= k | U} = delta / 2`,
/// with `L(0) = 0` and `U(n) = 1`.
pub fn clopper_pearson(n: u64, delta: f64) -> Result<IntervalProcedure, ProcedureError> {
    if n == 0 {
        return Err(ProcedureError::InvalidBuiltin("n must be at least 1".into()));
    }
    check_delta(delta)?;
    let spec = DistributionSpec::Binomial { trials: n };
    let half = delta / 2.0;
    let prob = |p: f64, lo: u64, hi: u64| {
        spec.interval_prob(p, &KIndexInterval::new(lo, Some(hi)))
            .expect("p stays inside [0, 1]")
    };

    let mut lower = Vec::with_capacity(n as usize + 1);
    let mut upper = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        lower.push(if k == 0 {
            0.0
        } else {
            bisect(0.0, 1.0, |p| prob(p, k, n) >= half)
        });
        upper.push(if k == n {
            1.0
        } else {
            bisect(0.0, 1.0, |p| prob(p, 0, k) <= half)
        });
    }
    // Bisection noise can never reorder the roots by more than the
    // tolerance; clamp so validation sees exact monotonicity.
    for k in 1..lower.len() {
        lower[k] = lower[k].max(lower[k - 1]);
        upper[k] = upper[k].max(upper[k - 1]);
    }
    Ok(IntervalProcedure::from_table(lower, upper, Direction::NonDecreasing)?
        .with_label(format!("clopper-pearson(n={n}, delta={delta})")))
}

/// Garwood bounds on the per-sample rate from `samples` observations; the
/// total count is `Poisson(samples * lambda)`. Bounds are computed on demand
/// and memoized.
pub fn garwood_poisson(samples: u64, delta: f64) -> Result<IntervalProcedure, ProcedureError> {
    if samples == 0 {
        return Err(ProcedureError::InvalidBuiltin(
            "at least one sample is required".into(),
        ));
    }
    check_delta(delta)?;
    Ok(IntervalProcedure::from_garwood(GarwoodRule {
        samples,
        delta,
        cache: Mutex::new(HashMap::new()),
    }))
}

#[derive(Debug)]
pub(crate) struct GarwoodRule {
    samples: u64,
    delta: f64,
    cache: Mutex<HashMap<u64, (f64, f64)>>,
}

impl GarwoodRule {
    pub(crate) fn label(&self) -> String {
        format!("garwood(n={}, delta={})", self.samples, self.delta)
    }

    pub(crate) fn bounds(&self, k: u64) -> (f64, f64) {
        if let Some(&b) = self.cache.lock().expect("cache poisoned").get(&k) {
            return b;
        }
        let b = (self.solve(k, true), self.solve(k, false));
        self.cache.lock().expect("cache poisoned").insert(k, b);
        b
    }

    fn solve(&self, k: u64, lower: bool) -> f64 {
        if lower && k == 0 {
            return 0.0;
        }
        let spec = DistributionSpec::Poisson {
            samples: self.samples,
        };
        let half = self.delta / 2.0;
        // Pr{K >= k} increases with lambda, Pr{K <= k} decreases.
        let above = |lambda: f64| {
            if lower {
                let tail = spec
                    .interval_prob(lambda, &KIndexInterval::new(k, None))
                    .expect("lambda stays finite");
                tail >= half
            } else {
                let cdf = spec.cdf(lambda, k as i64).expect("lambda stays finite");
                cdf <= half
            }
        };
        let mut hi = (k as f64 + 1.0) / self.samples as f64;
        while !above(hi) {
            hi *= 2.0;
        }
        bisect(0.0, hi, above)
    }
}
