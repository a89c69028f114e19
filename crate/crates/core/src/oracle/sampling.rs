//! Seeded random monotone procedures for engine-versus-oracle runs.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dist::DistributionSpec;
use crate::procedures::{Direction, IntervalProcedure, TailLimits};

/// Last tabulated `k` for the unbounded families.
pub const TABLE_LAST_K: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseFamily {
    Binomial,
    Poisson,
    NegBinomial,
    Geometric,
}

impl CaseFamily {
    pub const ALL: [CaseFamily; 4] = [
        CaseFamily::Binomial,
        CaseFamily::Poisson,
        CaseFamily::NegBinomial,
        CaseFamily::Geometric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseFamily::Binomial => "binomial",
            CaseFamily::Poisson => "poisson",
            CaseFamily::NegBinomial => "negbinomial",
            CaseFamily::Geometric => "geometric",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomCase {
    pub spec: DistributionSpec,
    pub procedure: IntervalProcedure,
    pub a: f64,
    pub b: f64,
    pub label: String,
}

/// `len` draws from `[lo, hi)`, sorted; with `ties` they are snapped to a
/// grid of 64 cells so equal bound values occur.
fn sorted_draws(rng: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64, ties: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| {
            let x: f64 = rng.gen_range(lo..hi);
            if ties {
                lo + ((x - lo) / (hi - lo) * 64.0).floor() / 64.0 * (hi - lo)
            } else {
                x
            }
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Nondecreasing `L <= U` on `len` entries in `[lo, hi)`, reversed when the
/// direction is nonincreasing.
fn bound_tables(
    rng: &mut ChaCha8Rng,
    len: usize,
    lo: f64,
    hi: f64,
    direction: Direction,
) -> (Vec<f64>, Vec<f64>) {
    let ties = rng.gen_bool(0.5);
    let mut lower = sorted_draws(rng, len, lo, hi, ties);
    let mut upper = sorted_draws(rng, len, lo, hi, ties);
    for (u, l) in upper.iter_mut().zip(&lower) {
        *u = u.max(*l);
    }
    if direction == Direction::NonIncreasing {
        lower.reverse();
        upper.reverse();
    }
    (lower, upper)
}

fn direction(rng: &mut ChaCha8Rng) -> Direction {
    if rng.gen_bool(0.5) {
        Direction::NonDecreasing
    } else {
        Direction::NonIncreasing
    }
}

/// `a < b` inside `[lo, hi]`, sometimes placed on bound values.
fn range(rng: &mut ChaCha8Rng, lo: f64, hi: f64, values: &[f64]) -> (f64, f64) {
    let inside: Vec<f64> = values.iter().copied().filter(|v| lo <= *v && *v <= hi).collect();
    loop {
        let mut pick = || {
            if !inside.is_empty() && rng.gen_bool(0.25) {
                *inside.choose(rng).unwrap()
            } else {
                rng.gen_range(lo..=hi)
            }
        };
        let (x, y) = (pick(), pick());
        if x != y {
            return (x.min(y), x.max(y));
        }
    }
}

pub fn random_case(family: CaseFamily, rng: &mut ChaCha8Rng) -> RandomCase {
    let dir = direction(rng);
    match family {
        CaseFamily::Binomial => {
            let n = rng.gen_range(1..=30u64);
            let (lower, upper) = bound_tables(rng, n as usize + 1, 0.0, 1.0, dir);
            let (a, b) = if rng.gen_bool(0.15) {
                (0.0, 1.0)
            } else {
                let all: Vec<f64> = lower.iter().chain(&upper).copied().collect();
                range(rng, 0.0, 1.0, &all)
            };
            RandomCase {
                spec: DistributionSpec::Binomial { trials: n },
                procedure: IntervalProcedure::from_table(lower, upper, dir)
                    .expect("generated tables are valid"),
                a,
                b,
                label: format!("binomial n={n} {dir}"),
            }
        }
        CaseFamily::Poisson => {
            let samples = rng.gen_range(1..=4u64);
            let top = 40.0 / samples as f64;
            unbounded_case(
                rng,
                DistributionSpec::Poisson { samples },
                dir,
                (0.0, top),
                format!("poisson n={samples}"),
            )
        }
        CaseFamily::NegBinomial | CaseFamily::Geometric => {
            let shape = if family == CaseFamily::Geometric {
                1.0
            } else {
                *[0.5, 1.5, 2.0, 3.0, 4.5].choose(rng).unwrap()
            };
            unbounded_case(
                rng,
                DistributionSpec::NegBinomial { shape },
                dir,
                (0.02, 0.98),
                format!("negbinomial r={shape}"),
            )
        }
    }
}

/// Tables for `k = 0..=TABLE_LAST_K` with either constant tails or tails
/// running off to infinity past a range that stays clear of them.
fn unbounded_case(
    rng: &mut ChaCha8Rng,
    spec: DistributionSpec,
    dir: Direction,
    (lo, hi): (f64, f64),
    name: String,
) -> RandomCase {
    let (lower, upper) = bound_tables(rng, TABLE_LAST_K + 1, lo, hi, dir);
    let (l_last, u_last) = (lower[TABLE_LAST_K], upper[TABLE_LAST_K]);
    let all: Vec<f64> = lower.iter().chain(&upper).copied().collect();
    // Escaping tails cross the range unless it stays on the inner side of
    // the last entries.
    let (clear_lo, clear_hi) = match dir {
        Direction::NonDecreasing => (lo, l_last),
        Direction::NonIncreasing => (u_last, hi),
    };
    let escaping = rng.gen_bool(0.5) && clear_hi - clear_lo > 0.05 * (hi - lo);
    let (tail, (a, b), kind) = if escaping {
        let inf = match dir {
            Direction::NonDecreasing => f64::INFINITY,
            Direction::NonIncreasing => f64::NEG_INFINITY,
        };
        let eps = 1e-6 * (hi - lo);
        let (a, b) = range(rng, clear_lo + eps, clear_hi - eps, &all);
        (TailLimits { lower: inf, upper: inf }, (a, b), "escaping")
    } else {
        (
            TailLimits {
                lower: l_last,
                upper: u_last,
            },
            range(rng, lo, hi, &all),
            "constant",
        )
    };
    RandomCase {
        spec,
        procedure: IntervalProcedure::from_table_with_tail(lower, upper, tail, dir)
            .expect("generated tables are valid"),
        a,
        b,
        label: format!("{name} {dir} {kind} tail"),
    }
}

/// A nondecreasing integer procedure on a population of `population` with a
/// random number of draws, and an integer range `a < b`.
pub fn random_hypergeom_case(population: u64, rng: &mut ChaCha8Rng) -> RandomCase {
    let draws = rng.gen_range(1..=population);
    let len = draws as usize + 1;
    let draw_sorted = |rng: &mut ChaCha8Rng| {
        let mut v: Vec<f64> = (0..len)
            .map(|_| rng.gen_range(0..=population) as f64)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let lower = draw_sorted(rng);
    let mut upper = draw_sorted(rng);
    for (u, l) in upper.iter_mut().zip(&lower) {
        *u = u.max(*l);
    }
    let (a, b) = if rng.gen_bool(0.3) {
        (0, population)
    } else {
        loop {
            let x = rng.gen_range(0..=population);
            let y = rng.gen_range(0..=population);
            if x != y {
                break (x.min(y), x.max(y));
            }
        }
    };
    RandomCase {
        spec: DistributionSpec::Hypergeometric { population, draws },
        procedure: IntervalProcedure::from_table(lower, upper, Direction::NonDecreasing)
            .expect("generated tables are valid"),
        a: a as f64,
        b: b as f64,
        label: format!("hypergeometric N={population} n={draws}"),
    }
}
