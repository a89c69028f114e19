//! Exact checks of the hypergeometric identities and inequalities behind
//! the integer-parameter reduction.
//!
//! All probabilities for one `(N, n)` share the denominator `C(N, n)`, so
//! every statement is checked on integer numerators.

use super::{is_unimodal_exact, FailingCase, OracleVerdict};
use crate::dist::exact::{ExactInt, HyperExact, I128_MAX_POPULATION, MAX_EXACT_POPULATION};
use crate::engine::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weight {
    Correct,
    /// `C(M, k) C(N - M - 1, n - k)`: the lower index of the second
    /// coefficient is off by one.
    Faulty,
}

/// Runs every check for population `N` and `n` draws.
pub fn check_appendix_b(population: u64, draws: u64) -> Result<OracleVerdict, EngineError> {
    run(population, draws, Weight::Correct)
}

/// Same suite with a deliberately wrong `T`; must fail.
pub fn check_appendix_b_faulty(population: u64, draws: u64) -> Result<OracleVerdict, EngineError> {
    run(population, draws, Weight::Faulty)
}

fn run(population: u64, draws: u64, weight: Weight) -> Result<OracleVerdict, EngineError> {
    if draws == 0 || draws > population {
        return Err(EngineError::Range(format!(
            "need 0 < n <= N, got N={population}, n={draws}"
        )));
    }
    if population > MAX_EXACT_POPULATION {
        return Err(EngineError::Range(format!(
            "exact suite is limited to N <= {MAX_EXACT_POPULATION}"
        )));
    }
    Ok(if population <= I128_MAX_POPULATION {
        Suite::<i128>::new(population, draws, weight).run()
    } else {
        Suite::<num_bigint::BigInt>::new(population, draws, weight).run()
    })
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

struct Suite<T> {
    big: i64,
    n: i64,
    h: HyperExact<T>,
    /// `cdf[M][k + 1]` for `k = -1..=n`
    cdf: Vec<Vec<T>>,
    /// `t[M][k + 2]` for `k = -2..=n + 1` and `M < N`
    t: Vec<Vec<T>>,
    verdict: OracleVerdict,
}

impl<T: ExactInt> Suite<T> {
    fn new(population: u64, draws: u64, weight: Weight) -> Self {
        let h = HyperExact::<T>::new(population, draws);
        let (big, n) = (population as i64, draws as i64);
        let cdf = (0..=population).map(|m| h.cdf_nums(m)).collect();
        let t = (0..population)
            .map(|m| {
                (-2..=n + 1)
                    .map(|k| match weight {
                        Weight::Correct => h.t_num(k, m),
                        Weight::Faulty => h
                            .binom(m as i64, k)
                            .times(&h.binom(big - m as i64 - 1, n - k)),
                    })
                    .collect()
            })
            .collect();
        Self {
            big,
            n,
            h,
            cdf,
            t,
            verdict: OracleVerdict::new(),
        }
    }

    fn cdf(&self, m: i64, k: i64) -> T {
        if k < 0 {
            T::zero()
        } else {
            self.cdf[m as usize][(k.min(self.n) + 1) as usize].clone()
        }
    }

    /// Numerator of `Pr{k <= K <= l | M}`.
    fn prob(&self, m: i64, k: i64, l: i64) -> T {
        if k > l {
            return T::zero();
        }
        self.cdf(m, l).minus(&self.cdf(m, k - 1))
    }

    /// Numerator of `T(k, M, N, n)` for `0 <= M < N`.
    fn t(&self, k: i64, m: i64) -> T {
        if k < -2 || k > self.n + 1 {
            return T::zero();
        }
        self.t[m as usize][(k + 2) as usize].clone()
    }

    fn ratio(&self, num: &T) -> String {
        format!("{}/{}", num, self.h.denominator())
    }

    fn distance(&self, x: &T, y: &T) -> f64 {
        let d = if x > y { x.minus(y) } else { y.minus(x) };
        d.to_f64() / self.h.denominator().to_f64()
    }

    fn expect_eq(&mut self, what: impl FnOnce() -> String, expected: T, got: T) {
        if expected == got {
            self.verdict.pass();
        } else {
            let d = self.distance(&expected, &got);
            let case = FailingCase {
                input: what(),
                expected: self.ratio(&expected),
                got: self.ratio(&got),
            };
            self.verdict.fail(case, d);
        }
    }

    /// Checks `small <= large`.
    fn expect_le(&mut self, what: impl FnOnce() -> String, small: T, large: T) {
        if small <= large {
            self.verdict.pass();
        } else {
            let d = self.distance(&small, &large);
            let case = FailingCase {
                input: what(),
                expected: format!("<= {}", self.ratio(&large)),
                got: self.ratio(&small),
            };
            self.verdict.fail(case, d);
        }
    }

    fn expect(&mut self, what: impl FnOnce() -> String, ok: bool) {
        if ok {
            self.verdict.pass();
        } else {
            let case = FailingCase {
                input: what(),
                expected: "true".into(),
                got: "false".into(),
            };
            self.verdict.fail(case, 1.0);
        }
    }

    fn run(mut self) -> OracleVerdict {
        self.cdf_drop();
        self.interval_difference();
        if self.n >= 2 {
            self.floor_bounds();
        } else {
            self.verdict
                .skipped
                .push(format!("floor bounds need n >= 2 (N={}, n=1)", self.big));
        }
        self.weight_monotonicity();
        self.unimodality();
        self.shift_inequalities();
        self.verdict
    }

    /// `Pr{K <= k | M} - Pr{K <= k | M + 1} = T(k, M, N, n)`.
    fn cdf_drop(&mut self) {
        let (big, n) = (self.big, self.n);
        for m in 0..big {
            for k in -2..=n + 1 {
                let drop = self.cdf(m, k).minus(&self.cdf(m + 1, k));
                let t = self.t(k, m);
                self.expect_eq(|| format!("cdf drop N={big} n={n} M={m} k={k}"), t, drop);
            }
        }
    }

    /// `Pr{k <= K <= l | M} - Pr{k <= K <= l | M - 1}
    ///  = T(k - 1, M - 1, N, n) - T(l, M - 1, N, n)`.
    fn interval_difference(&mut self) {
        let (big, n) = (self.big, self.n);
        for m in 1..=big {
            for k in -1..=n + 1 {
                for l in k..=n + 1 {
                    let lhs = self.prob(m, k, l).plus(&self.t(l, m - 1));
                    let rhs = self.prob(m - 1, k, l).plus(&self.t(k - 1, m - 1));
                    self.expect_eq(
                        || format!("interval difference N={big} n={n} M={m} k={k} l={l}"),
                        rhs,
                        lhs,
                    );
                }
            }
        }
    }

    /// `floor(nM / (N + 1)) >= l` once `M >= 1 + floor(N l / (n - 1))`, and
    /// `floor(nM / (N + 1)) <= k - 1` while `M <= 1 + floor(N (k - 1) / (n - 1))`.
    fn floor_bounds(&mut self) {
        let (big, n) = (self.big, self.n);
        for m in 0..=big {
            let f = floor_div(n * m, big + 1);
            for l in 0..=n {
                if m >= 1 + floor_div(big * l, n - 1) {
                    self.expect(|| format!("floor bound N={big} n={n} M={m} l={l}"), f >= l);
                }
            }
            for k in -1..n {
                if m <= 1 + floor_div(big * (k - 1), n - 1) {
                    self.expect(|| format!("floor bound N={big} n={n} M={m} k={k}"), f <= k - 1);
                }
            }
        }
    }

    /// `T` rises in `r` up to `floor(nM / (N + 1))` and falls after it; in
    /// `M` it rises up to `1 + floor(N r / (n - 1))` and falls after it.
    fn weight_monotonicity(&mut self) {
        let (big, n) = (self.big, self.n);
        for m in 1..=big {
            let f = floor_div(n * m, big + 1);
            for r in 1..=f.min(n) {
                let (lo, hi) = (self.t(r - 1, m - 1), self.t(r, m - 1));
                self.expect_le(|| format!("T rising in r N={big} n={n} M={m} r={r}"), lo, hi);
            }
            for r in f.max(0)..n {
                let (lo, hi) = (self.t(r + 1, m - 1), self.t(r, m - 1));
                self.expect_le(|| format!("T falling in r N={big} n={n} M={m} r={r}"), lo, hi);
            }
        }
        if n < 2 {
            self.verdict
                .skipped
                .push(format!("T monotonicity in M needs n >= 2 (N={big}, n=1)"));
            return;
        }
        for r in 0..=n {
            let peak = 1 + floor_div(big * r, n - 1);
            for m in 2..=big.min(peak) {
                let (lo, hi) = (self.t(r, m - 2), self.t(r, m - 1));
                self.expect_le(|| format!("T rising in M N={big} n={n} M={m} r={r}"), lo, hi);
            }
            for m in peak.max(1)..big {
                let (lo, hi) = (self.t(r, m), self.t(r, m - 1));
                self.expect_le(|| format!("T falling in M N={big} n={n} M={m} r={r}"), lo, hi);
            }
        }
    }

    /// `M -> Pr{k <= K <= l | M}` is unimodal on `0..=N`.
    fn unimodality(&mut self) {
        let (big, n) = (self.big, self.n);
        for k in -1..=n + 1 {
            for l in k..=n + 1 {
                let seq: Vec<T> = (0..=big).map(|m| self.prob(m, k, l)).collect();
                let ok = is_unimodal_exact(&seq);
                self.expect(|| format!("unimodal in M N={big} n={n} k={k} l={l}"), ok);
            }
        }
    }

    /// `Pr{g <= K <= h + 1 | M + 1} >= Pr{g <= K <= h | M}` and
    /// `Pr{g - 1 <= K <= h | M - 1} >= Pr{g <= K <= h | M}`.
    fn shift_inequalities(&mut self) {
        let (big, n) = (self.big, self.n);
        for m in 0..=big {
            for g in -1..=n + 1 {
                for h in -1..=n + 1 {
                    let base = self.prob(m, g, h);
                    if m < big {
                        let up = self.prob(m + 1, g, h + 1);
                        self.expect_le(
                            || format!("upward shift N={big} n={n} M={m} g={g} h={h}"),
                            base.clone(),
                            up,
                        );
                    }
                    if m > 0 {
                        let down = self.prob(m - 1, g - 1, h);
                        self.expect_le(
                            || format!("downward shift N={big} n={n} M={m} g={g} h={h}"),
                            base,
                            down,
                        );
                    }
                }
            }
        }
    }
}
