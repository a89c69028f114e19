//! Exact worst-case coverage of random intervals `(L(K), U(K))` for
//! binomial, Poisson, negative-binomial and hypergeometric `K`.
//!
//! Coverage is only evaluated on a finite critical set: the range endpoints
//! together with the bound values inside the range. [`engine`] computes the
//! minima and infima, [`oracle`] checks them by brute force.

pub mod critical;
pub mod dist;
pub mod engine;
pub mod oracle;
pub mod procedures;

pub use critical::{CriticalPoint, CriticalSet, Provenance};
pub use dist::{DistError, DistributionSpec, Family};
pub use engine::{CoverageReport, EngineError};
pub use procedures::{BoundsMode, Direction, IntervalProcedure, KIndexInterval};

/// A float with 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}
