//! Right-tailed unit-root tests for explosive episodes in time series whose
//! innovation variance changes over the sample.
//!
//! The crate provides the classical sup-ADF statistics (SADF and GSADF, with
//! OLS or GLS demeaning), their time-transformed counterparts (STADF and
//! GSTADF) built from a non-parametrically estimated variance profile, a
//! wild-bootstrap SADF comparator, simulated asymptotic null distributions and
//! a Monte Carlo harness for size and power experiments.
//!
//! The feasible STADF pipeline is:
//!
//! 1. subtract the initial observation from the series,
//! 2. estimate the time-varying AR(1) deviation by kernel local least squares
//!    ([`kernel_regression::fit`]),
//! 3. build the variance profile from the truncated residuals
//!    ([`variance_profile::VarianceProfile::from_fit`]),
//! 4. resample the series on the deformed time scale
//!    ([`variance_profile::transform`]),
//! 5. take the supremum of the transformed ADF statistic
//!    ([`adf_stats::stadf`]).

pub mod adf_stats;
pub mod dgp;
mod error;
pub mod inference;
pub mod kernel_regression;
pub mod montecarlo;
pub mod rng;
mod series;
pub mod variance_profile;

pub use error::{Error, Result};
pub use series::TimeSeries;

/// `floor(frac * n)` with a small guard against representation error, so that
/// e.g. `0.4 * 100` and `0.3 * 10` land on the intended integer.
pub(crate) fn floor_index(frac: f64, n: usize) -> usize {
    let x = frac * n as f64;
    let guarded = (x + 1e-9 * x.abs().max(1.0)).floor();
    if guarded <= 0.0 {
        0
    } else {
        (guarded as usize).min(n)
    }
}

#[cfg(test)]
mod tests {
    use super::floor_index;

    #[test]
    fn floor_index_guards_representation_error() {
        assert_eq!(floor_index(0.4, 100), 40);
        assert_eq!(floor_index(0.6, 100), 60);
        assert_eq!(floor_index(0.3, 10), 3);
        assert_eq!(floor_index(0.7, 10), 7);
        assert_eq!(floor_index(0.999, 10), 9);
        assert_eq!(floor_index(0.0, 10), 0);
        assert_eq!(floor_index(1.0, 10), 10);
    }
}
