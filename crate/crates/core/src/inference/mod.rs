//! Null distributions, p-values and the wild-bootstrap comparator.

mod bootstrap;
mod cache;
mod null;

pub use bootstrap::{wild_bootstrap_sadf, BootstrapResult};
pub use cache::{NullCache, CACHE_DIR_ENV};
pub use null::{p_value, simulate_null, CriticalValues, NullDistribution, NullFamily, NullSpec};
