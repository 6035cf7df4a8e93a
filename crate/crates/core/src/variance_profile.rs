//! Estimated variance profile, its generalized inverse and the time-deformed
//! series.
//!
//! The profile is stored at the knots `s = k / T`, `k = 0..=T`, as the
//! normalized cumulative sum of squared (truncated) residuals and is linear
//! between knots. The inverse `g(s) = inf { u : eta(u) >= s }` is evaluated on
//! the same representation.

use crate::dgp::VolatilitySpec;
use crate::kernel_regression::LocalFitResult;
use crate::{Error, Result, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    knots: Vec<f64>,
    omega_bar_sq: f64,
}

impl VarianceProfile {
    /// Profile of the squared `residuals` (one per date `t = 1..=T`).
    pub fn from_residuals(residuals: &[f64]) -> Result<Self> {
        Self::from_squares(residuals.iter().map(|e| e * e).collect())
    }

    /// `eta_hat` and `omega_bar_sq_hat` from the truncated residuals of a local fit.
    pub fn from_fit(fit: &LocalFitResult) -> Result<Self> {
        Self::from_residuals(&fit.truncated_residuals)
    }

    /// Known profile of a deterministic volatility function, discretized as
    /// `sigma_t = omega(t / T)`.
    pub fn from_volatility(vol: &VolatilitySpec, sample_size: usize) -> Result<Self> {
        let sigma = vol.path(sample_size)?;
        Self::from_squares(sigma.iter().map(|s| s * s).collect())
    }

    /// `eta(s) = s` with `omega_bar_sq` supplied.
    pub fn homoskedastic(sample_size: usize, omega_bar_sq: f64) -> Result<Self> {
        if !(omega_bar_sq.is_finite() && omega_bar_sq > 0.0) {
            return Err(Error::InvalidSpec(format!("omega_bar_sq must be positive, got {omega_bar_sq}")));
        }
        Self::from_squares(vec![omega_bar_sq; sample_size])
    }

    fn from_squares(squares: Vec<f64>) -> Result<Self> {
        if squares.is_empty() {
            return Err(Error::TooShort { needed: 2, got: 1 });
        }
        let mut cumulative = Vec::with_capacity(squares.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for sq in &squares {
            acc += sq;
            cumulative.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::DegenerateProfile);
        }
        let knots = cumulative.iter().map(|c| c / acc).collect();
        Ok(Self { knots, omega_bar_sq: acc / squares.len() as f64 })
    }

    /// `T`.
    pub fn sample_size(&self) -> usize {
        self.knots.len() - 1
    }

    /// Average innovation variance `(1/T) sum e_t^2`.
    pub fn omega_bar_sq(&self) -> f64 {
        self.omega_bar_sq
    }

    /// `eta(k / T)` for `k = 0..=T`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// `(k / T, eta(k / T))` pairs.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.sample_size() as f64;
        self.knots.iter().enumerate().map(move |(k, e)| (k as f64 / n, *e))
    }

    /// `eta(s)` by linear interpolation between knots.
    pub fn eta(&self, s: f64) -> f64 {
        let n = self.sample_size();
        let x = s.clamp(0.0, 1.0) * n as f64;
        let k = (x.floor() as usize).min(n);
        if k == n {
            return self.knots[n];
        }
        let frac = x - k as f64;
        self.knots[k] + frac * (self.knots[k + 1] - self.knots[k])
    }

    /// `g(s) = inf { u : eta(u) >= s }`.
    pub fn inverse(&self, s: f64) -> f64 {
        self.inverse_scaled(s) / self.sample_size() as f64
    }

    /// `T g(s)`, the inverse on the observation scale.
    fn inverse_scaled(&self, s: f64) -> f64 {
        let n = self.sample_size();
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            // the first knot at which the profile reaches 1
            let k = self.knots.partition_point(|e| *e < 1.0);
            return self.interpolate_inverse(k.min(n), 1.0);
        }
        let k = self.knots.partition_point(|e| *e < s);
        self.interpolate_inverse(k, s)
    }

    /// Position in knot `k`'s left segment where the profile reaches `s`,
    /// given `eta(k) >= s > eta(k - 1)`.
    fn interpolate_inverse(&self, k: usize, s: f64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let (lo, hi) = (self.knots[k - 1], self.knots[k]);
        let frac = ((s - lo) / (hi - lo)).clamp(0.0, 1.0);
        (k - 1) as f64 + frac
    }

    /// `floor(g(t / T) T)` for `t = 0..=T`.
    pub fn index_map(&self) -> Vec<usize> {
        let n = self.sample_size();
        let mut map: Vec<usize> = (0..=n)
            .map(|t| {
                let x = self.inverse_scaled(t as f64 / n as f64);
                ((x + 1e-9).floor() as usize).min(n)
            })
            .collect();
        map[n] = n;
        map
    }
}

/// Estimate the profile from a local fit (alias of [`VarianceProfile::from_fit`]).
pub fn estimate_profile(fit: &LocalFitResult) -> Result<VarianceProfile> {
    VarianceProfile::from_fit(fit)
}

/// `g(s)` of `profile`.
pub fn inverse_profile(profile: &VarianceProfile, s: f64) -> f64 {
    profile.inverse(s)
}

/// Series resampled on the deformed time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedSeries {
    /// `y_{index_map[t]} - y_0` for `t = 0..=T`.
    pub values: Vec<f64>,
    pub index_map: Vec<usize>,
}

impl TransformedSeries {
    pub fn sample_size(&self) -> usize {
        self.values.len() - 1
    }
}

/// `y~_t = y_{floor(g(t/T) T)} - y_0`.
pub fn transform(series: &TimeSeries, profile: &VarianceProfile) -> Result<TransformedSeries> {
    if series.sample_size() != profile.sample_size() {
        return Err(Error::LengthMismatch { profile: profile.sample_size(), series: series.sample_size() });
    }
    let y = series.values();
    let index_map = profile.index_map();
    let values = index_map.iter().map(|&i| y[i] - y[0]).collect();
    Ok(TransformedSeries { values, index_map })
}
