//! Bubble data-generating process with deterministic volatility.
//!
//! `y_t = mu + u_t` where `u_t` is a unit-root process except on
//! `(floor(tau1 T), floor(tau2 T)]` (AR coefficient `1 + delta1`) and
//! `(floor(tau2 T), floor(tau3 T)]` (coefficient `1 - delta2`). Innovations are
//! `sigma_t e_t` with `sigma_t = omega(t / T)` and `u_0 = e_0`.

use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::rng::{stream_rng, Rng};
use crate::{floor_index, Error, Result, TimeSeries};

/// Explosive regime followed by an optional collapse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleSpec {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub delta1: f64,
    #[serde(default)]
    pub delta2: f64,
    #[serde(default)]
    pub mu: f64,
}

impl BubbleSpec {
    /// No bubble: a pure (possibly heteroskedastic) random walk.
    pub fn null() -> Self {
        Self { tau1: 1.0, tau2: 1.0, tau3: 1.0, delta1: 0.0, delta2: 0.0, mu: 0.0 }
    }

    /// Non-collapsing bubble on `(floor(tau1 T), floor(tau2 T)]`.
    pub fn explosive(delta1: f64, tau1: f64, tau2: f64) -> Self {
        Self { tau1, tau2, tau3: tau2, delta1, delta2: 0.0, mu: 0.0 }
    }

    pub fn is_null(&self) -> bool {
        self.delta1 == 0.0 && self.delta2 == 0.0
    }

    /// `1 + delta1`.
    pub fn explosive_root(&self) -> f64 {
        1.0 + self.delta1
    }

    /// `1 - delta2`.
    pub fn collapse_root(&self) -> f64 {
        1.0 - self.delta2
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.tau1, self.tau2, self.tau3, self.delta1, self.delta2, self.mu];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("bubble parameters must be finite".into()));
        }
        if self.delta1 < 0.0 || self.delta2 < 0.0 {
            return Err(Error::InvalidSpec("delta1 and delta2 must be nonnegative".into()));
        }
        for tau in [self.tau1, self.tau2, self.tau3] {
            if !(0.0..=1.0).contains(&tau) {
                return Err(Error::InvalidSpec(format!("bubble date {tau} outside [0, 1]")));
            }
        }
        if self.delta1 > 0.0 && !(self.tau1 < self.tau2 && self.tau2 <= self.tau3) {
            return Err(Error::InvalidSpec(format!(
                "bubble dates must satisfy tau1 < tau2 <= tau3, got ({}, {}, {})",
                self.tau1, self.tau2, self.tau3
            )));
        }
        if self.delta2 > 0.0 && self.tau2 > self.tau3 {
            return Err(Error::InvalidSpec("collapse must satisfy tau2 <= tau3".into()));
        }
        Ok(())
    }

    /// AR coefficient applied at observation `t` (1-based) of a length-`T` path.
    pub fn ar_coefficient(&self, t: usize, length: usize) -> f64 {
        let t1 = floor_index(self.tau1, length);
        let t2 = floor_index(self.tau2, length);
        let t3 = floor_index(self.tau3, length);
        if t > t1 && t <= t2 {
            self.explosive_root()
        } else if t > t2 && t <= t3 {
            self.collapse_root()
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolatilityKind {
    Constant,
    /// `sigma0 + (sigma1 - sigma0) 1(s > tau_sigma)`
    SingleShift,
    /// `sigma0 + (sigma1 - sigma0) 1(0.4 < s <= 0.6)`
    DoubleShift,
    /// `sigma0 + (sigma1 - sigma0) / (1 + exp(-50 (s - 0.5)))`
    LogisticTransition,
    /// `sigma0 + (sigma1 - sigma0) s`
    Trending,
}

impl VolatilityKind {
    pub fn name(&self) -> &'static str {
        match self {
            VolatilityKind::Constant => "constant",
            VolatilityKind::SingleShift => "single_shift",
            VolatilityKind::DoubleShift => "double_shift",
            VolatilityKind::LogisticTransition => "logistic_transition",
            VolatilityKind::Trending => "trending",
        }
    }
}

/// Deterministic volatility function `omega(s)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolatilitySpec {
    pub kind: VolatilityKind,
    #[serde(default = "one")]
    pub sigma0: f64,
    #[serde(default = "one")]
    pub sigma1: f64,
    #[serde(default = "half")]
    pub tau_sigma: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl VolatilitySpec {
    pub fn constant(sigma0: f64) -> Self {
        Self { kind: VolatilityKind::Constant, sigma0, sigma1: sigma0, tau_sigma: 0.5 }
    }

    pub fn single_shift(sigma0: f64, sigma1: f64, tau_sigma: f64) -> Self {
        Self { kind: VolatilityKind::SingleShift, sigma0, sigma1, tau_sigma }
    }

    pub fn double_shift(sigma0: f64, sigma1: f64) -> Self {
        Self { kind: VolatilityKind::DoubleShift, sigma0, sigma1, tau_sigma: 0.5 }
    }

    pub fn logistic(sigma0: f64, sigma1: f64) -> Self {
        Self { kind: VolatilityKind::LogisticTransition, sigma0, sigma1, tau_sigma: 0.5 }
    }

    pub fn trending(sigma0: f64, sigma1: f64) -> Self {
        Self { kind: VolatilityKind::Trending, sigma0, sigma1, tau_sigma: 0.5 }
    }

    /// `sigma1 / sigma0` (1 for constant volatility).
    pub fn ratio(&self) -> f64 {
        match self.kind {
            VolatilityKind::Constant => 1.0,
            _ => self.sigma1 / self.sigma0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
            return Err(Error::InvalidSpec(format!("sigma0 must be positive, got {}", self.sigma0)));
        }
        if self.kind != VolatilityKind::Constant && !(self.sigma1.is_finite() && self.sigma1 > 0.0) {
            return Err(Error::InvalidSpec(format!("sigma1 must be positive, got {}", self.sigma1)));
        }
        if !(0.0..=1.0).contains(&self.tau_sigma) {
            return Err(Error::InvalidSpec(format!(
                "tau_sigma must lie in [0, 1], got {}",
                self.tau_sigma
            )));
        }
        Ok(())
    }

    /// `omega(s)`.
    pub fn at(&self, s: f64) -> Result<f64> {
        self.validate()?;
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidSpec(format!("volatility evaluated at s = {s} outside [0, 1]")));
        }
        Ok(self.eval(s))
    }

    fn eval(&self, s: f64) -> f64 {
        let (s0, s1) = (self.sigma0, self.sigma1);
        let weight = match self.kind {
            VolatilityKind::Constant => return s0,
            VolatilityKind::SingleShift => indicator(s > self.tau_sigma),
            VolatilityKind::DoubleShift => indicator(0.4 < s && s <= 0.6),
            VolatilityKind::LogisticTransition => 1.0 / (1.0 + (-50.0 * (s - 0.5)).exp()),
            VolatilityKind::Trending => s,
        };
        s0 + (s1 - s0) * weight
    }

    /// `sigma_t = omega(t / T)` for `t = 1..=T`.
    pub fn path(&self, length: usize) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((1..=length).map(|t| self.eval(t as f64 / length as f64)).collect())
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `omega(s)` for `vol`.
pub fn volatility_at(vol: &VolatilitySpec, s: f64) -> Result<f64> {
    vol.at(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpSpec {
    pub bubble: BubbleSpec,
    pub vol: VolatilitySpec,
    pub length: usize,
    pub seed: u64,
}

impl DgpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidSpec("length must be positive".into()));
        }
        self.bubble.validate()?;
        self.vol.validate()
    }
}

/// Source of the standardized shocks `e_t`.
pub trait InnovationSampler {
    fn sample(&self, rng: &mut Rng) -> f64;
}

/// i.i.d. N(0, 1) shocks.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianInnovations;

impl InnovationSampler for GaussianInnovations {
    fn sample(&self, rng: &mut Rng) -> f64 {
        rand_distr::StandardNormal.sample(rng)
    }
}

/// A simulated path together with the shocks that produced it.
#[derive(Debug, Clone)]
pub struct SimulatedPath {
    pub series: TimeSeries,
    /// `u_0 = e_0`.
    pub initial_shock: f64,
    /// `epsilon_t = sigma_t e_t` for `t = 1..=T`.
    pub innovations: Vec<f64>,
}

/// Simulate `y_0..=y_T` with Gaussian shocks from stream 0 of `spec.seed`.
pub fn simulate(spec: &DgpSpec) -> Result<TimeSeries> {
    Ok(simulate_with(spec, &GaussianInnovations)?.series)
}

pub fn simulate_with(spec: &DgpSpec, sampler: &impl InnovationSampler) -> Result<SimulatedPath> {
    spec.validate()?;
    let length = spec.length;
    let sigma = spec.vol.path(length)?;
    let mut rng = stream_rng(spec.seed, 0);

    let initial_shock = sampler.sample(&mut rng);
    let mut values = Vec::with_capacity(length + 1);
    let mut innovations = Vec::with_capacity(length);
    let mut u = initial_shock;
    values.push(spec.bubble.mu + u);
    for t in 1..=length {
        let eps = sigma[t - 1] * sampler.sample(&mut rng);
        u = spec.bubble.ar_coefficient(t, length) * u + eps;
        innovations.push(eps);
        values.push(spec.bubble.mu + u);
    }
    Ok(SimulatedPath { series: TimeSeries::new(values)?, initial_shock, innovations })
}
