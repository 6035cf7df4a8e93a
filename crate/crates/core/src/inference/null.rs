use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::NullCache;
use crate::adf_stats::{sup_adf_levels, sup_tadf_values, Demeaning, TestFamily, TestResult};
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Sup functional whose homoskedastic null distribution is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullFamily {
    SadfGls,
    GsadfGls,
    SadfOls,
    GsadfOls,
}

impl NullFamily {
    pub const ALL: [NullFamily; 4] = [NullFamily::SadfGls, NullFamily::GsadfGls, NullFamily::SadfOls, NullFamily::GsadfOls];

    pub fn code(&self) -> u32 {
        match self {
            NullFamily::SadfGls => 0,
            NullFamily::GsadfGls => 1,
            NullFamily::SadfOls => 2,
            NullFamily::GsadfOls => 3,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.code() == code)
    }

    pub fn name(&self) -> &'static str {
        match self {
            NullFamily::SadfGls => "sadf_gls",
            NullFamily::GsadfGls => "gsadf_gls",
            NullFamily::SadfOls => "sadf_ols",
            NullFamily::GsadfOls => "gsadf_ols",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name.to_ascii_lowercase())
    }

    pub fn is_generalized(&self) -> bool {
        matches!(self, NullFamily::GsadfGls | NullFamily::GsadfOls)
    }

    /// Limit law of a test statistic: the time-transformed statistics share
    /// the homoskedastic GLS limit.
    pub fn for_test(family: TestFamily, demeaning: Demeaning) -> Self {
        match (family, demeaning) {
            (TestFamily::Stadf, _) | (TestFamily::Sadf, Demeaning::Gls) => NullFamily::SadfGls,
            (TestFamily::Gstadf, _) | (TestFamily::Gsadf, Demeaning::Gls) => NullFamily::GsadfGls,
            (TestFamily::Sadf, Demeaning::Ols) => NullFamily::SadfOls,
            (TestFamily::Gsadf, Demeaning::Ols) => NullFamily::GsadfOls,
        }
    }
}

/// Everything that determines a simulated null distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullSpec {
    pub family: NullFamily,
    pub r0: f64,
    /// Brownian discretization `N`.
    pub steps: usize,
    /// Number of simulated suprema `R`.
    pub replications: usize,
    pub seed: u64,
}

impl NullSpec {
    pub fn new(family: NullFamily, r0: f64) -> Self {
        Self { family, r0, steps: 2000, replications: 100_000, seed: 20_240_101 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0 < 1.0) {
            return Err(Error::InvalidSpec(format!("r0 must lie in (0, 1), got {}", self.r0)));
        }
        if self.steps < 20 || self.replications == 0 {
            return Err(Error::InvalidSpec(format!(
                "need at least 20 steps and one replication, got N = {}, R = {}",
                self.steps, self.replications
            )));
        }
        Ok(())
    }
}

/// Sorted simulated draws of a sup functional.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    pub spec: NullSpec,
    draws: Vec<f64>,
}

impl NullDistribution {
    pub fn from_draws(spec: NullSpec, mut draws: Vec<f64>) -> Result<Self> {
        if draws.is_empty() || draws.iter().any(|d| d.is_nan()) {
            return Err(Error::InvalidSpec("null draws must be nonempty and not NaN".into()));
        }
        draws.sort_by(f64::total_cmp);
        Ok(Self { spec, draws })
    }

    pub fn family(&self) -> NullFamily {
        self.spec.family
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    /// Empirical quantile `draws[ceil(q R) - 1]`.
    pub fn quantile(&self, q: f64) -> f64 {
        let r = self.draws.len();
        let k = (q * r as f64).ceil() as usize;
        self.draws[k.clamp(1, r) - 1]
    }

    /// Right-tail critical value at significance `level`.
    pub fn critical_value(&self, level: f64) -> f64 {
        self.quantile(1.0 - level)
    }

    /// `#{draws >= statistic} / R`.
    pub fn p_value(&self, statistic: f64) -> f64 {
        let below = self.draws.partition_point(|d| *d < statistic);
        (self.draws.len() - below) as f64 / self.draws.len() as f64
    }

    pub fn rejects(&self, statistic: f64, level: f64) -> bool {
        statistic > self.critical_value(level)
    }

    /// Fill in the p-value and reject decisions of `result`.
    pub fn annotate(&self, result: &mut TestResult, levels: &[f64]) {
        result.p_value = Some(self.p_value(result.statistic));
        result.decisions = levels.iter().map(|&l| (l, self.rejects(result.statistic, l))).collect();
    }
}

/// `#{draws >= statistic} / R` of `dist`.
pub fn p_value(dist: &NullDistribution, statistic: f64) -> f64 {
    dist.p_value(statistic)
}

fn one_draw(spec: &NullSpec, replication: u64) -> f64 {
    let mut rng = stream_rng(spec.seed, replication);
    let mut walk = Vec::with_capacity(spec.steps + 1);
    let mut level = 0.0;
    walk.push(level);
    for _ in 0..spec.steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        level += z;
        walk.push(level);
    }
    // scale drops out of both functionals, so the 1/sqrt(N) factor is omitted
    let result = match spec.family {
        NullFamily::SadfGls => sup_tadf_values(&walk, 1.0, spec.r0, false),
        NullFamily::GsadfGls => sup_tadf_values(&walk, 1.0, spec.r0, true),
        NullFamily::SadfOls => sup_adf_levels(&walk, spec.r0, Demeaning::Ols, 0, false),
        NullFamily::GsadfOls => sup_adf_levels(&walk, spec.r0, Demeaning::Ols, 0, true),
    };
    result.map(|r| r.statistic).unwrap_or(f64::NEG_INFINITY)
}

/// Simulate `R` suprema of the discretized homoskedastic limit functional.
///
/// GLS families evaluate
/// `(W(r2)^2 - W(r1)^2 - (r2 - r1)) / (2 sqrt(int_{r1}^{r2} W^2))` on an
/// `N`-step Gaussian random walk (left Riemann sums); OLS families run the
/// intercept-augmented sup-ADF on the same walk. Replication `r` draws from
/// stream `r` of `seed`, so results do not depend on thread scheduling.
pub fn simulate_null(spec: &NullSpec) -> Result<NullDistribution> {
    spec.validate()?;
    let draws: Vec<f64> = (0..spec.replications as u64).into_par_iter().map(|r| one_draw(spec, r)).collect();
    NullDistribution::from_draws(*spec, draws)
}

/// Memoized critical values keyed by `(family, r0)`, optionally backed by a
/// disk cache.
#[derive(Debug)]
pub struct CriticalValues {
    pub steps: usize,
    /// Discretization for the generalized families, whose cost grows with
    /// the square of the number of steps.
    pub generalized_steps: usize,
    pub replications: usize,
    pub seed: u64,
    cache: Option<NullCache>,
    force: bool,
    memo: Mutex<HashMap<(NullFamily, u64), Arc<NullDistribution>>>,
}

impl CriticalValues {
    pub fn new(steps: usize, replications: usize, seed: u64) -> Self {
        Self {
            steps,
            generalized_steps: steps,
            replications,
            seed,
            cache: None,
            force: false,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_generalized_steps(mut self, steps: usize) -> Self {
        self.generalized_steps = steps;
        self
    }

    pub fn with_cache(mut self, cache: NullCache, force: bool) -> Self {
        self.cache = Some(cache);
        self.force = force;
        self
    }

    pub fn spec(&self, family: NullFamily, r0: f64) -> NullSpec {
        let steps = if family.is_generalized() { self.generalized_steps } else { self.steps };
        NullSpec { family, r0, steps, replications: self.replications, seed: self.seed }
    }

    pub fn distribution(&self, family: NullFamily, r0: f64) -> Result<Arc<NullDistribution>> {
        let key = (family, r0.to_bits());
        if let Some(dist) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(Arc::clone(dist));
        }
        let spec = self.spec(family, r0);
        let dist = match &self.cache {
            Some(cache) => cache.load_or_simulate(&spec, self.force)?.0,
            None => simulate_null(&spec)?,
        };
        let dist = Arc::new(dist);
        self.memo.lock().expect("memo lock").insert(key, Arc::clone(&dist));
        Ok(dist)
    }
}
