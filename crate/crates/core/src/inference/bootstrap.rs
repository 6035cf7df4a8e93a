use log::debug;
use rand_distr::{Distribution, StandardNormal};

use crate::adf_stats::{sup_adf_levels, Demeaning};
use crate::rng::stream_rng;
use crate::{Error, Result, TimeSeries};

/// Wild-bootstrap SADF outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    /// SADF of the data (`NaN` when undefined).
    pub observed: f64,
    /// SADF of each bootstrap path (`-inf` where undefined).
    pub bootstrap_draws: Vec<f64>,
    /// `(1 + #{draws >= observed}) / (B + 1)`.
    pub p_value: f64,
    /// The observed statistic was undefined (e.g. a constant series); the
    /// p-value is then 1.
    pub degenerate: bool,
}

impl BootstrapResult {
    pub fn rejects(&self, level: f64) -> bool {
        !self.degenerate && self.p_value <= level
    }
}

fn levels_for(values: &[f64], demeaning: Demeaning) -> Vec<f64> {
    match demeaning {
        Demeaning::Ols => values.to_vec(),
        Demeaning::Gls => values.iter().map(|v| v - values[0]).collect(),
    }
}

/// Wild-bootstrap p-value of the SADF statistic.
///
/// Bootstrap path `b` is `y*_0 = 0`, `y*_t = y*_{t-1} + w_t Δy_t` with
/// `w_t ~ N(0, 1)` drawn from stream `b` of `seed`.
pub fn wild_bootstrap_sadf(
    series: &TimeSeries,
    r0: f64,
    replications: usize,
    seed: u64,
    demeaning: Demeaning,
) -> Result<BootstrapResult> {
    if replications < 99 {
        return Err(Error::InvalidSpec(format!("need at least 99 bootstrap replications, got {replications}")));
    }
    let observed = match sup_adf_levels(&levels_for(series.values(), demeaning), r0, demeaning, 0, false) {
        Ok(res) => res.statistic,
        Err(e) if e.is_degenerate() => {
            debug!("observed SADF undefined ({e}); bootstrap p-value set to 1");
            return Ok(BootstrapResult {
                observed: f64::NAN,
                bootstrap_draws: Vec::new(),
                p_value: 1.0,
                degenerate: true,
            });
        }
        Err(e) => return Err(e),
    };

    let diffs = series.differences();
    let mut path = vec![0.0; diffs.len() + 1];
    let mut draws = Vec::with_capacity(replications);
    for b in 1..=replications as u64 {
        let mut rng = stream_rng(seed, b);
        for (t, d) in diffs.iter().enumerate() {
            let w: f64 = StandardNormal.sample(&mut rng);
            path[t + 1] = path[t] + w * d;
        }
        let stat = sup_adf_levels(&path, r0, demeaning, 0, false).map(|r| r.statistic).unwrap_or(f64::NEG_INFINITY);
        draws.push(stat);
    }
    let exceed = draws.iter().filter(|d| **d >= observed).count();
    Ok(BootstrapResult {
        observed,
        p_value: (1 + exceed) as f64 / (replications + 1) as f64,
        bootstrap_draws: draws,
        degenerate: false,
    })
}
