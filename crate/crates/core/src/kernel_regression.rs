//! Kernel local least squares for the time-varying AR(1) deviation.
//!
//! For the demeaned levels `x_0..=x_T` (in practice `y_t - y_0`), the local
//! estimate at `t` is
//!
//! ```text
//! delta_t = sum_i G_h((i - t) / T) x_{i-1} (x_i - x_{i-1}) / sum_i G_h((i - t) / T) x_{i-1}^2
//! ```
//!
//! with `G_h(u) = G(u / h) / h` and the sums running over `i = 1..=T`. Its
//! residuals, truncated at `psi_T`, feed the variance-profile estimator.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::{floor_index, Error, Result, TimeSeries};

/// Kernel `G` supported on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `1(-1 <= u <= 1)`
    #[default]
    Uniform,
    /// `(2 pi)^(-1/2) exp(-u^2 / 2) 1(-1 <= u <= 1)`, left unnormalized.
    TruncatedGaussian,
}

impl KernelKind {
    pub fn weight(&self, u: f64) -> f64 {
        if !(-1.0..=1.0).contains(&u) {
            return 0.0;
        }
        match self {
            KernelKind::Uniform => 1.0,
            KernelKind::TruncatedGaussian => (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt(),
        }
    }
}

/// Largest `|i - t|` inside the kernel window for bandwidth `h`.
fn half_width(h: f64, sample_size: usize) -> usize {
    let m = h * sample_size as f64;
    ((m * (1.0 + 1e-12)).floor() as usize).min(sample_size)
}

/// Kernel-weighted cross products for every `t = 1..=T` (index `t - 1`).
struct LocalSums {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
    /// `G_h(0)`, the weight an observation gives itself.
    self_weight: f64,
}

fn local_sums(levels: &[f64], kernel: KernelKind, h: f64) -> LocalSums {
    let n = levels.len() - 1;
    let m = half_width(h, n);
    let lag = |i: usize| levels[i - 1];
    let diff = |i: usize| levels[i] - levels[i - 1];
    let mut numerator = vec![0.0; n];
    let mut denominator = vec![0.0; n];

    match kernel {
        KernelKind::Uniform => {
            // window sums from prefix sums; the weight 1/h is constant
            let mut cross = vec![0.0; n + 1];
            let mut square = vec![0.0; n + 1];
            for i in 1..=n {
                cross[i] = cross[i - 1] + lag(i) * diff(i);
                square[i] = square[i - 1] + lag(i) * lag(i);
            }
            for t in 1..=n {
                let lo = t.saturating_sub(m).max(1);
                let hi = (t + m).min(n);
                numerator[t - 1] = (cross[hi] - cross[lo - 1]) / h;
                denominator[t - 1] = (square[hi] - square[lo - 1]) / h;
            }
        }
        KernelKind::TruncatedGaussian => {
            let scale = h * n as f64;
            for t in 1..=n {
                let lo = t.saturating_sub(m).max(1);
                let hi = (t + m).min(n);
                let (mut num, mut den) = (0.0, 0.0);
                for i in lo..=hi {
                    let w = kernel.weight((i as f64 - t as f64) / scale) / h;
                    num += w * lag(i) * diff(i);
                    den += w * lag(i) * lag(i);
                }
                numerator[t - 1] = num;
                denominator[t - 1] = den;
            }
        }
    }

    LocalSums { numerator, denominator, self_weight: kernel.weight(0.0) / h }
}

/// Local estimates `delta_1..=delta_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDelta {
    pub delta_hat: Vec<f64>,
    /// Dates `t` whose window has no nonzero lagged level; their estimate is 0.
    pub degenerate: Vec<usize>,
}

fn check_bandwidth(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidSpec(format!("bandwidth must be positive, got {h}")));
    }
    Ok(())
}

/// Local least-squares estimate of `delta_t` on already demeaned levels.
///
/// `levels[0]` is the initial value (zero after GLS demeaning); the
/// regression at `t` uses the pairs `(levels[i-1], levels[i] - levels[i-1])`.
pub fn local_delta(levels: &[f64], kernel: KernelKind, h: f64) -> Result<LocalDelta> {
    check_bandwidth(h)?;
    if levels.len() < 4 {
        return Err(Error::TooShort { needed: 4, got: levels.len() });
    }
    let sums = local_sums(levels, kernel, h);
    let mut degenerate = Vec::new();
    let delta_hat = sums
        .numerator
        .iter()
        .zip(&sums.denominator)
        .enumerate()
        .map(|(k, (num, den))| {
            if *den > 0.0 {
                num / den
            } else {
                degenerate.push(k + 1);
                0.0
            }
        })
        .collect();
    Ok(LocalDelta { delta_hat, degenerate })
}

/// Log-spaced bandwidth candidates `T^lower ..= T^upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthGrid {
    pub lower_exponent: f64,
    pub upper_exponent: f64,
    pub points: usize,
}

impl Default for BandwidthGrid {
    fn default() -> Self {
        Self { lower_exponent: -0.5, upper_exponent: -0.3, points: 15 }
    }
}

impl BandwidthGrid {
    pub fn with_points(points: usize) -> Self {
        Self { points, ..Self::default() }
    }

    pub fn candidates(&self, sample_size: usize) -> Vec<f64> {
        let n = sample_size as f64;
        let lo = self.lower_exponent * n.ln();
        let hi = self.upper_exponent * n.ln();
        if self.points <= 1 {
            return vec![lo.exp()];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|j| match j {
                0 => n.powf(self.lower_exponent),
                j if j == self.points - 1 => n.powf(self.upper_exponent),
                j => (lo + (hi - lo) * j as f64 / last).exp(),
            })
            .collect()
    }
}

/// Outcome of leave-one-out bandwidth selection.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthChoice {
    pub bandwidth: f64,
    pub candidates: Vec<f64>,
    /// Leave-one-out criterion per candidate (`NaN` for degenerate candidates).
    pub criteria: Vec<f64>,
    /// Every candidate was degenerate and the largest one was returned.
    pub fallback: bool,
}

/// Leave-one-out prediction error `sum_t (dx_t - delta_t^(-t) x_{t-1})^2`.
///
/// Returns `None` when some window has no nonzero lagged level.
pub fn cv_criterion(levels: &[f64], kernel: KernelKind, h: f64) -> Option<f64> {
    let sums = local_sums(levels, kernel, h);
    let mut total = 0.0;
    for t in 1..levels.len() {
        let den = sums.denominator[t - 1];
        if den <= 0.0 {
            return None;
        }
        let x = levels[t - 1];
        let d = levels[t] - levels[t - 1];
        let loo_den = den - sums.self_weight * x * x;
        let delta = if loo_den > den * 1e-12 {
            (sums.numerator[t - 1] - sums.self_weight * x * d) / loo_den
        } else {
            0.0
        };
        let e = d - delta * x;
        total += e * e;
    }
    Some(total)
}

/// Leave-one-out cross-validated bandwidth over `grid`.
///
/// Ties (within `1e-12` of the total sum of squared differences) go to the
/// smallest bandwidth.
pub fn select_bandwidth(levels: &[f64], kernel: KernelKind, grid: &BandwidthGrid) -> Result<BandwidthChoice> {
    if levels.len() < 11 {
        return Err(Error::TooShort { needed: 11, got: levels.len() });
    }
    if grid.points == 0 {
        return Err(Error::InvalidSpec("bandwidth grid needs at least one point".into()));
    }
    let candidates = grid.candidates(levels.len() - 1);
    let criteria: Vec<f64> = candidates
        .iter()
        .map(|&h| cv_criterion(levels, kernel, h).unwrap_or(f64::NAN))
        .collect();

    let best = criteria.iter().copied().filter(|c| c.is_finite()).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        let bandwidth = *candidates.last().expect("nonempty grid");
        warn!("every bandwidth candidate is degenerate; using h = {bandwidth}");
        return Ok(BandwidthChoice { bandwidth, candidates, criteria, fallback: true });
    }
    let scale: f64 = levels.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    let tolerance = best * 1e-10 + scale * 1e-12;
    let index = criteria
        .iter()
        .position(|c| c.is_finite() && *c <= best + tolerance)
        .expect("minimum is attained");
    Ok(BandwidthChoice { bandwidth: candidates[index], candidates, criteria, fallback: false })
}

/// Truncation level `psi_T = sigma_bar * T^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub psi: f64,
    /// Largest rolling standard deviation of the untruncated residuals.
    pub sigma_bar: f64,
    /// `T < 20`: the whole-sample standard deviation was used.
    pub single_window: bool,
}

fn sample_sd(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (x.len() - 1) as f64).sqrt()
}

/// `sigma_bar` is the maximum sample standard deviation of `residuals` over
/// the windows `t = s..=s + floor(0.1 T)`, `s = 1..=floor(0.9 T)`.
pub fn truncation_threshold(residuals: &[f64], exponent: f64) -> Result<Threshold> {
    let n = residuals.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let (sigma_bar, single_window) = if n < 20 {
        (sample_sd(residuals), true)
    } else {
        let span = floor_index(0.1, n);
        let starts = floor_index(0.9, n);
        let sigma = (1..=starts)
            .map(|s| sample_sd(&residuals[s - 1..s + span]))
            .fold(0.0, f64::max);
        (sigma, false)
    };
    if !(sigma_bar > 0.0) {
        return Err(Error::DegenerateThreshold);
    }
    Ok(Threshold { psi: sigma_bar * (n as f64).powf(exponent), sigma_bar, single_window })
}

/// How the bandwidth is chosen in [`fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    CrossValidated(BandwidthGrid),
    Fixed(f64),
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule::CrossValidated(BandwidthGrid::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOptions {
    pub kernel: KernelKind,
    pub bandwidth: BandwidthRule,
    pub psi_exponent: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { kernel: KernelKind::Uniform, bandwidth: BandwidthRule::default(), psi_exponent: 1.0 / 7.0 }
    }
}

/// Every intermediate quantity of the local fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFitResult {
    pub delta_hat: Vec<f64>,
    /// `e_t = dy_t - delta_t y_{t-1}` on the demeaned series, `t = 1..=T`.
    pub residuals: Vec<f64>,
    /// `e_t 1(|e_t| < psi)`.
    pub truncated_residuals: Vec<f64>,
    pub bandwidth: f64,
    pub psi: f64,
    pub sigma_bar: f64,
    pub degenerate_windows: Vec<usize>,
    /// Residual standard deviation was zero; `psi = 0` and every residual is
    /// truncated.
    pub threshold_degenerate: bool,
    pub cross_validation: Option<BandwidthChoice>,
}

impl LocalFitResult {
    /// Share of residuals zeroed by truncation (exact zeros excluded).
    pub fn truncated_share(&self) -> f64 {
        let cut = self
            .residuals
            .iter()
            .zip(&self.truncated_residuals)
            .filter(|(e, t)| **e != 0.0 && **t == 0.0)
            .count();
        cut as f64 / self.residuals.len() as f64
    }
}

/// Bandwidth selection, local fit, residuals and truncation on `y_t - y_0`.
pub fn fit(series: &TimeSeries, options: &FitOptions) -> Result<LocalFitResult> {
    series.require_sample_size(10)?;
    let levels = series.gls_demeaned();
    let (bandwidth, cross_validation) = match options.bandwidth {
        BandwidthRule::Fixed(h) => (h, None),
        BandwidthRule::CrossValidated(grid) => {
            let choice = select_bandwidth(&levels, options.kernel, &grid)?;
            (choice.bandwidth, Some(choice))
        }
    };
    let local = local_delta(&levels, options.kernel, bandwidth)?;
    let residuals: Vec<f64> = (1..levels.len())
        .map(|t| (levels[t] - levels[t - 1]) - local.delta_hat[t - 1] * levels[t - 1])
        .collect();

    let (psi, sigma_bar, threshold_degenerate) = match truncation_threshold(&residuals, options.psi_exponent) {
        Ok(th) => (th.psi, th.sigma_bar, false),
        Err(Error::DegenerateThreshold) => (0.0, 0.0, true),
        Err(e) => return Err(e),
    };
    let truncated_residuals = residuals.iter().map(|&e| if e.abs() < psi { e } else { 0.0 }).collect();

    Ok(LocalFitResult {
        delta_hat: local.delta_hat,
        residuals,
        truncated_residuals,
        bandwidth,
        psi,
        sigma_bar,
        degenerate_windows: local.degenerate,
        threshold_degenerate,
        cross_validation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{simulate, BubbleSpec, DgpSpec, VolatilitySpec};
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    /// Direct evaluation of the weighted least-squares ratio, optionally
    /// dropping one observation.
    fn brute_delta(levels: &[f64], kernel: KernelKind, h: f64, t: usize, drop: Option<usize>) -> f64 {
        let n = levels.len() - 1;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 1..=n {
            if Some(i) == drop {
                continue;
            }
            let u = (i as f64 - t as f64) / (n as f64 * h);
            let w = if u.abs() <= 1.0 + 1e-12 { kernel.weight(u.clamp(-1.0, 1.0)) / h } else { 0.0 };
            num += w * levels[i - 1] * (levels[i] - levels[i - 1]);
            den += w * levels[i - 1] * levels[i - 1];
        }
        if den.abs() <= 1e-300 {
            0.0
        } else {
            num / den
        }
    }

    fn walk(n: usize, seed: u64) -> Vec<f64> {
        let spec = DgpSpec { bubble: BubbleSpec::null(), vol: VolatilitySpec::constant(1.0), length: n, seed };
        simulate(&spec).unwrap().gls_demeaned()
    }

    #[test]
    fn full_window_on_linear_levels() {
        let levels = [0.0, 1.0, 2.0, 3.0, 4.0];
        let fit = local_delta(&levels, KernelKind::Uniform, 1.0).unwrap();
        for d in fit.delta_hat {
            assert!((d - 6.0 / 14.0).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_levels_are_fitted_exactly() {
        let levels: Vec<f64> = (0..=40).map(|t| 2.0 * 1.05f64.powi(t)).collect();
        for kernel in [KernelKind::Uniform, KernelKind::TruncatedGaussian] {
            for h in [0.1, 0.3, 1.0] {
                let fit = local_delta(&levels, kernel, h).unwrap();
                assert!(fit.degenerate.is_empty());
                for d in fit.delta_hat {
                    assert!((d - 0.05).abs() < 1e-12, "{kernel:?} h={h}: {d}");
                }
            }
        }
    }

    #[test]
    fn zero_window_is_flagged() {
        // lagged levels vanish for i <= 4, so narrow windows at t <= 2 are empty
        let levels = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0];
        let fit = local_delta(&levels, KernelKind::Uniform, 0.1).unwrap();
        assert_eq!(fit.degenerate, vec![1, 2, 3, 4]);
        assert_eq!(fit.delta_hat[0], 0.0);
    }

    #[test]
    fn matches_brute_force_with_both_kernels() {
        let levels = walk(45, 3);
        for kernel in [KernelKind::Uniform, KernelKind::TruncatedGaussian] {
            for h in [0.08, 0.17, 0.33] {
                let fit = local_delta(&levels, kernel, h).unwrap();
                for t in 1..=45 {
                    let expected = brute_delta(&levels, kernel, h, t, None);
                    let got = fit.delta_hat[t - 1];
                    assert!((got - expected).abs() <= 1e-10 * expected.abs().max(1e-3), "{kernel:?} h={h} t={t}");
                }
            }
        }
    }

    #[test]
    fn leave_one_out_matches_refit() {
        for seed in 0..5 {
            let levels = walk(50, seed);
            for kernel in [KernelKind::Uniform, KernelKind::TruncatedGaussian] {
                let h = 0.15;
                let mut expected = 0.0;
                for t in 1..=50 {
                    let delta = brute_delta(&levels, kernel, h, t, Some(t));
                    let e = (levels[t] - levels[t - 1]) - delta * levels[t - 1];
                    expected += e * e;
                }
                let got = cv_criterion(&levels, kernel, h).unwrap();
                assert!((got - expected).abs() <= 1e-10 * expected, "{got} vs {expected}");
            }
        }
    }

    #[test]
    fn grid_bounds() {
        let grid = BandwidthGrid::default().candidates(100);
        assert_eq!(grid.len(), 15);
        assert!((grid[0] - 0.1).abs() < 1e-15);
        assert!((grid[14] - 100f64.powf(-0.3)).abs() < 1e-15);
        assert!((grid[14] - 0.251).abs() < 1e-3);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_fit_ties_to_smallest_bandwidth() {
        let levels: Vec<f64> = (0..=60).map(|t| 1.03f64.powi(t)).collect();
        let choice = select_bandwidth(&levels, KernelKind::Uniform, &BandwidthGrid::default()).unwrap();
        assert_eq!(choice.bandwidth, choice.candidates[0]);
        assert!(!choice.fallback);
    }

    #[test]
    fn all_degenerate_falls_back_to_largest() {
        let levels = vec![0.0; 30];
        let choice = select_bandwidth(&levels, KernelKind::Uniform, &BandwidthGrid::default()).unwrap();
        assert!(choice.fallback);
        assert_eq!(choice.bandwidth, *choice.candidates.last().unwrap());
    }

    #[test]
    fn bandwidth_selection_is_reproducible() {
        let levels = walk(200, 77);
        let a = select_bandwidth(&levels, KernelKind::Uniform, &BandwidthGrid::default()).unwrap();
        let b = select_bandwidth(&levels, KernelKind::Uniform, &BandwidthGrid::default()).unwrap();
        assert_eq!(a.bandwidth.to_bits(), b.bandwidth.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn constant_residuals_have_degenerate_threshold() {
        assert!(matches!(truncation_threshold(&[2.5; 40], 1.0 / 7.0), Err(Error::DegenerateThreshold)));
    }

    #[test]
    fn short_residual_vector_uses_single_window() {
        let th = truncation_threshold(&[1.0, -1.0, 2.0, 0.5, -0.3], 1.0 / 7.0).unwrap();
        assert!(th.single_window);
    }

    #[test]
    fn threshold_of_gaussian_residuals() {
        let mut sigma = Vec::new();
        for seed in 0..1000 {
            let mut rng = stream_rng(seed, 9);
            let e: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
            let th = truncation_threshold(&e, 1.0 / 7.0).unwrap();
            assert!((th.psi / th.sigma_bar - 200f64.powf(1.0 / 7.0)).abs() < 1e-12);
            sigma.push(th.sigma_bar);
        }
        // sigma_bar is a maximum over ~180 overlapping windows, so its mass
        // sits above 1; an independent simulation puts ~81% inside the band.
        let inside = sigma.iter().filter(|s| (0.8..=1.4).contains(*s)).count();
        assert!((740..=870).contains(&inside), "{inside} of 1000 in band");
        sigma.sort_by(f64::total_cmp);
        assert!((1.25..=1.36).contains(&sigma[500]), "median {}", sigma[500]);
        assert!((200f64.powf(1.0 / 7.0) - 2.13).abs() < 0.01);
    }

    #[test]
    fn threshold_tracks_high_volatility_regime() {
        let mut sigma = Vec::new();
        for seed in 0..500 {
            let mut rng = stream_rng(seed, 10);
            let e: Vec<f64> = (0..200)
                .map(|t| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    if t < 100 { z } else { 2.0 * z }
                })
                .collect();
            sigma.push(truncation_threshold(&e, 1.0 / 7.0).unwrap().sigma_bar);
        }
        sigma.sort_by(f64::total_cmp);
        let median = sigma[250];
        assert!((1.9..=2.9).contains(&median), "median sigma_bar {median}");
    }

    #[test]
    fn constant_series_has_zero_residuals() {
        let series = TimeSeries::new(vec![3.0; 40]).unwrap();
        let fit = fit(&series, &FitOptions::default()).unwrap();
        assert!(fit.residuals.iter().all(|e| *e == 0.0));
        assert!(fit.truncated_residuals.iter().all(|e| *e == 0.0));
        assert!(fit.threshold_degenerate);
    }

    #[test]
    fn fit_residual_identity_and_truncation_bound() {
        let series = TimeSeries::new(walk(150, 21)).unwrap();
        let fit = fit(&series, &FitOptions::default()).unwrap();
        let levels = series.gls_demeaned();
        for t in 1..=150 {
            let e = levels[t] - levels[t - 1] - fit.delta_hat[t - 1] * levels[t - 1];
            assert_eq!(fit.residuals[t - 1], e);
            let cut = fit.truncated_residuals[t - 1];
            assert!(cut == 0.0 || cut.abs() < fit.psi);
        }
    }

    #[test]
    fn few_residuals_truncated_under_null() {
        let mut shares = Vec::new();
        for seed in 0..200 {
            let series = TimeSeries::new(walk(200, seed)).unwrap();
            shares.push(fit(&series, &FitOptions::default()).unwrap().truncated_share());
        }
        let mean = shares.iter().sum::<f64>() / shares.len() as f64;
        assert!(mean < 0.05, "mean truncated share {mean}");
    }

    #[test]
    fn local_delta_tracks_bubble() {
        let mut medians = Vec::new();
        for seed in 0..200 {
            let spec = DgpSpec {
                bubble: BubbleSpec::explosive(0.1, 0.4, 0.6),
                vol: VolatilitySpec::constant(1.0),
                length: 200,
                seed,
            };
            let series = simulate(&spec).unwrap();
            let fit = fit(&series, &FitOptions::default()).unwrap();
            let mut inside: Vec<f64> = fit.delta_hat[80..120].to_vec();
            inside.sort_by(f64::total_cmp);
            medians.push(inside[inside.len() / 2]);
        }
        medians.sort_by(f64::total_cmp);
        let median = medians[medians.len() / 2];
        assert!((0.05..=0.15).contains(&median), "median delta in bubble {median}");
    }

    #[test]
    fn max_local_delta_shrinks_with_sample_size() {
        let median_max = |n: usize| {
            let mut maxima: Vec<f64> = (0..500)
                .map(|seed| {
                    let levels = walk(n, seed + 1000 * n as u64);
                    let h = (n as f64).powf(-0.4);
                    let fit = local_delta(&levels, KernelKind::Uniform, h).unwrap();
                    // skip the boundary block where the levels are O(1)
                    let start = half_width(h, n) + 1;
                    fit.delta_hat[start..].iter().fold(0.0, |m: f64, d| m.max(d.abs()))
                })
                .collect();
            maxima.sort_by(f64::total_cmp);
            maxima[250]
        };
        let (a, b, c) = (median_max(100), median_max(200), median_max(400));
        assert!(a > b && b > c, "{a} {b} {c}");
    }

    proptest! {
        #[test]
        fn fit_is_scale_equivariant(seed in 0u64..1000, power in -6i32..6) {
            let series = TimeSeries::new(walk(80, seed)).unwrap();
            let c = 2f64.powi(power);
            let a = fit(&series, &FitOptions::default()).unwrap();
            let b = fit(&series.scaled(c), &FitOptions::default()).unwrap();
            prop_assert_eq!(&a.delta_hat, &b.delta_hat);
            prop_assert_eq!(a.bandwidth, b.bandwidth);
            prop_assert_eq!(a.psi * c, b.psi);
            for (x, y) in a.truncated_residuals.iter().zip(&b.truncated_residuals) {
                prop_assert_eq!(x * c, *y);
            }
        }
    }
}
