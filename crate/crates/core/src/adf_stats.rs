//! Subsample ADF statistics and their supremum families.
//!
//! Windows are index pairs `(a, b]` with `a = floor(r1 T)` and
//! `b = floor(r2 T)`; the regression at date `t` uses `Δy_t` and `y_{t-1}`
//! for `t = a+1..=b`. SADF takes the supremum over `a = 0`,
//! `b = floor(r0 T)..=T`; GSADF additionally over `a = 0..=b - floor(r0 T)`.
//!
//! The time-transformed statistic on a deformed series `y~` is
//!
//! ```text
//! TADF(a, b) = (y~_b^2 - y~_a^2 - omega^2 (b - a)) / (2 omega sqrt(sum_{t=a+1}^b y~_{t-1}^2))
//! ```
//!
//! with a single whole-sample `omega^2`.

use serde::{Deserialize, Serialize};

use crate::kernel_regression::{fit, FitOptions, LocalFitResult};
use crate::variance_profile::{transform, TransformedSeries, VarianceProfile};
use crate::{floor_index, Error, Result, TimeSeries};

/// Relative residual sum of squares below which a window counts as an exact
/// fit (the t-ratio is then undefined).
const EXACT_FIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Demeaning {
    /// Intercept in the regression.
    Ols,
    /// Subtract `y_0`, no intercept.
    Gls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFamily {
    Sadf,
    Gsadf,
    Stadf,
    Gstadf,
}

impl TestFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TestFamily::Sadf => "SADF",
            TestFamily::Gsadf => "GSADF",
            TestFamily::Stadf => "STADF",
            TestFamily::Gstadf => "GSTADF",
        }
    }

    pub fn is_generalized(&self) -> bool {
        matches!(self, TestFamily::Gsadf | TestFamily::Gstadf)
    }
}

/// `r0 = 0.01 + 1.8 / sqrt(T)`.
pub fn default_r0(sample_size: usize) -> f64 {
    0.01 + 1.8 / (sample_size as f64).sqrt()
}

/// Admissible windows at resolution `1 / T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowGrid {
    pub sample_size: usize,
    /// `floor(r0 T)`, at least 1.
    pub min_window: usize,
}

impl WindowGrid {
    pub fn new(r0: f64, sample_size: usize) -> Result<Self> {
        if !(r0 > 0.0 && r0 <= 1.0) {
            return Err(Error::InvalidSpec(format!("r0 must lie in (0, 1], got {r0}")));
        }
        Ok(Self { sample_size, min_window: floor_index(r0, sample_size).max(1) })
    }

    /// Windows `(0, b]` of the SADF family.
    pub fn forward(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.min_window..=self.sample_size).map(|b| (0, b))
    }

    /// Windows `(a, b]` of the GSADF family.
    pub fn all(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.min_window..=self.sample_size).flat_map(move |b| (0..=b - self.min_window).map(move |a| (a, b)))
    }

    pub fn windows(&self, generalized: bool) -> Vec<(usize, usize)> {
        if generalized {
            self.all().collect()
        } else {
            self.forward().collect()
        }
    }

    pub fn fraction(&self, index: usize) -> f64 {
        index as f64 / self.sample_size as f64
    }
}

/// Outcome of one sup-type test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub family: TestFamily,
    pub statistic: f64,
    /// `(r1, r2)` of the maximizing window.
    pub argmax_window: (f64, f64),
    /// `(a, b)` of the maximizing window on the statistic's own time scale.
    pub argmax_index: (usize, usize),
    pub demeaning: Demeaning,
    pub r0: f64,
    pub p_value: Option<f64>,
    /// `(level, rejected)` pairs.
    pub decisions: Vec<(f64, bool)>,
    /// Windows excluded from the supremum because their statistic was undefined.
    pub skipped_windows: usize,
}

/// Running maximum over windows.
struct SupTracker {
    best: f64,
    at: (usize, usize),
    skipped: usize,
}

impl SupTracker {
    fn new() -> Self {
        Self { best: f64::NEG_INFINITY, at: (0, 0), skipped: 0 }
    }

    fn offer(&mut self, value: Option<f64>, a: usize, b: usize) {
        match value {
            Some(v) if v.is_finite() => {
                if v > self.best {
                    self.best = v;
                    self.at = (a, b);
                }
            }
            _ => self.skipped += 1,
        }
    }

    fn finish(self, family: TestFamily, demeaning: Demeaning, r0: f64, grid: &WindowGrid) -> Result<TestResult> {
        if !self.best.is_finite() {
            return Err(Error::NoValidWindow);
        }
        Ok(TestResult {
            family,
            statistic: self.best,
            argmax_window: (grid.fraction(self.at.0), grid.fraction(self.at.1)),
            argmax_index: self.at,
            demeaning,
            r0,
            p_value: None,
            decisions: Vec::new(),
            skipped_windows: self.skipped,
        })
    }
}

/// Cross moments of `(x, d) = (y_{t-1}, Δy_t)` accumulated one date at a time.
#[derive(Default)]
struct Moments {
    n: f64,
    mean_x: f64,
    mean_d: f64,
    xx: f64,
    xd: f64,
    dd: f64,
}

impl Moments {
    /// Centered (Welford) update for the OLS regression.
    fn push_centered(&mut self, x: f64, d: f64) {
        self.n += 1.0;
        let dx = x - self.mean_x;
        let dd = d - self.mean_d;
        self.mean_x += dx / self.n;
        self.mean_d += dd / self.n;
        self.xx += dx * (x - self.mean_x);
        self.xd += dx * (d - self.mean_d);
        self.dd += dd * (d - self.mean_d);
    }

    /// Raw update for the no-intercept regression.
    fn push_raw(&mut self, x: f64, d: f64) {
        self.n += 1.0;
        self.xx += x * x;
        self.xd += x * d;
        self.dd += d * d;
    }

    fn t_ratio(&self, parameters: f64) -> Option<f64> {
        if self.n <= parameters || !(self.xx > 0.0) {
            return None;
        }
        let beta = self.xd / self.xx;
        let rss = self.dd - self.xd * beta;
        if !(rss > EXACT_FIT * self.dd) {
            return None;
        }
        let sigma_sq = rss / (self.n - parameters);
        Some(self.xd / (sigma_sq * self.xx).sqrt())
    }
}

/// Values the regression runs on: `y` for OLS, `y - y_0` for GLS.
fn regression_levels(series: &TimeSeries, demeaning: Demeaning) -> Vec<f64> {
    match demeaning {
        Demeaning::Ols => series.values().to_vec(),
        Demeaning::Gls => series.gls_demeaned(),
    }
}

/// ADF t-ratio over `(a, b]` on prepared levels via the normal equations.
pub(crate) fn adf_window_levels(levels: &[f64], a: usize, b: usize, demeaning: Demeaning, lags: usize) -> Result<f64> {
    let degenerate = || Error::DegenerateWindow { start: a, end: b };
    if b > levels.len() - 1 || b <= a + lags {
        return Err(degenerate());
    }
    let intercept = usize::from(demeaning == Demeaning::Ols);
    let p = intercept + 1 + lags;
    let target = intercept;
    let first = a + lags + 1;
    let n = b + 1 - first;
    if n <= p {
        return Err(degenerate());
    }

    let diff = |t: usize| levels[t] - levels[t - 1];
    let row = |t: usize, out: &mut Vec<f64>| {
        out.clear();
        if intercept == 1 {
            out.push(1.0);
        }
        out.push(levels[t - 1]);
        for j in 1..=lags {
            out.push(diff(t - j));
        }
    };

    let mut xtx = vec![0.0; p * p];
    let mut xty = vec![0.0; p];
    let mut x = Vec::with_capacity(p);
    let mut mean_d = 0.0;
    for t in first..=b {
        row(t, &mut x);
        let d = diff(t);
        mean_d += d;
        for i in 0..p {
            xty[i] += x[i] * d;
            for j in 0..=i {
                xtx[i * p + j] += x[i] * x[j];
            }
        }
    }
    mean_d /= n as f64;
    for i in 0..p {
        for j in 0..i {
            xtx[j * p + i] = xtx[i * p + j];
        }
    }

    let chol = cholesky(&xtx, p).ok_or_else(degenerate)?;
    let beta = chol_solve(&chol, p, &xty);
    let mut unit = vec![0.0; p];
    unit[target] = 1.0;
    let inv_col = chol_solve(&chol, p, &unit);

    let (mut rss, mut tss) = (0.0, 0.0);
    for t in first..=b {
        row(t, &mut x);
        let d = diff(t);
        let fitted: f64 = x.iter().zip(&beta).map(|(xi, bi)| xi * bi).sum();
        rss += (d - fitted).powi(2);
        tss += if intercept == 1 { (d - mean_d).powi(2) } else { d * d };
    }
    if !(rss > EXACT_FIT * tss) {
        return Err(degenerate());
    }
    let sigma_sq = rss / (n - p) as f64;
    let se = (sigma_sq * inv_col[target]).sqrt();
    if !(se > 0.0) {
        return Err(degenerate());
    }
    Ok(beta[target] / se)
}

/// Lower-triangular Cholesky factor of a symmetric `p x p` matrix.
fn cholesky(a: &[f64], p: usize) -> Option<Vec<f64>> {
    let scale = (0..p).map(|i| a[i * p + i].abs()).fold(0.0, f64::max);
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut sum = a[i * p + j];
            for k in 0..j {
                sum -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if !(sum > 1e-13 * scale) {
                    return None;
                }
                l[i * p + i] = sum.sqrt();
            } else {
                l[i * p + j] = sum / l[j * p + j];
            }
        }
    }
    Some(l)
}

fn chol_solve(l: &[f64], p: usize, rhs: &[f64]) -> Vec<f64> {
    let mut z = rhs.to_vec();
    for i in 0..p {
        for k in 0..i {
            z[i] -= l[i * p + k] * z[k];
        }
        z[i] /= l[i * p + i];
    }
    for i in (0..p).rev() {
        for k in i + 1..p {
            z[i] -= l[k * p + i] * z[k];
        }
        z[i] /= l[i * p + i];
    }
    z
}

/// ADF t-ratio of `delta` over the window `(floor(r1 T), floor(r2 T)]`.
pub fn adf_window(series: &TimeSeries, r1: f64, r2: f64, demeaning: Demeaning, lags: usize) -> Result<f64> {
    let n = series.sample_size();
    let (a, b) = (floor_index(r1, n), floor_index(r2, n));
    adf_window_levels(&regression_levels(series, demeaning), a, b, demeaning, lags)
}

fn sup_adf(series: &TimeSeries, r0: f64, demeaning: Demeaning, lags: usize, generalized: bool) -> Result<TestResult> {
    sup_adf_levels(&regression_levels(series, demeaning), r0, demeaning, lags, generalized)
}

/// Sup-ADF on prepared regression levels (`y` for OLS, `y - y_0` for GLS).
pub(crate) fn sup_adf_levels(
    levels: &[f64],
    r0: f64,
    demeaning: Demeaning,
    lags: usize,
    generalized: bool,
) -> Result<TestResult> {
    let n = levels.len() - 1;
    let grid = WindowGrid::new(r0, n)?;
    let params = usize::from(demeaning == Demeaning::Ols) + 1 + lags;
    if grid.min_window < lags + params + 1 {
        return Err(Error::InvalidSpec(format!(
            "minimum window floor(r0 T) = {} leaves no residual degrees of freedom with {lags} lags",
            grid.min_window
        )));
    }
    let family = if generalized { TestFamily::Gsadf } else { TestFamily::Sadf };
    let mut sup = SupTracker::new();

    if lags == 0 {
        let last_start = if generalized { n - grid.min_window } else { 0 };
        for a in 0..=last_start {
            let mut m = Moments::default();
            for t in a + 1..=n {
                let (x, d) = (levels[t - 1], levels[t] - levels[t - 1]);
                match demeaning {
                    Demeaning::Ols => m.push_centered(x, d),
                    Demeaning::Gls => m.push_raw(x, d),
                }
                if t >= a + grid.min_window {
                    sup.offer(m.t_ratio(params as f64), a, t);
                }
            }
        }
    } else {
        for (a, b) in grid.windows(generalized) {
            sup.offer(adf_window_levels(levels, a, b, demeaning, lags).ok(), a, b);
        }
    }
    sup.finish(family, demeaning, r0, &grid)
}

/// `sup_{r2 in [r0, 1]} ADF(0, r2)`.
pub fn sadf(series: &TimeSeries, r0: f64, demeaning: Demeaning, lags: usize) -> Result<TestResult> {
    sup_adf(series, r0, demeaning, lags, false)
}

/// `sup_{r2 in [r0, 1], r1 in [0, r2 - r0]} ADF(r1, r2)`.
pub fn gsadf(series: &TimeSeries, r0: f64, demeaning: Demeaning, lags: usize) -> Result<TestResult> {
    sup_adf(series, r0, demeaning, lags, true)
}

/// TADF assembled from its parts:
/// `(end^2 - start^2 - centering) / (2 scale sqrt(lagged_sq))`.
pub fn tadf_from_parts(end: f64, start: f64, centering: f64, scale: f64, lagged_sq: f64) -> Option<f64> {
    if !(lagged_sq > 0.0 && scale > 0.0) {
        return None;
    }
    Some((end * end - start * start - centering) / (2.0 * scale * lagged_sq.sqrt()))
}

fn tadf_indices(values: &[f64], omega_bar_sq: f64, a: usize, b: usize) -> Option<f64> {
    let lagged_sq: f64 = values[a..b].iter().map(|v| v * v).sum();
    tadf_from_parts(values[b], values[a], omega_bar_sq * (b - a) as f64, omega_bar_sq.sqrt(), lagged_sq)
}

/// TADF over `(floor(r1 T), floor(r2 T)]` of a transformed series.
pub fn tadf_window(transformed: &TransformedSeries, omega_bar_sq: f64, r1: f64, r2: f64) -> Result<f64> {
    let n = transformed.sample_size();
    let (a, b) = (floor_index(r1, n), floor_index(r2, n));
    if b <= a || !(omega_bar_sq > 0.0) {
        return Err(Error::DegenerateWindow { start: a, end: b });
    }
    tadf_indices(&transformed.values, omega_bar_sq, a, b).ok_or(Error::DegenerateWindow { start: a, end: b })
}

/// Supremum of TADF over the SADF (`generalized = false`) or GSADF grid.
pub fn sup_tadf(transformed: &TransformedSeries, omega_bar_sq: f64, r0: f64, generalized: bool) -> Result<TestResult> {
    sup_tadf_values(&transformed.values, omega_bar_sq, r0, generalized)
}

pub(crate) fn sup_tadf_values(y: &[f64], omega_bar_sq: f64, r0: f64, generalized: bool) -> Result<TestResult> {
    let n = y.len() - 1;
    let grid = WindowGrid::new(r0, n)?;
    let omega = omega_bar_sq.sqrt();
    let family = if generalized { TestFamily::Gstadf } else { TestFamily::Stadf };
    let mut sup = SupTracker::new();
    let last_start = if generalized { n - grid.min_window } else { 0 };
    for a in 0..=last_start {
        let mut lagged_sq = 0.0;
        for b in a + 1..=n {
            lagged_sq += y[b - 1] * y[b - 1];
            if b >= a + grid.min_window {
                let centering = omega_bar_sq * (b - a) as f64;
                sup.offer(tadf_from_parts(y[b], y[a], centering, omega, lagged_sq), a, b);
            }
        }
    }
    sup.finish(family, Demeaning::Gls, r0, &grid)
}

/// Where the variance profile of the time transformation comes from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ProfileSource {
    /// Kernel fit, truncated residuals and the estimated profile.
    #[default]
    Estimated,
    /// A known profile (with its `omega_bar_sq`), bypassing estimation.
    Known(VarianceProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StadfOptions {
    pub r0: f64,
    pub fit: FitOptions,
    pub profile: ProfileSource,
}

impl StadfOptions {
    pub fn new(r0: f64) -> Self {
        Self { r0, fit: FitOptions::default(), profile: ProfileSource::Estimated }
    }
}

/// Time-transformed test together with the objects it was computed from.
#[derive(Debug, Clone)]
pub struct StadfOutcome {
    pub result: TestResult,
    pub profile: VarianceProfile,
    pub transformed: TransformedSeries,
    pub fit: Option<LocalFitResult>,
}

impl StadfOutcome {
    /// Maximizing window in original observation indices.
    pub fn argmax_source_window(&self) -> (usize, usize) {
        let (a, b) = self.result.argmax_index;
        (self.transformed.index_map[a], self.transformed.index_map[b])
    }
}

fn time_transformed(series: &TimeSeries, options: &StadfOptions, generalized: bool) -> Result<StadfOutcome> {
    series.require_sample_size(20)?;
    let (profile, fit) = match &options.profile {
        ProfileSource::Known(profile) => (profile.clone(), None),
        ProfileSource::Estimated => {
            let local = fit(series, &options.fit)?;
            (VarianceProfile::from_fit(&local)?, Some(local))
        }
    };
    let transformed = transform(series, &profile)?;
    let result = sup_tadf(&transformed, profile.omega_bar_sq(), options.r0, generalized)?;
    Ok(StadfOutcome { result, profile, transformed, fit })
}

/// `sup_{r2} TADF(0, r2)` on the time-deformed series.
pub fn stadf(series: &TimeSeries, options: &StadfOptions) -> Result<StadfOutcome> {
    time_transformed(series, options, false)
}

/// `sup_{r1, r2} TADF(r1, r2)` on the time-deformed series.
pub fn gstadf(series: &TimeSeries, options: &StadfOptions) -> Result<StadfOutcome> {
    time_transformed(series, options, true)
}
