//! Rejection-frequency experiments and timing runs.
//!
//! Each grid cell `(volatility, T, delta1)` gets a seed derived from the
//! master seed and a textual descriptor of the cell, so adding cells never
//! changes existing ones. Replication `r` of a cell simulates its path from
//! `split_seed(cell_seed, r)` and every requested test is applied to that same
//! path.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adf_stats::{default_r0, gsadf, gstadf, sadf, stadf, Demeaning, StadfOptions};
use crate::dgp::{simulate, BubbleSpec, DgpSpec, VolatilitySpec};
use crate::inference::{wild_bootstrap_sadf, CriticalValues, NullFamily};
use crate::kernel_regression::FitOptions;
use crate::rng::{derive_seed, split_seed};
use crate::{Error, Result, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "SADF")]
    Sadf,
    #[serde(rename = "SADF_b")]
    SadfBootstrap,
    #[serde(rename = "STADF")]
    Stadf,
    #[serde(rename = "GSADF")]
    Gsadf,
    #[serde(rename = "GSTADF")]
    Gstadf,
}

impl TestKind {
    pub const ALL: [TestKind; 5] = [TestKind::Sadf, TestKind::SadfBootstrap, TestKind::Stadf, TestKind::Gsadf, TestKind::Gstadf];

    pub fn name(&self) -> &'static str {
        match self {
            TestKind::Sadf => "SADF",
            TestKind::SadfBootstrap => "SADF_b",
            TestKind::Stadf => "STADF",
            TestKind::Gsadf => "GSADF",
            TestKind::Gstadf => "GSTADF",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(name))
    }

    /// Asymptotic null used for the critical value (none for the bootstrap).
    pub fn null_family(&self) -> Option<NullFamily> {
        match self {
            TestKind::Sadf => Some(NullFamily::SadfOls),
            TestKind::Gsadf => Some(NullFamily::GsadfOls),
            TestKind::Stadf => Some(NullFamily::SadfGls),
            TestKind::Gstadf => Some(NullFamily::GsadfGls),
            TestKind::SadfBootstrap => None,
        }
    }
}

/// Minimum window rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum R0Rule {
    /// `0.01 + 1.8 / sqrt(T)`
    Formula,
    Fixed(f64),
}

impl R0Rule {
    pub fn r0(&self, sample_size: usize) -> f64 {
        match self {
            R0Rule::Formula => default_r0(sample_size),
            R0Rule::Fixed(r0) => *r0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sample_sizes: Vec<usize>,
    pub delta1_grid: Vec<f64>,
    pub volatility: Vec<VolatilitySpec>,
    pub tests: Vec<TestKind>,
    pub replications: usize,
    pub level: f64,
    pub r0_rule: R0Rule,
    pub master_seed: u64,
    /// Bubble occupies `(floor(start T), floor(end T)]`.
    pub bubble_start: f64,
    pub bubble_end: f64,
    pub bootstrap_replications: usize,
    pub fit: FitOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sample_sizes: vec![100, 200],
            delta1_grid: vec![0.0, 0.02, 0.04, 0.06, 0.08, 0.1],
            volatility: vec![VolatilitySpec::constant(1.0)],
            tests: vec![TestKind::Sadf, TestKind::SadfBootstrap, TestKind::Stadf],
            replications: 500,
            level: 0.05,
            r0_rule: R0Rule::Formula,
            master_seed: 1,
            bubble_start: 0.4,
            bubble_end: 0.6,
            bootstrap_replications: 199,
            fit: FitOptions::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.replications < 100 {
            return fail(format!("replications must be at least 100, got {}", self.replications));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return fail(format!("level must lie in (0, 1), got {}", self.level));
        }
        if self.tests.is_empty() {
            return fail("test list is empty".into());
        }
        if self.sample_sizes.is_empty() || self.delta1_grid.is_empty() || self.volatility.is_empty() {
            return fail("sample_sizes, delta1_grid and volatility must be nonempty".into());
        }
        if let Some(t) = self.sample_sizes.iter().find(|t| **t < 20) {
            return fail(format!("sample sizes must be at least 20, got {t}"));
        }
        if self.tests.contains(&TestKind::SadfBootstrap) && self.bootstrap_replications < 99 {
            return fail("bootstrap_replications must be at least 99".into());
        }
        for vol in &self.volatility {
            vol.validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        }
        for &delta1 in &self.delta1_grid {
            self.bubble(delta1).validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        }
        for &t in &self.sample_sizes {
            let r0 = self.r0_rule.r0(t);
            if !(r0 > 0.0 && r0 < 1.0) {
                return fail(format!("r0 = {r0} outside (0, 1) for T = {t}"));
            }
        }
        Ok(())
    }

    pub fn bubble(&self, delta1: f64) -> BubbleSpec {
        if delta1 == 0.0 {
            BubbleSpec::null()
        } else {
            BubbleSpec::explosive(delta1, self.bubble_start, self.bubble_end)
        }
    }
}

/// One `(volatility, T, delta1, test)` entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub vol: VolatilitySpec,
    pub sample_size: usize,
    pub delta1: f64,
    pub test: TestKind,
    pub r0: f64,
    /// Critical value used (asymptotic tests only).
    pub critical_value: Option<f64>,
    pub rejections: usize,
    /// Replications whose statistic was undefined.
    pub failures: usize,
    pub replications: usize,
    /// `rejections / (replications - failures)`; `NaN` for invalid cells.
    pub frequency: f64,
    /// Fewer than 1% of replications failed.
    pub valid: bool,
}

impl Cell {
    /// Binomial standard error of the frequency.
    pub fn standard_error(&self) -> f64 {
        let n = (self.replications - self.failures) as f64;
        (self.frequency * (1.0 - self.frequency) / n).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionTable {
    pub cells: Vec<Cell>,
    pub replications: usize,
    pub level: f64,
    pub master_seed: u64,
    pub runtime_seconds: f64,
}

impl RejectionTable {
    pub fn cell(&self, vol: &VolatilitySpec, sample_size: usize, delta1: f64, test: TestKind) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.vol == *vol && c.sample_size == sample_size && c.delta1 == delta1 && c.test == test)
    }

    pub fn frequency(&self, vol: &VolatilitySpec, sample_size: usize, delta1: f64, test: TestKind) -> Option<f64> {
        self.cell(vol, sample_size, delta1, test).map(|c| c.frequency)
    }

    /// One row per cell; floats printed with round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "volatility,sigma0,sigma1,tau_sigma,ratio,T,delta1,test,r0,critical_value,replications,failures,rejections,frequency,valid\n",
        );
        for c in &self.cells {
            let cv = c.critical_value.map(|v| format!("{v:?}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:?},{:?},{:?},{:?},{},{:?},{},{:?},{},{},{},{},{:?},{}",
                c.vol.kind.name(),
                c.vol.sigma0,
                c.vol.sigma1,
                c.vol.tau_sigma,
                c.vol.ratio(),
                c.sample_size,
                c.delta1,
                c.test.name(),
                c.r0,
                cv,
                c.replications,
                c.failures,
                c.rejections,
                c.frequency,
                c.valid
            );
        }
        out
    }

    /// Table laid out as rows `(ratio, delta1)` per volatility model and one
    /// column block of tests per sample size.
    pub fn to_text(&self) -> String {
        let mut tests: Vec<TestKind> = self.cells.iter().map(|c| c.test).collect();
        tests.sort();
        tests.dedup();
        let mut sizes: Vec<usize> = self.cells.iter().map(|c| c.sample_size).collect();
        sizes.sort();
        sizes.dedup();
        let mut models: Vec<(&'static str, f64)> = Vec::new();
        let mut vols: Vec<VolatilitySpec> = Vec::new();
        for c in &self.cells {
            if !vols.contains(&c.vol) {
                vols.push(c.vol);
            }
            let key = (c.vol.kind.name(), c.vol.tau_sigma);
            if !models.contains(&key) {
                models.push(key);
            }
        }
        let mut deltas: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !deltas.contains(&c.delta1) {
                deltas.push(c.delta1);
            }
        }

        let mut out = String::new();
        let _ = writeln!(
            out,
            "Rejection frequencies at level {} ({} replications, master seed {})",
            self.level, self.replications, self.master_seed
        );
        for (kind, tau) in models {
            let _ = writeln!(out, "\n{kind} (tau_sigma = {tau})");
            let mut header = format!("{:>8} {:>7}", "s1/s0", "delta1");
            for t in &sizes {
                for test in &tests {
                    header.push_str(&format!(" {:>9}", format!("{}@{}", test.name(), t)));
                }
            }
            let _ = writeln!(out, "{header}");
            for vol in vols.iter().filter(|v| v.kind.name() == kind && v.tau_sigma == tau) {
                for &delta in &deltas {
                    let mut line = format!("{:>8.4} {:>7.2}", vol.ratio(), delta);
                    for &t in &sizes {
                        for &test in &tests {
                            match self.cell(vol, t, delta, test) {
                                Some(c) if c.valid => line.push_str(&format!(" {:>9.3}", c.frequency)),
                                Some(_) => line.push_str(&format!(" {:>9}", "invalid")),
                                None => line.push_str(&format!(" {:>9}", "-")),
                            }
                        }
                    }
                    let _ = writeln!(out, "{line}");
                }
            }
        }
        out
    }
}

/// Cells where power drops as `delta1` grows by more than `tolerance`
/// combined standard errors, within each `(vol, T, test)` block.
pub fn monotonicity_violations(table: &RejectionTable, tolerance: f64) -> Vec<(Cell, Cell)> {
    let mut out = Vec::new();
    for a in table.cells.iter().filter(|c| c.valid) {
        let next = table
            .cells
            .iter()
            .filter(|b| {
                b.valid && b.vol == a.vol && b.sample_size == a.sample_size && b.test == a.test && b.delta1 > a.delta1
            })
            .min_by(|x, y| x.delta1.total_cmp(&y.delta1));
        if let Some(b) = next {
            let se = a.standard_error().hypot(b.standard_error());
            if b.frequency < a.frequency - tolerance * se {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Pairs `(smaller T, larger T)` at the same `(vol, delta1, test)` where the
/// frequency falls with `T` by more than `tolerance` combined standard errors.
pub fn consistency_violations(table: &RejectionTable, delta1: f64, tolerance: f64) -> Vec<(Cell, Cell)> {
    let mut out = Vec::new();
    for a in table.cells.iter().filter(|c| c.valid && c.delta1 == delta1) {
        for b in table.cells.iter().filter(|b| {
            b.valid && b.delta1 == delta1 && b.vol == a.vol && b.test == a.test && b.sample_size > a.sample_size
        }) {
            let se = a.standard_error().hypot(b.standard_error());
            if b.frequency < a.frequency - tolerance * se {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

fn cell_descriptor(vol: &VolatilitySpec, sample_size: usize, delta1: f64) -> String {
    format!(
        "vol={};sigma0={:?};sigma1={:?};tau_sigma={:?};T={};delta1={:?}",
        vol.kind.name(),
        vol.sigma0,
        vol.sigma1,
        vol.tau_sigma,
        sample_size,
        delta1
    )
}

/// Everything a replication needs to decide each test.
struct TestPlan<'a> {
    config: &'a ExperimentConfig,
    r0: f64,
    critical: Vec<Option<f64>>,
}

impl TestPlan<'_> {
    fn decide(&self, series: &TimeSeries, path_seed: u64) -> Vec<Result<bool>> {
        let cfg = self.config;
        let stadf_options = StadfOptions { fit: cfg.fit, ..StadfOptions::new(self.r0) };
        cfg.tests
            .iter()
            .zip(&self.critical)
            .map(|(test, cv)| {
                let exceeds = |stat: f64| stat > cv.expect("asymptotic test has a critical value");
                match test {
                    TestKind::Sadf => sadf(series, self.r0, Demeaning::Ols, 0).map(|r| exceeds(r.statistic)),
                    TestKind::Gsadf => gsadf(series, self.r0, Demeaning::Ols, 0).map(|r| exceeds(r.statistic)),
                    TestKind::Stadf => stadf(series, &stadf_options).map(|o| exceeds(o.result.statistic)),
                    TestKind::Gstadf => gstadf(series, &stadf_options).map(|o| exceeds(o.result.statistic)),
                    TestKind::SadfBootstrap => {
                        let seed = split_seed(path_seed, 0xB007);
                        wild_bootstrap_sadf(series, self.r0, cfg.bootstrap_replications, seed, Demeaning::Ols)
                            .and_then(|b| if b.degenerate { Err(Error::NoValidWindow) } else { Ok(b.p_value <= cfg.level) })
                    }
                }
            })
            .collect()
    }
}

/// Rejection frequency of every test in every grid cell.
pub fn run_experiment(config: &ExperimentConfig, critical_values: &CriticalValues) -> Result<RejectionTable> {
    config.validate()?;
    let started = Instant::now();
    let mut cells = Vec::new();

    for vol in &config.volatility {
        for &sample_size in &config.sample_sizes {
            let r0 = config.r0_rule.r0(sample_size);
            let critical = config
                .tests
                .iter()
                .map(|t| match t.null_family() {
                    Some(f) => critical_values.distribution(f, r0).map(|d| Some(d.critical_value(config.level))),
                    None => Ok(None),
                })
                .collect::<Result<Vec<_>>>()?;
            let plan = TestPlan { config, r0, critical };

            for &delta1 in &config.delta1_grid {
                let cell_seed = derive_seed(config.master_seed, &cell_descriptor(vol, sample_size, delta1));
                let bubble = config.bubble(delta1);
                let outcomes: Vec<Vec<Result<bool>>> = (0..config.replications as u64)
                    .into_par_iter()
                    .map(|r| {
                        let seed = split_seed(cell_seed, r);
                        let spec = DgpSpec { bubble, vol: *vol, length: sample_size, seed };
                        match simulate(&spec) {
                            Ok(series) => plan.decide(&series, seed),
                            Err(e) => config.tests.iter().map(|_| Err(Error::InvalidSpec(e.to_string()))).collect(),
                        }
                    })
                    .collect();

                for (k, test) in config.tests.iter().enumerate() {
                    let (mut rejections, mut failures) = (0, 0);
                    for rep in &outcomes {
                        match &rep[k] {
                            Ok(true) => rejections += 1,
                            Ok(false) => {}
                            Err(_) => failures += 1,
                        }
                    }
                    let valid = failures * 100 < config.replications;
                    let frequency = if valid {
                        rejections as f64 / (config.replications - failures) as f64
                    } else {
                        f64::NAN
                    };
                    cells.push(Cell {
                        vol: *vol,
                        sample_size,
                        delta1,
                        test: *test,
                        r0,
                        critical_value: plan.critical[k],
                        rejections,
                        failures,
                        replications: config.replications,
                        frequency,
                        valid,
                    });
                }
            }
        }
    }

    Ok(RejectionTable {
        cells,
        replications: config.replications,
        level: config.level,
        master_seed: config.master_seed,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub sample_size: usize,
    pub test: TestKind,
    pub repetitions: usize,
    pub median_seconds: f64,
}

/// Median wall-clock time of computing each test on homoskedastic random
/// walks. Runs sequentially; critical values are not part of the timing.
pub fn run_timing(
    sample_sizes: &[usize],
    tests: &[TestKind],
    repetitions: usize,
    bootstrap_replications: usize,
    seed: u64,
) -> Result<Vec<TimingRow>> {
    if repetitions == 0 || tests.is_empty() {
        return Err(Error::InvalidConfig("timing needs at least one repetition and one test".into()));
    }
    let mut rows = Vec::new();
    for &sample_size in sample_sizes {
        let r0 = default_r0(sample_size);
        let paths = (0..repetitions as u64)
            .map(|r| {
                let spec = DgpSpec {
                    bubble: BubbleSpec::null(),
                    vol: VolatilitySpec::constant(1.0),
                    length: sample_size,
                    seed: split_seed(seed, r),
                };
                simulate(&spec)
            })
            .collect::<Result<Vec<_>>>()?;
        for &test in tests {
            let mut times = Vec::with_capacity(repetitions);
            for (r, series) in paths.iter().enumerate() {
                let start = Instant::now();
                let outcome = match test {
                    TestKind::Sadf => sadf(series, r0, Demeaning::Ols, 0).map(|r| r.statistic),
                    TestKind::Gsadf => gsadf(series, r0, Demeaning::Ols, 0).map(|r| r.statistic),
                    TestKind::Stadf => stadf(series, &StadfOptions::new(r0)).map(|o| o.result.statistic),
                    TestKind::Gstadf => gstadf(series, &StadfOptions::new(r0)).map(|o| o.result.statistic),
                    TestKind::SadfBootstrap => {
                        wild_bootstrap_sadf(series, r0, bootstrap_replications, r as u64, Demeaning::Ols).map(|b| b.p_value)
                    }
                };
                times.push(start.elapsed().as_secs_f64());
                std::hint::black_box(outcome?);
            }
            times.sort_by(f64::total_cmp);
            let mid = times.len() / 2;
            let median = if times.len() % 2 == 1 { times[mid] } else { 0.5 * (times[mid - 1] + times[mid]) };
            rows.push(TimingRow { sample_size, test, repetitions, median_seconds: median });
        }
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("T,test,repetitions,median_seconds\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{:?}", r.sample_size, r.test.name(), r.repetitions, r.median_seconds);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            sample_sizes: vec![60],
            delta1_grid: vec![0.0, 0.1],
            volatility: vec![VolatilitySpec::constant(1.0), VolatilitySpec::single_shift(1.0, 3.0, 0.5)],
            tests: vec![TestKind::Sadf, TestKind::Stadf],
            replications: 100,
            master_seed: 17,
            ..ExperimentConfig::default()
        }
    }

    fn critical() -> CriticalValues {
        CriticalValues::new(300, 2000, 5)
    }

    #[test]
    fn validation_errors() {
        let mut cfg = small_config();
        cfg.tests.clear();
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let cfg = ExperimentConfig { replications: 10, ..small_config() };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig { level: 1.5, ..small_config() };
        assert!(cfg.validate().is_err());
        assert!(small_config().validate().is_ok());
    }

    #[test]
    fn table_shape_and_reproducibility() {
        let cfg = small_config();
        let cv = critical();
        let a = run_experiment(&cfg, &cv).unwrap();
        let b = run_experiment(&cfg, &cv).unwrap();
        assert_eq!(a.cells.len(), 2 * 2 * 2);
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.to_csv(), b.to_csv());
        for c in &a.cells {
            assert!((0.0..=1.0).contains(&c.frequency));
        }
        let text = a.to_text();
        assert!(text.contains("single_shift"));
        assert!(text.contains("STADF@60"));
    }

    #[test]
    fn adding_cells_keeps_existing_ones() {
        let cv = critical();
        let base = run_experiment(&small_config(), &cv).unwrap();
        let wider = ExperimentConfig { delta1_grid: vec![0.0, 0.05, 0.1], ..small_config() };
        let more = run_experiment(&wider, &cv).unwrap();
        for c in &base.cells {
            let other = more.cell(&c.vol, c.sample_size, c.delta1, c.test).unwrap();
            assert_eq!(c, other);
        }
    }

    #[test]
    fn violation_checks_flag_drops() {
        let cell = |delta1: f64, t: usize, f: f64| Cell {
            vol: VolatilitySpec::constant(1.0),
            sample_size: t,
            delta1,
            test: TestKind::Stadf,
            r0: 0.1,
            critical_value: None,
            rejections: 0,
            failures: 0,
            replications: 500,
            frequency: f,
            valid: true,
        };
        let table = RejectionTable {
            cells: vec![cell(0.0, 100, 0.05), cell(0.1, 100, 0.7), cell(0.0, 200, 0.05), cell(0.1, 200, 0.5)],
            replications: 500,
            level: 0.05,
            master_seed: 0,
            runtime_seconds: 0.0,
        };
        assert!(monotonicity_violations(&table, 2.0).is_empty());
        let bad = consistency_violations(&table, 0.1, 2.0);
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].0.sample_size, bad[0].1.sample_size), (100, 200));
    }

    #[test]
    fn timing_rows() {
        let rows = run_timing(&[20, 50], &[TestKind::Sadf, TestKind::Stadf, TestKind::SadfBootstrap], 3, 99, 1).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.median_seconds >= 0.0));
        assert!(timing_csv(&rows).starts_with("T,test"));
    }

    #[test]
    fn test_names_round_trip() {
        for t in TestKind::ALL {
            assert_eq!(TestKind::parse(t.name()), Some(t));
        }
    }
}
