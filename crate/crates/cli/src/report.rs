//! Running the selected tests on one series and rendering the results.

use serde::Serialize;
use stadf_core::adf_stats::{gsadf, gstadf, sadf, stadf, Demeaning, StadfOptions, TestResult};
use stadf_core::inference::{wild_bootstrap_sadf, CriticalValues, NullFamily};
use stadf_core::kernel_regression::{fit, FitOptions};
use stadf_core::montecarlo::TestKind;
use stadf_core::variance_profile::VarianceProfile;
use stadf_core::TimeSeries;

use crate::error::{CliError, CliResult};

pub const LEVELS: [f64; 3] = [0.10, 0.05, 0.01];

#[derive(Debug, Clone)]
pub struct TestSettings {
    pub tests: Vec<TestKind>,
    pub r0: f64,
    pub bootstrap_replications: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub test: &'static str,
    pub statistic: f64,
    pub p_value: f64,
    pub cv_10: Option<f64>,
    pub cv_5: Option<f64>,
    pub cv_1: Option<f64>,
    pub reject_5: bool,
    /// Source-sample indices of the maximizing window `(start, end]`.
    pub window_start_index: usize,
    pub window_end_index: usize,
    pub window_start: String,
    pub window_end: String,
    pub skipped_windows: usize,
    pub method: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub input: String,
    pub value_column: String,
    pub log_levels: bool,
    pub sample_size: usize,
    pub r0: f64,
    pub seed: u64,
    pub bandwidth: f64,
    pub psi: f64,
    pub omega_bar_sq: f64,
    pub tests: Vec<ReportRow>,
    #[serde(skip)]
    pub profile: VarianceProfile,
}

fn degenerate(test: TestKind, e: stadf_core::Error) -> CliError {
    if e.is_degenerate() {
        CliError::Degenerate(format!("{}: {e}", test.name()))
    } else {
        e.into()
    }
}

fn asymptotic_row(
    test: TestKind,
    result: &TestResult,
    window: (usize, usize),
    series: &TimeSeries,
    critical: &CriticalValues,
) -> CliResult<ReportRow> {
    let family = test.null_family().expect("asymptotic test");
    let dist = critical.distribution(family, result.r0)?;
    let spec = critical.spec(family, result.r0);
    Ok(ReportRow {
        test: test.name(),
        statistic: result.statistic,
        p_value: dist.p_value(result.statistic),
        cv_10: Some(dist.critical_value(0.10)),
        cv_5: Some(dist.critical_value(0.05)),
        cv_1: Some(dist.critical_value(0.01)),
        reject_5: dist.rejects(result.statistic, 0.05),
        window_start_index: window.0,
        window_end_index: window.1,
        window_start: series.label(window.0),
        window_end: series.label(window.1),
        skipped_windows: result.skipped_windows,
        method: format!("asymptotic {} N={} R={} seed={}", family.name(), spec.steps, spec.replications, spec.seed),
    })
}

pub fn run_tests(
    input: &str,
    value_column: &str,
    log_levels: bool,
    series: &TimeSeries,
    settings: &TestSettings,
    critical: &CriticalValues,
) -> CliResult<Report> {
    if settings.tests.is_empty() {
        return Err(CliError::Usage("no tests selected".into()));
    }
    let r0 = settings.r0;
    let options = StadfOptions::new(r0);
    let local = fit(series, &FitOptions::default()).map_err(|e| degenerate(TestKind::Stadf, e))?;
    let profile = VarianceProfile::from_fit(&local).map_err(|e| degenerate(TestKind::Stadf, e))?;

    let mut rows = Vec::new();
    for &test in &settings.tests {
        let row = match test {
            TestKind::Sadf | TestKind::Gsadf => {
                let run = if test == TestKind::Sadf { sadf } else { gsadf };
                let res = run(series, r0, Demeaning::Ols, 0).map_err(|e| degenerate(test, e))?;
                asymptotic_row(test, &res, res.argmax_index, series, critical)?
            }
            TestKind::Stadf | TestKind::Gstadf => {
                let run = if test == TestKind::Stadf { stadf } else { gstadf };
                let out = run(series, &options).map_err(|e| degenerate(test, e))?;
                asymptotic_row(test, &out.result, out.argmax_source_window(), series, critical)?
            }
            TestKind::SadfBootstrap => {
                let boot = wild_bootstrap_sadf(series, r0, settings.bootstrap_replications, settings.seed, Demeaning::Ols)?;
                if boot.degenerate {
                    return Err(CliError::Degenerate("SADF_b: observed SADF is undefined".into()));
                }
                let res = sadf(series, r0, Demeaning::Ols, 0).map_err(|e| degenerate(test, e))?;
                let (a, b) = res.argmax_index;
                ReportRow {
                    test: test.name(),
                    statistic: boot.observed,
                    p_value: boot.p_value,
                    cv_10: None,
                    cv_5: None,
                    cv_1: None,
                    reject_5: boot.rejects(0.05),
                    window_start_index: a,
                    window_end_index: b,
                    window_start: series.label(a),
                    window_end: series.label(b),
                    skipped_windows: res.skipped_windows,
                    method: format!("wild bootstrap B={} seed={}", settings.bootstrap_replications, settings.seed),
                }
            }
        };
        rows.push(row);
    }

    Ok(Report {
        input: input.to_string(),
        value_column: value_column.to_string(),
        log_levels,
        sample_size: series.sample_size(),
        r0,
        seed: settings.seed,
        bandwidth: local.bandwidth,
        psi: local.psi,
        omega_bar_sq: profile.omega_bar_sq(),
        tests: rows,
        profile,
    })
}

impl Report {
    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.tests {
            w.serialize(row).map_err(|e| CliError::Precondition(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Precondition(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} ({}, T = {}, r0 = {:.4}, h = {:.4}, psi = {:.4})\n",
            self.input, self.value_column, self.sample_size, self.r0, self.bandwidth, self.psi
        );
        out.push_str(&format!(
            "{:<7} {:>10} {:>8} {:>8} {:>8} {:>8}  window\n",
            "test", "statistic", "p-value", "cv10", "cv5", "cv1"
        ));
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
        for r in &self.tests {
            out.push_str(&format!(
                "{:<7} {:>10.4} {:>8.4} {:>8} {:>8} {:>8}  ({}, {}]\n",
                r.test,
                r.statistic,
                r.p_value,
                cell(r.cv_10),
                cell(r.cv_5),
                cell(r.cv_1),
                r.window_start,
                r.window_end
            ));
        }
        out
    }
}

/// All `T + 1` knots of the estimated variance profile.
pub fn profile_csv(profile: &VarianceProfile, series: &TimeSeries) -> CliResult<String> {
    let map = profile.index_map();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "label", "s", "eta", "source_index"]).map_err(|e| CliError::Precondition(e.to_string()))?;
    for (t, (s, eta)) in profile.points().enumerate() {
        w.write_record([t.to_string(), series.label(t), s.to_string(), eta.to_string(), map[t].to_string()])
            .map_err(|e| CliError::Precondition(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Precondition(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Null family names accepted on the command line.
pub fn parse_family(name: &str) -> CliResult<NullFamily> {
    NullFamily::parse(name).ok_or_else(|| {
        let names: Vec<_> = NullFamily::ALL.iter().map(|f| f.name()).collect();
        CliError::Usage(format!("unknown family {name:?}; expected one of {}", names.join(", ")))
    })
}
