//! Command-line front end for the bubble tests.
//!
//! Exit status: 0 success, 1 I/O or other failure, 2 usage, 3 malformed
//! input, 4 violated precondition (too short, invalid configuration),
//! 5 degenerate statistic.

pub mod config;
pub mod error;
pub mod input;
pub mod report;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use stadf_core::adf_stats::default_r0;
use stadf_core::inference::{NullCache, NullSpec};
use stadf_core::montecarlo::{run_experiment, run_timing, timing_csv, TestKind};

use crate::config::{NullSettings, SimulateConfig};
use crate::error::{CliError, CliResult};
use crate::input::{read_series, ColumnSelection};
use crate::report::{parse_family, profile_csv, run_tests, TestSettings};
use crate::svg::{line_chart, Line};

#[derive(Debug, Parser)]
#[command(name = "stadf", version, about = "Bubble tests robust to non-stationary volatility")]
pub struct Cli {
    /// Worker threads for simulations (defaults to all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run bubble tests on a CSV series
    Test(TestArgs),
    /// Monte Carlo rejection frequencies or timing runs
    Simulate(SimulateArgs),
    /// Simulate and cache null critical values
    Critvals(CritvalsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct NullArgs {
    /// Brownian discretization for the SADF-type nulls
    #[arg(long, default_value_t = 2000)]
    pub null_steps: usize,
    /// Brownian discretization for the GSADF-type nulls
    #[arg(long, default_value_t = 400)]
    pub gnull_steps: usize,
    /// Simulated suprema per null distribution
    #[arg(long, default_value_t = 100_000)]
    pub null_reps: usize,
    #[arg(long, default_value_t = 20_240_101)]
    pub null_seed: u64,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding observation labels (row index when omitted)
    #[arg(long)]
    pub date_col: Option<String>,
    /// Column holding the series (last non-date column when omitted)
    #[arg(long)]
    pub value_col: Option<String>,
    #[arg(long, value_delimiter = ',', value_parser = parse_test, default_value = "SADF,SADF_b,STADF")]
    pub tests: Vec<TestKind>,
    /// Minimum window fraction (0.01 + 1.8/sqrt(T) when omitted)
    #[arg(long)]
    pub r0: Option<f64>,
    /// Wild bootstrap replications
    #[arg(long = "B", default_value_t = 199)]
    pub bootstrap: usize,
    /// Bootstrap seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory for report files
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<Format>,
    /// Re-simulate null distributions even when cached
    #[arg(long)]
    pub force: bool,
    /// Test log levels instead of levels
    #[arg(long)]
    pub log: bool,
    #[command(flatten)]
    pub null: NullArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML experiment configuration (desk-scale defaults when omitted)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the timing benchmark instead of the rejection experiment
    #[arg(long)]
    pub timing: bool,
    /// Override the configured replication count
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct CritvalsArgs {
    /// One of sadf_gls, gsadf_gls, sadf_ols, gsadf_ols
    #[arg(long, default_value = "sadf_gls")]
    pub family: String,
    #[arg(long, default_value_t = 0.1)]
    pub r0: f64,
    /// Discretization N (2000, or 400 for the generalized families)
    #[arg(long)]
    pub null_steps: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub null_reps: usize,
    #[arg(long, default_value_t = 20_240_101)]
    pub seed: u64,
    #[arg(long)]
    pub force: bool,
}

fn parse_test(name: &str) -> Result<TestKind, String> {
    TestKind::parse(name).ok_or_else(|| {
        let names: Vec<_> = TestKind::ALL.iter().map(|t| t.name()).collect();
        format!("unknown test {name:?}; expected one of {}", names.join(", "))
    })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(CliError::io(&path))?;
    Ok(path)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Test(args) => cmd_test(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Critvals(args) => cmd_critvals(&args),
    }
}

pub fn cmd_test(args: &TestArgs) -> CliResult<()> {
    let columns = ColumnSelection { date: args.date_col.clone(), value: args.value_col.clone() };
    let loaded = read_series(&args.input, &columns)?;
    let series = if args.log {
        loaded.series.ln().map_err(|e| CliError::Precondition(format!("--log: {e}")))?
    } else {
        loaded.series
    };
    let r0 = args.r0.unwrap_or_else(|| default_r0(series.sample_size()));
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(CliError::Usage(format!("--r0 must lie in (0, 1), got {r0}")));
    }
    let settings = TestSettings { tests: args.tests.clone(), r0, bootstrap_replications: args.bootstrap, seed: args.seed };
    let null = NullSettings {
        steps: args.null.null_steps,
        generalized_steps: args.null.gnull_steps,
        replications: args.null.null_reps,
        seed: args.null.null_seed,
    };
    let critical = null.critical_values(Some(NullCache::from_env()), args.force);
    let input_name = args.input.file_name().map_or_else(|| args.input.display().to_string(), |n| n.to_string_lossy().into());
    let report = run_tests(&input_name, &loaded.value_column, args.log, &series, &settings, &critical)?;
    print!("{}", report.to_text());

    if let Some(dir) = &args.out {
        create_dir(dir)?;
        write_file(dir, "profile.csv", &profile_csv(&report.profile, &series)?)?;
        for format in &args.format {
            match format {
                Format::Csv => {
                    write_file(dir, "report.csv", &report.to_csv()?)?;
                }
                Format::Json => {
                    write_file(dir, "report.json", &report.to_json())?;
                }
                Format::Svg => {
                    let levels: Vec<(f64, f64)> = series.values().iter().enumerate().map(|(t, v)| (t as f64, *v)).collect();
                    let shade = report
                        .tests
                        .iter()
                        .find(|r| r.test == "STADF" || r.test == "GSTADF")
                        .or(report.tests.first())
                        .map(|r| (r.window_start_index as f64, r.window_end_index as f64));
                    let title = format!("{} ({})", input_name, loaded.value_column);
                    let chart = line_chart(&title, &[Line { points: &levels, color: "black", dashed: false }], shade);
                    write_file(dir, "series.svg", &chart)?;
                    let eta: Vec<(f64, f64)> = report.profile.points().collect();
                    let diagonal = [(0.0, 0.0), (1.0, 1.0)];
                    let chart = line_chart(
                        "estimated variance profile",
                        &[
                            Line { points: &eta, color: "steelblue", dashed: false },
                            Line { points: &diagonal, color: "gray", dashed: true },
                        ],
                        None,
                    );
                    write_file(dir, "profile.svg", &chart)?;
                }
            }
        }
        info!("wrote report files to {}", dir.display());
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let mut config = match &args.config {
        Some(path) => SimulateConfig::load(path)?,
        None => SimulateConfig::default(),
    };
    if args.timing {
        let t = &config.timing;
        let rows = run_timing(&t.sample_sizes, &t.tests, t.repetitions, t.bootstrap_replications, t.seed)?;
        let csv = timing_csv(&rows);
        print!("{csv}");
        if let Some(dir) = &args.out {
            create_dir(dir)?;
            write_file(dir, "timing.csv", &csv)?;
        }
        return Ok(());
    }

    if let Some(r) = args.replications {
        config.experiment.replications = r;
    }
    config.experiment.validate()?;
    let critical = config.null.critical_values(Some(NullCache::from_env()), args.force);
    let table = run_experiment(&config.experiment, &critical)?;
    let text = table.to_text();
    print!("{text}");
    info!("experiment finished in {:.1}s", table.runtime_seconds);
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        write_file(dir, "rejection.csv", &table.to_csv())?;
        write_file(dir, "rejection.txt", &text)?;
    }
    Ok(())
}

pub fn cmd_critvals(args: &CritvalsArgs) -> CliResult<()> {
    let family = parse_family(&args.family)?;
    let steps = args.null_steps.unwrap_or(if family.is_generalized() { 400 } else { 2000 });
    let spec = NullSpec { family, r0: args.r0, steps, replications: args.null_reps, seed: args.seed };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let cache = NullCache::from_env();
    let (dist, hit) = cache.load_or_simulate(&spec, args.force)?;
    println!("family,r0,N,R,seed,q90,q95,q99,cache");
    println!(
        "{},{},{},{},{},{},{},{},{}",
        family.name(),
        args.r0,
        steps,
        args.null_reps,
        args.seed,
        dist.quantile(0.90),
        dist.quantile(0.95),
        dist.quantile(0.99),
        if hit { "hit" } else { "miss" }
    );
    info!("cache file {}", cache.path(&spec).display());
    Ok(())
}
