use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn stadf(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stadf")).args(args).env("STADF_CACHE_DIR", cache).output().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes `rows` observations of a slowly drifting series.
fn write_csv(dir: &Path, rows: usize) -> PathBuf {
    let path = dir.join("short.csv");
    let mut text = String::from("t,price\n");
    for i in 0..rows {
        text.push_str(&format!("{i},{}\n", 10.0 + (i as f64 * 0.7).sin()));
    }
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn ten_observations_is_a_length_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), 10);
    let out = stadf(&["test", "--input", input.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("too short"), "{}", stderr(&out));
}

#[test]
fn malformed_value_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    let mut text = std::fs::read_to_string(fixture("prices.csv")).unwrap();
    text = text.replacen("2019-01-05,", "2019-01-05,x", 1);
    std::fs::write(&input, text).unwrap();
    let out = stadf(&["test", "--input", input.to_str().unwrap(), "--date-col", "date"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("bad.csv:6:"), "{}", stderr(&out));
}

#[test]
fn unknown_test_name_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("prices.csv");
    let out = stadf(&["test", "--input", input.to_str().unwrap(), "--tests", "KPSS"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constant_series_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.csv");
    let text: String = std::iter::once("v\n".to_string()).chain((0..40).map(|_| "5\n".to_string())).collect();
    std::fs::write(&input, text).unwrap();
    let out = stadf(&["test", "--input", input.to_str().unwrap(), "--tests", "STADF"], dir.path());
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}

#[test]
fn critvals_hits_cache_on_second_call() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["critvals", "--family", "sadf_gls", "--r0", "0.1", "--null-steps", "200", "--null-reps", "2000"];
    let first = stadf(&args, dir.path());
    let second = stadf(&args, dir.path());
    let forced = stadf(&[&args[..], &["--force"]].concat(), dir.path());
    let line = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().nth(1).unwrap().to_string();
    assert!(line(&first).ends_with(",miss"));
    assert!(line(&second).ends_with(",hit"));
    assert!(line(&forced).ends_with(",miss"));
    assert_eq!(line(&first).trim_end_matches(",miss"), line(&second).trim_end_matches(",hit"));
}

#[test]
fn small_null_quantiles_are_within_the_wide_band() {
    let dir = tempfile::tempdir().unwrap();
    let out = stadf(&["critvals", "--null-reps", "1000", "--null-steps", "2000"], dir.path());
    let line = String::from_utf8_lossy(&out.stdout).lines().nth(1).unwrap().to_string();
    let q: Vec<f64> = line.split(',').skip(5).take(3).map(|v| v.parse().unwrap()).collect();
    for (v, big) in q.iter().zip([2.319, 2.626, 3.223]) {
        assert!((v - big).abs() < 0.15, "{q:?}");
    }
}

#[test]
fn config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "[experiment]\nreplication = 100\n").unwrap();
    let out = stadf(&["simulate", "--config", unknown.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("replication"), "{}", stderr(&out));

    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "[experiment]\ntests = []\n").unwrap();
    let out = stadf(&["simulate", "--config", empty.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("empty"), "{}", stderr(&out));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    std::fs::write(
        &config,
        r#"
[experiment]
sample_sizes = [50]
delta1_grid = [0.0, 0.1]
tests = ["SADF", "SADF_b", "STADF", "GSTADF"]
replications = 100
bootstrap_replications = 99
volatility = [{ kind = "single_shift", sigma0 = 1.0, sigma1 = 3.0 }]

[null]
steps = 300
generalized_steps = 100
replications = 2000
"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = stadf(&["simulate", "--config", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap()], dir.path());
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read_to_string(out_dir.join("rejection.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 2 * 4);
}

#[test]
fn shipped_desk_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/table1_desk.toml");
    let config = stadf_cli::config::SimulateConfig::load(&path).unwrap();
    config.experiment.validate().unwrap();
    assert_eq!(config.experiment.replications, 500);
    assert_eq!(config.experiment.delta1_grid.len(), 6);
    assert_eq!(config.experiment.volatility.len(), 5);
}

#[test]
fn report_files_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let input = fixture("prices.csv");
    let out = stadf(
        &[
            "test", "--input", input.to_str().unwrap(), "--date-col", "date", "--tests", "STADF", "--null-reps", "2000",
            "--null-steps", "300", "--format", "csv,json,svg", "--out", out_dir.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["report.csv", "report.json", "profile.csv", "series.svg", "profile.svg"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let profile = std::fs::read_to_string(out_dir.join("profile.csv")).unwrap();
    assert_eq!(profile.lines().count(), 1 + 241);
    // every number round-trips through its text form
    for line in profile.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let eta: f64 = fields[3].parse().unwrap();
        assert_eq!(eta.to_string(), fields[3]);
    }
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["tests"][0]["test"], "STADF");
}

/// Regenerates the golden report when `UPDATE_GOLDEN` is set; the flags
/// match the acceptance target.
#[test]
fn regenerate_golden() {
    if std::env::var_os("UPDATE_GOLDEN").is_none() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let golden = fixture("golden");
    let input = fixture("prices.csv");
    let out = stadf(
        &[
            "test", "--date-col", "date", "--tests", "SADF,SADF_b,STADF,GSADF,GSTADF", "--seed", "7", "--null-steps", "500",
            "--gnull-steps", "200", "--null-reps", "5000", "--format", "csv,json", "--input", input.to_str().unwrap(),
            "--out", golden.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
}
