//! TOML configuration for `stadf simulate`. Unknown keys are errors.

use std::path::Path;

use serde::{Deserialize, Serialize};
use stadf_core::inference::{CriticalValues, NullCache};
use stadf_core::montecarlo::{ExperimentConfig, TestKind};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NullSettings {
    pub steps: usize,
    /// Discretization of the generalized families.
    pub generalized_steps: usize,
    pub replications: usize,
    pub seed: u64,
}

impl Default for NullSettings {
    fn default() -> Self {
        Self { steps: 2000, generalized_steps: 400, replications: 100_000, seed: 20_240_101 }
    }
}

impl NullSettings {
    pub fn critical_values(&self, cache: Option<NullCache>, force: bool) -> CriticalValues {
        let cv = CriticalValues::new(self.steps, self.replications, self.seed).with_generalized_steps(self.generalized_steps);
        match cache {
            Some(c) => cv.with_cache(c, force),
            None => cv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingSettings {
    pub sample_sizes: Vec<usize>,
    pub tests: Vec<TestKind>,
    pub repetitions: usize,
    pub bootstrap_replications: usize,
    pub seed: u64,
}

impl Default for TimingSettings {
    fn default() -> Self {
        Self {
            sample_sizes: vec![20, 50, 100, 200, 400],
            tests: vec![TestKind::Sadf, TestKind::Stadf, TestKind::SadfBootstrap],
            repetitions: 25,
            bootstrap_replications: 199,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub experiment: ExperimentConfig,
    pub null: NullSettings,
    pub timing: TimingSettings,
}

impl SimulateConfig {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let config: SimulateConfig = toml::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.span().map_or(0, |span| 1 + text[..span.start].matches('\n').count() as u64),
            message: e.message().to_string(),
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_listed() {
        let text = "[experiment]\nreplications = 200\nreplicatoins = 3\n";
        match SimulateConfig::parse(text, Path::new("c.toml")) {
            Err(CliError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("replicatoins"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partial_config_uses_defaults() {
        let text = r#"
[experiment]
sample_sizes = [100]
tests = ["STADF", "SADF_b"]
r0_rule = { fixed = 0.1 }
volatility = [{ kind = "single_shift", sigma0 = 1.0, sigma1 = 3.0 }]
"#;
        let cfg = SimulateConfig::parse(text, Path::new("c.toml")).unwrap();
        assert_eq!(cfg.experiment.tests, vec![TestKind::Stadf, TestKind::SadfBootstrap]);
        assert_eq!(cfg.experiment.replications, 500);
        assert_eq!(cfg.experiment.volatility[0].tau_sigma, 0.5);
        assert_eq!(cfg.null, NullSettings::default());
        cfg.experiment.validate().unwrap();
    }

    #[test]
    fn empty_test_list_fails_validation() {
        let cfg = SimulateConfig::parse("[experiment]\ntests = []\n", Path::new("c.toml")).unwrap();
        assert!(cfg.experiment.validate().is_err());
    }
}
