use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::HvConfig;
use crate::models::{self, ModelFamily};
use crate::problem::{ProblemModel, SpaceKind};
use crate::sway::SwayConfig;

use super::nsga2::Nsga2Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sway,
    Rand,
    #[serde(alias = "ground_truth", alias = "gt")]
    GroundTruth,
    Nsga2,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Sway => "sway",
            Algorithm::Rand => "rand",
            Algorithm::GroundTruth => "groundtruth",
            Algorithm::Nsga2 => "nsga2",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a scenario comes from: a built-in name or a file of a given family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Builtin(String),
    File { family: ModelFamily, path: PathBuf },
}

impl ModelSource {
    pub fn scenario_name(&self) -> String {
        match self {
            ModelSource::Builtin(name) => name.to_lowercase(),
            ModelSource::File { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().to_lowercase())
                .unwrap_or_else(|| "model".into()),
        }
    }

    pub fn load(&self, model_seed: u64) -> Result<Arc<dyn ProblemModel>> {
        match self {
            ModelSource::Builtin(name) => {
                if models::family_of(name).is_none() {
                    return Err(Error::config(format!("unknown built-in model {name}")));
                }
                models::load_builtin(name, model_seed)
            }
            ModelSource::File { family, path } => {
                if !path.is_file() {
                    return Err(Error::config(format!(
                        "model file {} not found",
                        path.display()
                    )));
                }
                models::load_file(*family, path, model_seed)
            }
        }
    }
}

/// How many pool members RAND evaluates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RandSize {
    /// Median front size of NSGA-II over all repeats, or `Sway` when NSGA-II is not run.
    #[default]
    Auto,
    /// Same size as SWAY's output in that repeat.
    Sway,
    Nsga2,
    #[serde(untagged)]
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSource,
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Fixes model-internal randomness (POM3 heaps, feature attributes).
    #[serde(default)]
    pub model_seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub rand_size: RandSize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub sway: SwayConfig,
    /// Defaults to the shipped per-scenario parameters.
    #[serde(default)]
    pub nsga2: Option<Nsga2Params>,
    #[serde(default)]
    pub hv: HvConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_pool_size() -> usize {
    10_000
}

fn default_repeats() -> usize {
    30
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Sway, Algorithm::Rand, Algorithm::GroundTruth]
}

fn default_alpha() -> f64 {
    0.05
}

impl ExperimentConfig {
    pub fn new(model: ModelSource) -> Self {
        Self {
            model,
            pool_size: default_pool_size(),
            repeats: default_repeats(),
            master_seed: 0,
            model_seed: 0,
            algorithms: default_algorithms(),
            rand_size: RandSize::Auto,
            alpha: default_alpha(),
            sway: SwayConfig::default(),
            nsga2: None,
            hv: HvConfig::default(),
            output_dir: None,
        }
    }

    pub fn builtin(name: &str) -> Self {
        Self::new(ModelSource::Builtin(name.to_string()))
    }

    /// Parses TOML. Relative model and output paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        if let Some(base) = base {
            if let ModelSource::File { path, .. } = &mut cfg.model {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
            if let Some(out) = &mut cfg.output_dir {
                if out.is_relative() {
                    *out = base.join(&*out);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn enough(&self) -> usize {
        self.sway.enough_for(self.pool_size)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::config("repeats must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("no algorithms configured"));
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return Err(Error::config("an algorithm is listed twice"));
        }
        if self.algorithms.contains(&Algorithm::Sway) && self.pool_size < 4 * self.enough() {
            return Err(Error::config(format!(
                "pool size {} is below 4 x enough ({})",
                self.pool_size,
                self.enough()
            )));
        }
        if self.pool_size == 0 {
            return Err(Error::config("pool size must be positive"));
        }
        if self.sway.total_group == 0 {
            return Err(Error::config("total_group must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha must lie in (0, 1)"));
        }
        if let RandSize::Fixed(0) = self.rand_size {
            return Err(Error::config("a fixed RAND size must be positive"));
        }
        if self.rand_size == RandSize::Nsga2 && !self.algorithms.contains(&Algorithm::Nsga2) {
            return Err(Error::config(
                "rand_size = \"nsga2\" needs NSGA-II in the algorithm list",
            ));
        }
        if let Some(p) = &self.nsga2 {
            p.validate()?;
        }
        if let ModelSource::File { path, .. } = &self.model {
            if !path.is_file() {
                return Err(Error::config(format!(
                    "model file {} not found",
                    path.display()
                )));
            }
        }
        if let ModelSource::Builtin(name) = &self.model {
            if models::family_of(name).is_none() {
                return Err(Error::config(format!("unknown built-in model {name}")));
            }
        }
        let family = match &self.model {
            ModelSource::Builtin(name) => models::family_of(name),
            ModelSource::File { family, .. } => Some(*family),
        };
        if family == Some(ModelFamily::Spl) && self.algorithms.contains(&Algorithm::Nsga2) {
            return Err(Error::config(
                "NSGA-II is only wired for continuous models; remove it for product-line models",
            ));
        }
        Ok(())
    }

    /// NSGA-II parameters: the configured ones, else the scenario defaults.
    pub fn nsga2_params(&self, model: &dyn ProblemModel) -> Result<Nsga2Params> {
        if model.decision_space().kind() != SpaceKind::Continuous {
            return Err(Error::config("NSGA-II needs a continuous decision space"));
        }
        Ok(self
            .nsga2
            .clone()
            .unwrap_or_else(|| Nsga2Params::for_scenario(&self.model.scenario_name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = ExperimentConfig::parse("model = \"pom3a\"", None).unwrap();
        assert_eq!(cfg.pool_size, 10_000);
        assert_eq!(cfg.repeats, 30);
        assert_eq!(cfg.algorithms, default_algorithms());
        assert_eq!(cfg.enough(), 100);
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
            model = "flight"
            pool_size = 400
            repeats = 3
            master_seed = 7
            algorithms = ["sway", "rand", "groundtruth", "nsga2"]
            rand_size = 25

            [sway]
            enough = 20
            comparator = "continuous"

            [nsga2]
            mu = 40
            cxpb = 0.9
            mutpb = 0.1

            [hv.mode]
            kind = "monte_carlo"
            samples = 1000
            seed = 3
        "#;
        let cfg = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(cfg.rand_size, RandSize::Fixed(25));
        assert_eq!(cfg.sway.enough, Some(20));
        assert_eq!(cfg.nsga2.as_ref().unwrap().stagnation_window, 5);
        let again = ExperimentConfig::parse(&cfg.to_toml().unwrap(), None).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            "model = \"nope\"",
            "model = \"pom3a\"\nrepeats = 0",
            "model = \"pom3a\"\npool_size = 100\n[sway]\nenough = 50",
            "model = \"spl49\"\nalgorithms = [\"sway\", \"nsga2\"]",
            "model = \"pom3a\"\nunknown = 1",
            "model = \"pom3a\"\nrand_size = \"nsga2\"",
            "model = { family = \"xomo\", path = \"/does/not/exist.toml\" }",
        ];
        for text in bad {
            assert!(
                matches!(ExperimentConfig::parse(text, None), Err(Error::Config(_))),
                "{text}"
            );
        }
    }
}
